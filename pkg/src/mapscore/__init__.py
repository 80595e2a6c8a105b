"""Order-aware polyline metrics and soft multi-instance evaluation.

The single-instance distance matches two point sequences under an
order-preserving assignment with a cutoff penalty for unmatched points; a
cyclic variant covers polygons. The multi-instance metric scores sets of
confidence-weighted instances with an optimal soft assignment that splits
into localization and detection error. Chamfer / Frechet thresholded AP are
included as comparison baselines, together with a scene-file evaluation
harness and synthetic scenario generators.
"""

from .assignment import gospa_unordered_reference, solve_assignment
from .baselines import ApConfig, average_precision, chamfer, frechet_discrete, mean_ap
from .cyclic import (
    CyclicSospaResult,
    cyclic_sospa,
    cyclic_sospa_directional_min,
    cyclic_sospa_twosided_oracle,
)
from .dap import (
    DapAggregate,
    DapResult,
    Instance,
    InstanceSet,
    MeanDap,
    dap,
    dap_bruteforce_oracle,
    mdap,
    pair_base_distance,
)
from .dataset import (
    ClassReport,
    EvaluationReport,
    SceneClass,
    SceneRecord,
    evaluate,
    load_scenes,
    save_scenes,
    synthesize_scenario,
)
from .errors import InputError, SchemaError
from .geometry import (
    MetricParams,
    Polyline,
    cyclic_shift,
    point_distance,
    resample_equidistant,
    reverse,
)
from .sospa import (
    OrderedAssignment,
    SospaResult,
    assignment_cost,
    sospa,
    sospa_bruteforce_oracle,
    sospa_directional_min,
    sospa_normalized,
)

__version__ = "0.1.0"

__all__ = [
    "ApConfig",
    "ClassReport",
    "CyclicSospaResult",
    "DapAggregate",
    "DapResult",
    "EvaluationReport",
    "InputError",
    "Instance",
    "InstanceSet",
    "MeanDap",
    "MetricParams",
    "OrderedAssignment",
    "Polyline",
    "SceneClass",
    "SceneRecord",
    "SchemaError",
    "SospaResult",
    "assignment_cost",
    "average_precision",
    "chamfer",
    "cyclic_shift",
    "cyclic_sospa",
    "cyclic_sospa_directional_min",
    "cyclic_sospa_twosided_oracle",
    "dap",
    "dap_bruteforce_oracle",
    "evaluate",
    "frechet_discrete",
    "gospa_unordered_reference",
    "load_scenes",
    "mdap",
    "mean_ap",
    "pair_base_distance",
    "point_distance",
    "resample_equidistant",
    "reverse",
    "save_scenes",
    "solve_assignment",
    "sospa",
    "sospa_bruteforce_oracle",
    "sospa_directional_min",
    "sospa_normalized",
    "synthesize_scenario",
]
