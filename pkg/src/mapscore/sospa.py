"""Order-aware sequence metric for open polylines.

The metric is the minimum, over assignments whose index pairs strictly
increase in both sequences, of the summed point costs ``d(x_i, y_j)**p``
plus ``cutoff_c**p / 2`` per unmatched point, all raised to ``1/p``. The
minimization is the classic minimum-cost edit trace, solved here with the
Wagner-Fischer dynamic program; a brute-force enumeration over ordered
assignment sets is provided as an independent oracle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.spatial.distance import cdist

from ._dp import edit_backtrack, edit_table
from .errors import InputError
from .geometry import MetricParams, Polyline, reverse

ORACLE_MAX_LEN = 8


@dataclass(frozen=True)
class OrderedAssignment:
    """Matched index pairs, strictly increasing in both sequences (0-based)."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        last_i, last_j = -1, -1
        for i, j in self.pairs:
            if i <= last_i or j <= last_j:
                raise InputError("assignment pairs must strictly increase in both indices")
            last_i, last_j = i, j

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass
class SospaResult:
    """One metric evaluation: the value, its power-p cost, and an optimal assignment."""

    value: float
    raw_power_cost: float
    assignment: OrderedAssignment
    matched_count: int
    unmatched_count: int
    used_reversal: bool = False


def _require_open(line: Polyline, name: str) -> None:
    if line.closed:
        raise InputError(f"{name} must be an open polyline; use the cyclic variant for polygons")


def _power_costs(x: np.ndarray, y: np.ndarray, params: MetricParams) -> np.ndarray:
    if x.shape[1] != y.shape[1]:
        raise InputError(f"dimension mismatch: {x.shape[1]} vs {y.shape[1]}")
    dists = cdist(x, y)
    if params.exponent_p != 1.0:
        dists = dists**params.exponent_p
    return dists


def _geometry_key(line: Polyline) -> tuple:
    return (len(line), line.points.tobytes())


def _backtrack(table: np.ndarray, costs: np.ndarray, gap: float) -> list[tuple[int, int]]:
    # Ties prefer a match over skipping a point of x over skipping one of y,
    # which pins down the reported assignment; the value never depends on it.
    return [tuple(pair) for pair in edit_backtrack(table, costs, gap).tolist()]


def _assemble(
    pairs: list[tuple[int, int]],
    costs: np.ndarray,
    n_x: int,
    n_y: int,
    params: MetricParams,
) -> SospaResult:
    matched = len(pairs)
    unmatched = n_x + n_y - 2 * matched
    if pairs:
        rows, cols = zip(*pairs)
        subs = costs[list(rows), list(cols)].tolist()
    else:
        subs = []
    raw = math.fsum(subs) + params.unmatched_cost * unmatched
    p = params.exponent_p
    value = raw if p == 1.0 else raw ** (1.0 / p)
    return SospaResult(
        value=value,
        raw_power_cost=raw,
        assignment=OrderedAssignment(tuple(pairs)),
        matched_count=matched,
        unmatched_count=unmatched,
    )


def _solve_open(x_pts: np.ndarray, y_pts: np.ndarray, params: MetricParams) -> SospaResult:
    costs = np.ascontiguousarray(_power_costs(x_pts, y_pts, params))
    table = edit_table(costs, params.unmatched_cost)
    pairs = _backtrack(table, costs, params.unmatched_cost)
    return _assemble(pairs, costs, len(x_pts), len(y_pts), params)


def _mirror(result: SospaResult) -> SospaResult:
    result.assignment = OrderedAssignment(tuple(sorted((j, i) for i, j in result.assignment.pairs)))
    return result


def sospa(x: Polyline, y: Polyline, params: MetricParams) -> SospaResult:
    """Sequence metric between two open polylines.

    Empty inputs are legal degenerate cases: with one side empty the value
    is ``((c**p / 2) * (|x| + |y|)) ** (1/p)``. The arguments are ordered
    canonically inside, so the function is exactly symmetric.
    """
    _require_open(x, "x")
    _require_open(y, "y")
    if _geometry_key(y) < _geometry_key(x):
        return _mirror(_solve_open(y.points, x.points, params))
    return _solve_open(x.points, y.points, params)


def sospa_directional_min(x: Polyline, y: Polyline, params: MetricParams) -> SospaResult:
    """Minimum of the metric over the two relative traversal directions.

    The forward evaluation wins ties, and ``used_reversal`` records whether
    the winning evaluation reversed one side. Closed inputs delegate to the
    cyclic variant.
    """
    if x.closed != y.closed:
        raise InputError("both polylines must be the same geometry kind (open or closed)")
    if x.closed:
        from .cyclic import cyclic_sospa_directional_min

        return cyclic_sospa_directional_min(x, y, params)
    forward = sospa(x, y, params)
    if forward.raw_power_cost == 0.0:
        return forward
    backward = sospa(x, reverse(y), params)
    if backward.value < forward.value:
        backward.used_reversal = True
        return backward
    return forward


def normalized_from_value(value: float, n_x: int, n_y: int, params: MetricParams) -> float:
    """Map a metric value into [0, 1]: ``2 d / (bound + d)`` with the empty-assignment bound."""
    if n_x == 0 and n_y == 0:
        return 0.0
    bound = params.power_bound(n_x, n_y) ** (1.0 / params.exponent_p)
    return min(1.0, 2.0 * value / (bound + value))


def sospa_normalized(x: Polyline, y: Polyline, params: MetricParams) -> float:
    """Normalized sequence metric in [0, 1]; remains a metric for p = 1."""
    if len(x) == 0 and len(y) == 0:
        return 0.0
    return normalized_from_value(sospa(x, y, params).value, len(x), len(y), params)


def assignment_cost(x: Polyline, y: Polyline, assignment: OrderedAssignment, params: MetricParams) -> float:
    """Metric value of one fixed assignment (not necessarily the optimum)."""
    costs = _power_costs(x.points, y.points, params)
    matched = len(assignment)
    raw = math.fsum(costs[i, j] for i, j in assignment.pairs)
    raw += params.unmatched_cost * (len(x) + len(y) - 2 * matched)
    return raw ** (1.0 / params.exponent_p)


def sospa_bruteforce_oracle(x: Polyline, y: Polyline, params: MetricParams) -> SospaResult:
    """Exhaustive minimum over every ordered assignment set; validation only."""
    _require_open(x, "x")
    _require_open(y, "y")
    n, m = len(x), len(y)
    if n > ORACLE_MAX_LEN or m > ORACLE_MAX_LEN:
        raise InputError(f"oracle refuses sequences longer than {ORACLE_MAX_LEN}")
    costs = _power_costs(x.points, y.points, params)
    gap = params.unmatched_cost
    best_raw = math.inf
    best_pairs: tuple[tuple[int, int], ...] = ()
    for k in range(min(n, m) + 1):
        base = gap * (n + m - 2 * k)
        for rows in combinations(range(n), k):
            for cols in combinations(range(m), k):
                raw = math.fsum(costs[i, j] for i, j in zip(rows, cols)) + base
                if raw < best_raw:
                    best_raw = raw
                    best_pairs = tuple(zip(rows, cols))
    return _assemble(list(best_pairs), costs, n, m, params)
