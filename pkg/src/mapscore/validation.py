"""Randomized oracle-equivalence and metric-axiom suites.

These are the library-side check runners behind the ``oracle`` CLI command;
the test suite drives the same functions so every printed count is
reproducible with direct calls.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .assignment import enumerate_partial_matchings_cost, gospa_unordered_reference, solve_assignment
from .cyclic import cyclic_sospa, cyclic_sospa_twosided_oracle
from .dap import Instance, InstanceSet, dap, dap_bruteforce_oracle
from .geometry import MetricParams, Polyline
from .sospa import sospa, sospa_bruteforce_oracle, sospa_normalized

REL_TOL = 1e-12
TRIANGLE_SLACK = 1e-9


@dataclass
class SuiteResult:
    """Outcome of one randomized suite."""

    name: str
    checked: int
    failures: int
    messages: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def record(self, ok: bool, message: str) -> None:
        self.checked += 1
        if not ok:
            self.failures += 1
            if len(self.messages) < 10:
                self.messages.append(message)


def _close(a: float, b: float, rel: float = REL_TOL) -> bool:
    return abs(a - b) <= rel * max(1.0, abs(a), abs(b))


def _random_open(rng: np.random.Generator, max_len: int, min_len: int = 0) -> Polyline:
    n = int(rng.integers(min_len, max_len + 1))
    return Polyline(rng.uniform(-4.0, 4.0, size=(n, 2)))


def _random_closed(rng: np.random.Generator, max_len: int) -> Polyline:
    n = int(rng.integers(3, max_len + 1))
    return Polyline(rng.uniform(-4.0, 4.0, size=(n, 2)), closed=True)


def _random_params(rng: np.random.Generator, p_choices=(1.0, 1.5, 2.0)) -> MetricParams:
    c = float(rng.uniform(0.1, 3.0)) + 1e-9
    return MetricParams(cutoff_c=c, exponent_p=float(rng.choice(p_choices)))


def sospa_oracle_suite(seed: int = 0, pairs: int = 1000) -> SuiteResult:
    """DP solver against exhaustive ordered-assignment enumeration."""
    rng = np.random.default_rng(seed)
    out = SuiteResult("sospa-oracle", 0, 0)
    for k in range(pairs):
        params = _random_params(rng)
        x = _random_open(rng, 6)
        y = _random_open(rng, 6)
        got = sospa(x, y, params).value
        want = sospa_bruteforce_oracle(x, y, params).value
        out.record(_close(got, want), f"pair {k}: dp={got!r} oracle={want!r}")
    return out


def sospa_axiom_suite(seed: int = 0, triples: int = 1000) -> SuiteResult:
    """Identity and symmetry exactly; triangle inequality for p in {1, 2}."""
    rng = np.random.default_rng(seed)
    out = SuiteResult("sospa-axioms", 0, 0)
    for k in range(triples):
        c = float(rng.uniform(0.1, 3.0)) + 1e-9
        p = float(rng.choice((1.0, 2.0)))
        params = MetricParams(cutoff_c=c, exponent_p=p)
        x = _random_open(rng, 8)
        y = _random_open(rng, 8)
        z = _random_open(rng, 8)
        d_xy = sospa(x, y, params).value
        d_yx = sospa(y, x, params).value
        d_xz = sospa(x, z, params).value
        d_zy = sospa(z, y, params).value
        ok = d_xy == d_yx
        ok = ok and sospa(x, x, params).value == 0.0
        ok = ok and d_xy <= d_xz + d_zy + TRIANGLE_SLACK
        out.record(ok, f"triple {k}: d_xy={d_xy!r} d_yx={d_yx!r} d_xz+d_zy={d_xz + d_zy!r} (p={p})")
    return out


def normalized_triangle_suite(seed: int = 0, triples: int = 1000) -> SuiteResult:
    """Normalized metric: triangle inequality for p = 1 and range in [0, 1]."""
    rng = np.random.default_rng(seed)
    out = SuiteResult("sospa-normalized-triangle", 0, 0)
    for k in range(triples):
        params = MetricParams(cutoff_c=float(rng.uniform(0.1, 3.0)) + 1e-9, exponent_p=1.0)
        x = _random_open(rng, 8)
        y = _random_open(rng, 8)
        z = _random_open(rng, 8)
        n_xy = sospa_normalized(x, y, params)
        n_xz = sospa_normalized(x, z, params)
        n_zy = sospa_normalized(z, y, params)
        ok = all(0.0 <= v <= 1.0 for v in (n_xy, n_xz, n_zy))
        ok = ok and n_xy <= n_xz + n_zy + TRIANGLE_SLACK
        out.record(ok, f"triple {k}: {n_xy!r} vs {n_xz!r}+{n_zy!r}")
    return out


def cyclic_equivalence_suite(seed: int = 0, pairs: int = 500) -> SuiteResult:
    """One-sided rotation scan against the two-sided brute force."""
    rng = np.random.default_rng(seed)
    out = SuiteResult("cyclic-one-sided-vs-two-sided", 0, 0)
    for k in range(pairs):
        params = _random_params(rng)
        x = _random_closed(rng, 7)
        y = _random_closed(rng, 7)
        got = cyclic_sospa(x, y, params).value
        want = cyclic_sospa_twosided_oracle(x, y, params).value
        out.record(_close(got, want), f"pair {k}: one-sided={got!r} two-sided={want!r}")
    return out


def assignment_oracle_suite(seed: int = 0, matrices: int = 500) -> SuiteResult:
    """Hungarian-backed partial assignment against exhaustive enumeration."""
    rng = np.random.default_rng(seed)
    out = SuiteResult("assignment-oracle", 0, 0)
    for k in range(matrices):
        n = int(rng.integers(1, 7))
        m = int(rng.integers(1, 8))
        matrix = rng.uniform(-2.0, 2.0, size=(n, m))
        _, got = solve_assignment(matrix)
        want = enumerate_partial_matchings_cost(matrix)
        out.record(_close(got, want), f"matrix {k}: solver={got!r} oracle={want!r}")
    return out


def _random_instance_set(rng: np.random.Generator, max_size: int, class_label: str = "") -> InstanceSet:
    size = int(rng.integers(0, max_size + 1))
    instances = [
        Instance(
            confidence=float(rng.uniform(0.0, 1.0)),
            geometry=_random_open(rng, 5, min_len=1),
            class_label=class_label,
        )
        for _ in range(size)
    ]
    return InstanceSet(instances)


def dap_oracle_suite(seed: int = 0, pairs: int = 500) -> SuiteResult:
    """Hungarian reduction against exhaustive assignment enumeration, plus identities."""
    rng = np.random.default_rng(seed)
    out = SuiteResult("dap-oracle", 0, 0)
    for k in range(pairs):
        params = MetricParams(cutoff_c=float(rng.uniform(0.1, 3.0)) + 1e-9, exponent_p=1.0)
        x = _random_instance_set(rng, 5)
        y = _random_instance_set(rng, 5)
        got = dap(x, y, params)
        want = dap_bruteforce_oracle(x, y, params)
        ok = _close(got.value, want.value)
        ok = ok and _close(got.value**params.exponent_p, got.loc_error + got.det_error)
        ok = ok and _close(got.normalized_value, got.normalized_loc + got.normalized_det)
        out.record(ok, f"pair {k}: hungarian={got.value!r} oracle={want.value!r}")
    return out


def dap_axiom_suite(seed: int = 0, triples: int = 500) -> SuiteResult:
    """Metric axioms for p = 1 plus the existence-mass bounds."""
    rng = np.random.default_rng(seed)
    out = SuiteResult("dap-axioms", 0, 0)
    for k in range(triples):
        params = MetricParams(cutoff_c=float(rng.uniform(0.1, 3.0)) + 1e-9, exponent_p=1.0)
        x = _random_instance_set(rng, 5)
        y = _random_instance_set(rng, 5)
        z = _random_instance_set(rng, 5)
        r_xy = dap(x, y, params)
        r_yx = dap(y, x, params)
        r_xz = dap(x, z, params)
        r_zy = dap(z, y, params)
        ok = r_xy.value == r_yx.value and r_xy.normalized_value == r_yx.normalized_value
        ok = ok and dap(x, x, params).value == 0.0
        ok = ok and r_xy.value <= r_xz.value + r_zy.value + TRIANGLE_SLACK
        ok = ok and r_xy.normalized_value <= r_xz.normalized_value + r_zy.normalized_value + TRIANGLE_SLACK
        lo = 0.5 * abs(x.existence_mass - y.existence_mass)
        hi = 0.5 * (x.existence_mass + y.existence_mass)
        ok = ok and lo - 1e-12 <= r_xy.value <= hi + 1e-12
        out.record(ok, f"triple {k}: value={r_xy.value!r} bounds=({lo!r},{hi!r})")
    return out


def order_sensitivity_suite(seed: int = 0, cases: int = 200) -> SuiteResult:
    """Scrambled point-set-equal sequences: sequence metric > 0, unordered reference = 0."""
    rng = np.random.default_rng(seed)
    out = SuiteResult("order-sensitivity", 0, 0)
    for k in range(cases):
        params = MetricParams(cutoff_c=float(rng.uniform(0.5, 2.0)), exponent_p=1.0)
        n = int(rng.integers(3, 8))
        pts = np.column_stack([np.arange(n) * 2.0, np.zeros(n)])
        pts += rng.uniform(-0.3, 0.3, size=pts.shape)
        while True:
            perm = rng.permutation(n)
            if not np.array_equal(perm, np.arange(n)):
                break
        x = Polyline(pts)
        y = Polyline(pts[perm])
        seq = sospa(x, y, params).value
        unordered = gospa_unordered_reference(x.points, y.points, params)
        reference_ok = unordered == 0.0
        # With the identity permutation excluded, no full-length increasing
        # zero-distance matching exists, so the ordered metric must pay.
        out.record(seq > 0.0 and reference_ok, f"case {k}: seq={seq!r} unordered={unordered!r}")
    return out


def cyclic_triangle_probe(seed: int = 0, triples: int = 300) -> list[str]:
    """Search for cyclic triangle-inequality violations; informational only."""
    rng = np.random.default_rng(seed)
    findings = []
    for k in range(triples):
        params = _random_params(rng, p_choices=(1.0,))
        x = _random_closed(rng, 6)
        y = _random_closed(rng, 6)
        z = _random_closed(rng, 6)
        d_xy = cyclic_sospa(x, y, params).value
        d_xz = cyclic_sospa(x, z, params).value
        d_zy = cyclic_sospa(z, y, params).value
        if d_xy > d_xz + d_zy + TRIANGLE_SLACK:
            findings.append(
                f"triple {k}: d(x,y)={d_xy!r} exceeds d(x,z)+d(z,y)={d_xz + d_zy!r} (c={params.cutoff_c!r})"
            )
    return findings


def run_all(seed: int = 0, scale: float = 1.0) -> list[SuiteResult]:
    """Run every suite; ``scale`` shrinks the draw counts for quick runs."""
    n = lambda count: max(2, int(count * scale))
    return [
        sospa_oracle_suite(seed, n(1000)),
        sospa_axiom_suite(seed, n(1000)),
        normalized_triangle_suite(seed, n(1000)),
        cyclic_equivalence_suite(seed, n(500)),
        assignment_oracle_suite(seed, n(500)),
        dap_oracle_suite(seed, n(500)),
        dap_axiom_suite(seed, n(500)),
        order_sensitivity_suite(seed, n(200)),
    ]
