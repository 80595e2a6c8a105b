"""Sequence metric over cyclic sequences (polygons).

A polygon is compared as the equivalence class of its rotations. Rotating
only one of the two sequences is sufficient to reach the global optimum, so
the solver scans the rotations of the second argument and runs the open
solver on each alignment; a full two-sided scan is kept as the validating
oracle. The cyclic variant is not claimed to satisfy the triangle
inequality. Callers wanting speed should pass the shorter polygon second:
the scan costs O(|x| * |y|**2).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._dp import edit_table
from .errors import InputError
from .geometry import MetricParams, Polyline, reverse
from .sospa import ORACLE_MAX_LEN, SospaResult, _assemble, _backtrack, _power_costs


@dataclass
class CyclicSospaResult:
    """Best value over rotations, the winning rotation of y, and the aligned open result."""

    value: float
    best_shift_y: int
    inner: SospaResult
    used_reversal: bool = False


def _require_closed(line: Polyline, name: str) -> None:
    if not line.closed:
        raise InputError(f"{name} must be a closed polyline")


def cyclic_sospa(x: Polyline, y: Polyline, params: MetricParams) -> CyclicSospaResult:
    """Metric between two polygons, minimized over rotations of ``y``.

    Each rotation is scored by the open-sequence solver on the aligned pair;
    ties resolve to the lowest rotation index.
    """
    _require_closed(x, "x")
    _require_closed(y, "y")
    costs = _power_costs(x.points, y.points, params)
    gap = params.unmatched_cost
    n, m = len(x), len(y)
    best: CyclicSospaResult | None = None
    for s in range(max(1, m)):
        shifted = np.ascontiguousarray(np.roll(costs, -s, axis=1))
        table = edit_table(shifted, gap)
        if best is not None and table[n, m] >= best.inner.raw_power_cost:
            continue
        pairs = _backtrack(table, shifted, gap)
        result = _assemble(pairs, shifted, n, m, params)
        if best is None or result.raw_power_cost < best.inner.raw_power_cost:
            best = CyclicSospaResult(value=result.value, best_shift_y=s, inner=result)
    assert best is not None
    return best


def cyclic_sospa_twosided_oracle(x: Polyline, y: Polyline, params: MetricParams) -> CyclicSospaResult:
    """Minimum over every rotation pair of both polygons; validation only."""
    _require_closed(x, "x")
    _require_closed(y, "y")
    n, m = len(x), len(y)
    if n > ORACLE_MAX_LEN or m > ORACLE_MAX_LEN:
        raise InputError(f"oracle refuses polygons longer than {ORACLE_MAX_LEN}")
    costs = _power_costs(x.points, y.points, params)
    gap = params.unmatched_cost
    best: CyclicSospaResult | None = None
    for sx in range(max(1, n)):
        rolled = np.roll(costs, -sx, axis=0)
        for sy in range(max(1, m)):
            shifted = np.ascontiguousarray(np.roll(rolled, -sy, axis=1))
            table = edit_table(shifted, gap)
            if best is not None and table[n, m] >= best.inner.raw_power_cost:
                continue
            pairs = _backtrack(table, shifted, gap)
            result = _assemble(pairs, shifted, n, m, params)
            if best is None or result.raw_power_cost < best.inner.raw_power_cost:
                best = CyclicSospaResult(value=result.value, best_shift_y=sy, inner=result)
    assert best is not None
    return best


def cyclic_sospa_directional_min(x: Polyline, y: Polyline, params: MetricParams) -> CyclicSospaResult:
    """Minimum of the cyclic metric over the two relative traversal directions.

    When ``used_reversal`` is set, ``best_shift_y`` and the inner assignment
    refer to the reversed traversal of ``y``.
    """
    _require_closed(x, "x")
    _require_closed(y, "y")
    forward = cyclic_sospa(x, y, params)
    if forward.inner.raw_power_cost == 0.0:
        return forward
    backward = cyclic_sospa(x, reverse(y), params)
    if backward.value < forward.value:
        backward.used_reversal = True
        return backward
    return forward
