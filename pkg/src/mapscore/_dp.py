"""Dynamic-programming table kernels for the sequence metrics.

Both kernels fill their tables with plain sequential float arithmetic so
that backtracking can rely on exact equality against the recurrence. The
numba-compiled versions carry the hot loops; the Python fallbacks keep the
package importable without a working JIT at the cost of speed.
"""
from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False


def _edit_table_py(costs: np.ndarray, gap: float) -> np.ndarray:
    n, m = costs.shape
    table = np.empty((n + 1, m + 1))
    table[0, 0] = 0.0
    for j in range(1, m + 1):
        table[0, j] = table[0, j - 1] + gap
    for i in range(1, n + 1):
        table[i, 0] = table[i - 1, 0] + gap
        row = table[i]
        above = table[i - 1]
        cost_row = costs[i - 1]
        for j in range(1, m + 1):
            best = above[j - 1] + cost_row[j - 1]
            alt = above[j] + gap
            if alt < best:
                best = alt
            alt = row[j - 1] + gap
            if alt < best:
                best = alt
            row[j] = best
    return table


def _edit_backtrack_py(table: np.ndarray, costs: np.ndarray, gap: float) -> np.ndarray:
    # Ties prefer a match over skipping a row point over skipping a column
    # point. The equality tests are exact: the fill used the same additions.
    n, m = costs.shape
    out = np.empty((min(n, m), 2), dtype=np.int64)
    count = 0
    i, j = n, m
    while i > 0 or j > 0:
        here = table[i, j]
        if i > 0 and j > 0 and here == table[i - 1, j - 1] + costs[i - 1, j - 1]:
            count += 1
            out[count - 1, 0] = i - 1
            out[count - 1, 1] = j - 1
            i -= 1
            j -= 1
        elif i > 0 and here == table[i - 1, j] + gap:
            i -= 1
        else:
            j -= 1
    return out[:count][::-1].copy()


def _frechet_table_py(dists: np.ndarray) -> np.ndarray:
    n, m = dists.shape
    table = np.empty((n, m))
    table[0, 0] = dists[0, 0]
    for j in range(1, m):
        table[0, j] = max(table[0, j - 1], dists[0, j])
    for i in range(1, n):
        table[i, 0] = max(table[i - 1, 0], dists[i, 0])
        for j in range(1, m):
            reach = table[i - 1, j]
            if table[i, j - 1] < reach:
                reach = table[i, j - 1]
            if table[i - 1, j - 1] < reach:
                reach = table[i - 1, j - 1]
            table[i, j] = reach if reach > dists[i, j] else dists[i, j]
    return table


if HAVE_NUMBA:
    edit_table = njit(cache=True)(_edit_table_py)
    edit_backtrack = njit(cache=True)(_edit_backtrack_py)
    frechet_table = njit(cache=True)(_frechet_table_py)
else:  # pragma: no cover
    edit_table = _edit_table_py
    edit_backtrack = _edit_backtrack_py
    frechet_table = _frechet_table_py


def warmup() -> None:
    """Trigger JIT compilation so timed sections do not pay for it."""
    probe = np.zeros((2, 2))
    edit_backtrack(edit_table(probe, 1.0), probe, 1.0)
    frechet_table(probe)
