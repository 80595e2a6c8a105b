import math

import numpy as np
import pytest

from mapscore import InputError, MetricParams, Polyline, gospa_unordered_reference, solve_assignment, sospa
from mapscore.assignment import enumerate_partial_matchings_cost


class TestSolveAssignment:
    def test_all_positive_matrix_matches_nothing(self):
        pairs, total = solve_assignment([[1.0, 2.0], [3.0, 4.0]])
        assert pairs == []
        assert total == 0.0

    def test_diagonal_dominance(self):
        pairs, total = solve_assignment([[-1.0, 0.0], [0.0, -2.0]])
        assert pairs == [(0, 0), (1, 1)]
        assert total == -3.0

    def test_zero_cost_pairs_kept_on_request(self):
        pairs, total = solve_assignment([[0.0]], include_zero_cost=True)
        assert pairs == [(0, 0)]
        assert total == 0.0
        pairs, _ = solve_assignment([[0.0]])
        assert pairs == []

    def test_rejects_non_finite(self):
        with pytest.raises(InputError):
            solve_assignment([[math.inf, 0.0]])

    def test_empty_matrix(self):
        assert solve_assignment(np.empty((0, 3))) == ([], 0.0)

    def test_matches_enumeration_on_random_matrices(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            n = int(rng.integers(1, 7))
            m = int(rng.integers(1, 8))
            matrix = rng.uniform(-2, 2, (n, m))
            _, got = solve_assignment(matrix)
            want = enumerate_partial_matchings_cost(matrix)
            assert got == pytest.approx(want, rel=1e-12, abs=1e-12)

    def test_never_worse_than_any_sampled_matching(self):
        rng = np.random.default_rng(1)
        matrix = rng.uniform(-1, 1, (6, 7))
        _, total = solve_assignment(matrix)
        for _ in range(200):
            k = int(rng.integers(0, 7))
            rows = rng.permutation(6)[:k]
            cols = rng.permutation(7)[:k]
            candidate = sum(matrix[i, j] for i, j in zip(rows, cols))
            assert total <= candidate + 1e-12


class TestGospaReference:
    def test_scrambled_point_set_is_zero(self):
        params = MetricParams(1.0, 1.0)
        pts = np.array([[0.0, 0.0], [2.0, 0.0], [4.0, 0.0]])
        assert gospa_unordered_reference(pts, pts[::-1], params) == 0.0

    def test_disjoint_far_sets(self):
        params = MetricParams(1.0, 2.0)
        x = np.array([[0.0, 0.0], [1.0, 0.0]])
        y = np.array([[50.0, 0.0], [51.0, 0.0], [52.0, 0.0]])
        expected = (params.unmatched_cost * 5) ** 0.5
        assert gospa_unordered_reference(x, y, params) == pytest.approx(expected, rel=1e-12)

    def test_empty_side(self):
        params = MetricParams(2.0, 1.0)
        expected = params.unmatched_cost  # one unmatched point
        assert gospa_unordered_reference(np.empty((0, 2)), np.array([[0.0, 0.0]]), params) == expected

    def test_sequence_metric_dominates_unordered(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            params = MetricParams(float(rng.uniform(0.2, 2.5)), float(rng.choice([1.0, 2.0])))
            x = Polyline(rng.uniform(-3, 3, (int(rng.integers(0, 7)), 2)))
            y = Polyline(rng.uniform(-3, 3, (int(rng.integers(0, 7)), 2)))
            ordered = sospa(x, y, params).value
            unordered = gospa_unordered_reference(x.points, y.points, params)
            assert ordered >= unordered - 1e-12

    def test_size_guard(self):
        params = MetricParams()
        with pytest.raises(InputError):
            gospa_unordered_reference(np.zeros((101, 2)), np.zeros((1, 2)), params)
