import numpy as np
import pytest

from mapscore import (
    InputError,
    MetricParams,
    Polyline,
    cyclic_shift,
    cyclic_sospa,
    cyclic_sospa_directional_min,
    cyclic_sospa_twosided_oracle,
    reverse,
    sospa,
)


def polygon(pts):
    return Polyline(np.asarray(pts, dtype=float), closed=True)


def random_polygon(rng, max_len=7):
    n = int(rng.integers(3, max_len + 1))
    return Polyline(rng.uniform(-4, 4, (n, 2)), closed=True)


UNIT_SQUARE = [(0, 0), (1, 0), (1, 1), (0, 1)]


class TestCyclicSospa:
    def test_rotated_copy_is_zero(self):
        params = MetricParams(1.0, 1.0)
        x = polygon(UNIT_SQUARE)
        for k in range(1, 4):
            res = cyclic_sospa(x, cyclic_shift(x, k), params)
            assert res.value == 0.0
            assert (res.best_shift_y + k) % 4 == 0

    def test_translated_square(self):
        params = MetricParams(1.5, 1.0)
        x = polygon(UNIT_SQUARE)
        y = polygon(np.asarray(UNIT_SQUARE, dtype=float) + [0.5, 0.0])
        res = cyclic_sospa(x, y, params)
        assert res.value == pytest.approx(2.0, abs=1e-12)
        assert res.best_shift_y == 0

    def test_inner_result_consistent_with_reported_shift(self):
        rng = np.random.default_rng(0)
        params = MetricParams(1.0, 1.0)
        for _ in range(30):
            x, y = random_polygon(rng), random_polygon(rng)
            res = cyclic_sospa(x, y, params)
            aligned = Polyline(cyclic_shift(y, res.best_shift_y).points)
            direct = sospa(Polyline(x.points), aligned, params)
            assert res.value == pytest.approx(direct.value, rel=1e-12, abs=1e-12)

    def test_requires_closed(self):
        open_line = Polyline(np.array([[0.0, 0.0], [1.0, 0.0]]))
        with pytest.raises(InputError):
            cyclic_sospa(open_line, polygon(UNIT_SQUARE), MetricParams())
        with pytest.raises(InputError):
            cyclic_sospa(polygon(UNIT_SQUARE), open_line, MetricParams())


class TestTwoSidedEquivalence:
    def test_matches_oracle_on_random_pairs(self):
        rng = np.random.default_rng(1)
        for _ in range(120):
            c = float(rng.uniform(0.1, 3.0)) + 1e-9
            p = float(rng.choice([1.0, 1.5, 2.0]))
            params = MetricParams(c, p)
            x, y = random_polygon(rng), random_polygon(rng)
            one = cyclic_sospa(x, y, params).value
            two = cyclic_sospa_twosided_oracle(x, y, params).value
            assert one == pytest.approx(two, rel=1e-12, abs=1e-12)

    def test_identity(self):
        x = polygon(UNIT_SQUARE)
        assert cyclic_sospa_twosided_oracle(x, polygon(UNIT_SQUARE), MetricParams()).value == 0.0

    def test_far_single_point(self):
        params = MetricParams(1.0, 1.0)
        x = polygon(UNIT_SQUARE)
        y = polygon([(100.0, 100.0)])
        expected = (params.unmatched_cost * 5) ** 1.0
        assert cyclic_sospa_twosided_oracle(x, y, params).value == pytest.approx(expected, rel=1e-12)

    def test_size_guard(self):
        big = Polyline(np.random.default_rng(0).uniform(0, 1, (9, 2)), closed=True)
        with pytest.raises(InputError):
            cyclic_sospa_twosided_oracle(big, big, MetricParams())


class TestStartIndexInvariance:
    def test_random_rotations(self):
        rng = np.random.default_rng(2)
        params = MetricParams(1.0, 1.0)
        for _ in range(25):
            x, y = random_polygon(rng), random_polygon(rng)
            base = cyclic_sospa(x, y, params).value
            a = int(rng.integers(0, len(x)))
            b = int(rng.integers(0, len(y)))
            rotated = cyclic_sospa(cyclic_shift(x, a), cyclic_shift(y, b), params).value
            assert rotated == pytest.approx(base, rel=1e-12, abs=1e-12)


class TestDirectionalMin:
    def test_reversed_rotation_is_zero(self):
        params = MetricParams(1.0, 1.0)
        x = polygon(UNIT_SQUARE)
        y = reverse(cyclic_shift(x, 2))
        res = cyclic_sospa_directional_min(x, y, params)
        assert res.value == 0.0
        assert res.used_reversal

    def test_forward_wins_ties(self):
        params = MetricParams(1.0, 1.0)
        x = polygon(UNIT_SQUARE)
        res = cyclic_sospa_directional_min(x, polygon(UNIT_SQUARE), params)
        assert res.value == 0.0
        assert not res.used_reversal

    def test_mirrored_traversal_recovered(self):
        params = MetricParams(1.0, 1.0)
        hexagon = polygon([(np.cos(a), np.sin(a)) for a in np.linspace(0, 2 * np.pi, 7)[:-1]])
        res = cyclic_sospa_directional_min(hexagon, reverse(hexagon), params)
        assert res.value == 0.0
