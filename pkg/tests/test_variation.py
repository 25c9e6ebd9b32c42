import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from roughsig.errors import InvalidParameter, InvalidPower, PathTooShort
from roughsig.variation import IncrementScheme, Path, increments, power_variation, power_variation_curve

from conftest import brownian, naive_variation

finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)
paths = arrays(np.float64, st.integers(5, 60), elements=finite).map(Path)
powers = st.floats(0.05, 12.0)


def dyadic_paths():
    # integer multiples of 2**-10 keep differences and shifts exact
    ints = arrays(np.int64, st.integers(5, 60), elements=st.integers(-2**20, 2**20))
    return ints.map(lambda a: a * 2.0**-10)


class TestIncrements:
    def test_overlapping_lag_one(self):
        assert increments(Path([0, 1, 3])).tolist() == [1, 2]

    def test_overlapping_lag_two(self):
        assert increments(Path([0, 1, 3]), IncrementScheme(2)).tolist() == [3]

    def test_decimated_skips_unused_point(self):
        scheme = IncrementScheme(2, subsampling="decimated")
        assert increments(Path([0, 1, 3, 6]), scheme).tolist() == [3]

    def test_decimated_phase_one(self):
        scheme = IncrementScheme(2, subsampling="decimated", phase=1)
        assert increments(Path([0, 1, 3, 6]), scheme).tolist() == [5]

    def test_second_order(self):
        assert increments(Path([0, 1, 3, 6]), IncrementScheme(1, 2)).tolist() == [1, 1]
        assert increments(Path([0, 1, 3, 6, 10]), IncrementScheme(2, 2)).tolist() == [4]

    @given(n=st.integers(3, 80), nu=st.integers(2, 7), phase=st.integers(0, 6))
    def test_decimated_count(self, n, nu, phase):
        if phase >= nu:
            return
        path = Path(np.arange(n, dtype=float) ** 2)
        scheme = IncrementScheme(nu, subsampling="decimated", phase=phase)
        kept = len(range(phase, n, nu))
        if kept < 2:
            with pytest.raises(PathTooShort):
                increments(path, scheme)
        else:
            assert increments(path, scheme).size == kept - 1
            if phase == 0:
                assert kept - 1 == (n - 1) // nu

    def test_too_short(self):
        with pytest.raises(PathTooShort):
            increments(Path([0, 1, 2]), IncrementScheme(3))
        with pytest.raises(PathTooShort):
            increments(Path([0, 1, 2, 3]), IncrementScheme(2, 2))

    def test_scheme_validation(self):
        with pytest.raises(InvalidParameter):
            IncrementScheme(0)
        with pytest.raises(InvalidParameter):
            IncrementScheme(1, 3)
        with pytest.raises(InvalidParameter):
            IncrementScheme(1, subsampling="decimated")

    def test_path_validation(self):
        with pytest.raises(PathTooShort):
            Path([0.0, 1.0])
        with pytest.raises(InvalidParameter):
            Path([0.0, np.nan, 1.0])
        with pytest.raises(InvalidParameter):
            Path([0.0, 1.0, 2.0], delta=0.0)
        assert Path(np.zeros(11), 0.1).horizon == pytest.approx(1.0)


class TestPowerVariation:
    def test_direct_evaluation(self):
        assert power_variation(Path([0, 1, 3]), 2) == 5.0

    @given(n=st.integers(3, 50), level=finite, p=powers)
    def test_constant_path_is_zero(self, n, level, p):
        assert power_variation(Path(np.full(n, level)), p) == 0.0

    def test_curve_direct(self):
        assert power_variation_curve(Path([0, 1, 3]), [1, 2]).tolist() == [3.0, 5.0]

    @given(path=paths, p=powers)
    def test_singleton_curve(self, path, p):
        assert power_variation_curve(path, [p]).tolist() == [power_variation(path, p)]

    def test_curve_matches_pointwise(self):
        path = brownian(500, 1)
        grid = np.linspace(0.1, 10, 100)
        for nu in (1, 2, 3):
            scheme = IncrementScheme(nu)
            curve = power_variation_curve(path, grid, scheme)
            assert curve.tolist() == [power_variation(path, p, scheme) for p in grid]

    def test_invalid_power(self):
        path = Path([0, 1, 3])
        for p in (0.0, -1.0, math.nan, math.inf):
            with pytest.raises(InvalidPower):
                power_variation(path, p)
        with pytest.raises(InvalidPower):
            power_variation_curve(path, [2.0, 1.0])

    def test_brownian_quadratic_variation(self):
        path = brownian(1001, 5)
        v = power_variation(path, 2)
        assert v == naive_variation(path.values, 2.0)
        # QV of Brownian motion on [0, T] is T with variance 2 T^2 / n
        sd = math.sqrt(2 * path.horizon**2 / 1000)
        assert abs(v - path.horizon) < 4 * sd

    def test_matches_reference_loop(self, rng):
        grid = rng.uniform(0.1, 10, size=10)
        for _ in range(100):
            n = int(rng.integers(3, 400))
            values = np.cumsum(rng.standard_normal(n)) * rng.uniform(0.01, 100)
            path = Path(values)
            for nu in (1, 2):
                if n < nu + 1:
                    continue
                got = power_variation_curve(path, np.sort(grid), IncrementScheme(nu))
                want = [naive_variation(values, p, nu) for p in np.sort(grid)]
                assert got.tolist() == want


class TestInvariants:
    @given(path=paths, p=powers)
    def test_even_odd_decomposition(self, path, p):
        whole = power_variation(path, p, IncrementScheme(2))
        even = power_variation(path, p, IncrementScheme(2, subsampling="decimated", phase=0))
        odd = power_variation(path, p, IncrementScheme(2, subsampling="decimated", phase=1))
        assert whole == even + odd

    @given(path=paths, p=powers, c=st.floats(1e-3, 1e3).flatmap(lambda x: st.sampled_from([x, -x])))
    def test_scale_equivariance(self, path, p, c):
        v = power_variation(path, p)
        scaled = power_variation(path.with_values(c * path.values), p)
        assert scaled == pytest.approx(abs(c) ** p * v, rel=1e-12, abs=0)

    @given(values=dyadic_paths(), shift=st.integers(-2**20, 2**20), p=powers, nu=st.integers(1, 3))
    def test_translation_invariance(self, values, shift, p, nu):
        scheme = IncrementScheme(nu)
        a = power_variation(Path(values), p, scheme)
        b = power_variation(Path(values + shift * 2.0**-10), p, scheme)
        assert a == b

    @given(path=paths, p=powers, nu=st.integers(1, 4), order=st.sampled_from([1, 2]))
    def test_time_reversal(self, path, p, nu, order):
        if path.n < order * nu + 1:
            return
        scheme = IncrementScheme(nu, order)
        assert power_variation(path, p, scheme) == power_variation(path.with_values(path.values[::-1]), p, scheme)
