import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.polynomial import polynomial as P

from escrk.catalog import taylor_method
from escrk.rk_core import (
    DegenerateCoefficientError,
    NotStronglyStableError,
    RKCoefficients,
    amplification,
    energy_coefficients,
    energy_profile,
    leading_index,
    solution_order,
    stage_ratios,
    strong_stability_bound,
)

RK4 = [1.0, 1.0, 0.5, 1 / 6, 1 / 24]

coeff = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False, allow_infinity=False)
tails = st.lists(coeff, min_size=1, max_size=8).filter(lambda t: abs(t[-1]) > 1e-3)


def modulus_squared_minus_one(a):
    """Coefficients (in ``y``) of ``|G(iy)|^2 - 1`` via complex polynomial products."""
    g = np.array([ak * 1j**k for k, ak in enumerate(a)])
    prod = P.polymul(g, np.conj(g)).real
    prod[0] -= 1.0
    return prod


class TestRKCoefficients:
    def test_basic_access(self):
        a = RKCoefficients(tuple(RK4))
        assert a.s == 4
        assert len(a) == 5
        assert a[2] == 0.5
        np.testing.assert_array_equal(a.as_array(), RK4)

    @pytest.mark.parametrize("bad", [[1.0], [2.0, 1.0], [1.0, 1.0, 0.0], [1.0, math.nan]])
    def test_rejects_invalid(self, bad):
        with pytest.raises(ValueError):
            RKCoefficients(tuple(bad))


class TestEnergyCoefficients:
    def test_rk4_values(self):
        b = energy_coefficients(RK4)
        np.testing.assert_allclose(b, [0, 0, -1 / 72, 1 / 576], atol=1e-16)

    def test_forward_euler(self):
        b = energy_coefficients([1.0, 1.0])
        np.testing.assert_allclose(b, [1.0])

    @settings(max_examples=200, deadline=None)
    @given(tails)
    def test_parseval_identity(self, tail):
        a = [1.0] + tail
        b = energy_coefficients(a)
        ref = modulus_squared_minus_one(a)
        # odd powers of y vanish, even powers carry b_k
        np.testing.assert_allclose(ref[1::2], 0.0, atol=1e-12)
        np.testing.assert_allclose(ref[2::2], b, rtol=1e-12, atol=1e-12)

    @settings(max_examples=100, deadline=None)
    @given(tails)
    def test_top_coefficient_is_square(self, tail):
        a = [1.0] + tail
        assert energy_coefficients(a)[-1] == pytest.approx(a[-1] ** 2, rel=1e-15)

    @settings(max_examples=50, deadline=None)
    @given(tails, st.floats(min_value=-3, max_value=3))
    def test_modulus_on_imaginary_axis(self, tail, y):
        a = [1.0] + tail
        b = energy_coefficients(a)
        lhs = abs(amplification(a, 1j * y)) ** 2
        rhs = 1.0 + sum(bk * y ** (2 * k) for k, bk in enumerate(b, 1))
        assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-10)


class TestLeadingIndexAndOrders:
    def test_leading_index_rk4(self):
        assert leading_index(energy_coefficients(RK4)) == (3, 5)

    def test_leading_index_errors(self):
        with pytest.raises(ValueError):
            leading_index([])
        with pytest.raises(ValueError):
            leading_index([0.0, 0.0])

    @pytest.mark.parametrize("s", range(1, 9))
    def test_taylor_energy_order(self, s):
        prof = energy_profile(taylor_method(s))
        assert prof.p == s
        assert prof.r == 2 * (s // 2) + 1

    def test_solution_order(self):
        assert solution_order(RK4) == 4
        assert solution_order([1.0, 1.0, 0.5, 1 / 8]) == 2
        assert solution_order([1.0, 0.5]) == 0


class TestStageRatios:
    @settings(max_examples=100, deadline=None)
    @given(st.lists(coeff.filter(lambda v: abs(v) > 1e-3), min_size=1, max_size=8))
    def test_reexpansion(self, tail):
        a = np.array([1.0] + tail)
        c = stage_ratios(a)
        # a_k = prod_{j > s-k} c_j
        s = len(a) - 1
        rebuilt = [1.0] + [float(np.prod(c[s - k:])) for k in range(1, s + 1)]
        np.testing.assert_allclose(rebuilt, a, rtol=1e-12)

    def test_rk4(self):
        np.testing.assert_allclose(stage_ratios(RK4), [1 / 4, 1 / 3, 1 / 2, 1])

    def test_degenerate(self):
        with pytest.raises(DegenerateCoefficientError, match="degenerate"):
            stage_ratios([1.0, 0.0, 0.5])


class TestStrongStability:
    def test_rk4_bound(self):
        lam, b = strong_stability_bound(RK4)
        assert lam == pytest.approx(2 * math.sqrt(2), rel=1e-14)
        assert b == pytest.approx(-1 / 72, rel=1e-14)

    @pytest.mark.parametrize("a", [[1.0, 1.0], [1.0, 1.0, 0.5], [1.0, 1.0, 0.5, 1 / 8]])
    def test_rejects(self, a):
        with pytest.raises(NotStronglyStableError):
            strong_stability_bound(a)

    def test_energy_decreases_up_to_bound(self):
        lam, _ = strong_stability_bound(RK4)
        y = np.linspace(0, lam, 200)
        assert np.all(np.abs(amplification(RK4, 1j * y)) <= 1 + 1e-15)
        assert abs(amplification(RK4, 1j * lam * 1.01)) > 1

    def test_profile(self):
        prof = energy_profile(RK4)
        assert prof.strongly_stable
        assert prof.b_leading == pytest.approx(-1 / 72)
        assert not energy_profile([1.0, 1.0, 0.5]).strongly_stable


class TestAmplification:
    def test_scalar_and_array(self):
        z = np.array([0.0, -1.0, 1j])
        expected = [1.0, 1 - 1 + 0.5 - 1 / 6 + 1 / 24, np.polyval(RK4[::-1], 1j)]
        np.testing.assert_allclose(amplification(RK4, z), expected)
        assert amplification(RK4, 0.5) == pytest.approx(np.polyval(RK4[::-1], 0.5))
