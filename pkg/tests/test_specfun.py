import math

import numpy as np
import pytest
import scipy.special as sps
from hypothesis import given, strategies as st

from ouflow import digamma, laguerre, laguerre_deriv, multiplier_eval, pochhammer
from ouflow.errors import PoleError

EULER_GAMMA = 0.5772156649015329


class TestLaguerre:
    def test_small_orders(self):
        assert laguerre(0, 1.0) == 1.0
        assert laguerre(1, 2.0) == pytest.approx(-1.0, abs=1e-14)
        # L_2(t) = 1 - 2t + t^2/2  (recurrence oracle)
        assert laguerre(2, 2.0) == pytest.approx(-1.0, abs=1e-14)

    def test_value_at_zero_is_one(self):
        for n in range(0, 30, 3):
            assert laguerre(n, 0.0) == pytest.approx(1.0, abs=1e-12)

    def test_against_scipy(self):
        t = np.linspace(-3.0, 25.0, 41)
        for n in (1, 2, 5, 17, 50):
            ref = sps.eval_laguerre(n, t)
            np.testing.assert_allclose(laguerre(n, t), ref, rtol=1e-10, atol=1e-10)

    def test_negative_order_rejected(self):
        with pytest.raises(ValueError):
            laguerre(-1, 0.0)


class TestLaguerreDeriv:
    def test_small_orders(self):
        assert laguerre_deriv(0, 5.0) == 0.0
        assert laguerre_deriv(1, 0.3) == pytest.approx(-1.0, abs=1e-14)
        # L'_2(t) = -2 + t
        assert laguerre_deriv(2, 3.0) == pytest.approx(1.0, abs=1e-14)

    def test_finite_difference(self):
        # invariant: derivative matches the centered difference of laguerre
        h = 1e-5
        for n in (1, 3, 8, 20):
            for t in (0.1, 1.7, 6.0):
                fd = (laguerre(n, t + h) - laguerre(n, t - h)) / (2 * h)
                assert laguerre_deriv(n, t) == pytest.approx(fd, abs=1e-6)

    def test_negative_order_rejected(self):
        with pytest.raises(ValueError):
            laguerre_deriv(-2, 1.0)


class TestDigamma:
    def test_reference_points(self):
        assert digamma(1.0) == pytest.approx(-EULER_GAMMA, abs=1e-10)
        assert digamma(2.0) == pytest.approx(1.0 - EULER_GAMMA, abs=1e-10)
        # psi(1/2) = -gamma - 2 ln 2 (duplication-formula oracle)
        assert digamma(0.5) == pytest.approx(-EULER_GAMMA - 2 * math.log(2), abs=1e-10)

    def test_against_scipy(self):
        xs = np.concatenate([
            np.linspace(0.01, 12.0, 57),
            np.linspace(-8.7, -0.05, 33),
            [401.0, -0.9999, 1e-6],
        ])
        for x in xs:
            if x <= 0 and x == math.floor(x):
                continue
            assert digamma(x) == pytest.approx(float(sps.digamma(x)), rel=1e-11, abs=1e-11)

    def test_reflection_identity(self):
        # psi(1+u) - psi(1-u) = 1/u - pi*cot(pi*u)
        for u in (0.1, 0.37, 0.5, 0.83, 0.99):
            lhs = digamma(1 + u) - digamma(1 - u)
            rhs = 1.0 / u - math.pi / math.tan(math.pi * u)
            assert lhs == pytest.approx(rhs, abs=1e-9)

    def test_poles(self):
        for x in (0.0, -1.0, -7.0):
            with pytest.raises(PoleError):
                digamma(x)


class TestPochhammer:
    def test_values(self):
        assert pochhammer(3.7, 0) == 1.0
        assert pochhammer(1.0, 4) == 24.0
        assert pochhammer(-0.5, 2) == pytest.approx(-0.25, abs=1e-15)

    @given(st.floats(-5, 5, allow_nan=False), st.integers(0, 20))
    def test_recurrence_property(self, a, k):
        assert pochhammer(a, k + 1) == pytest.approx(
            pochhammer(a, k) * (a + k), rel=1e-12, abs=1e-12
        )


class TestMultiplier:
    def test_fixed_values(self):
        for u in (-2.0, 0.0, 0.3, 1.7):
            assert multiplier_eval(u, 0.0) == pytest.approx(1.0, abs=1e-15)
        assert multiplier_eval(1.0, 0.5) == pytest.approx(-1j, abs=1e-15)

    def test_unit_modulus(self):
        u = np.linspace(-3, 3, 13)
        lam = np.linspace(-40, 40, 101)
        for ui in u:
            assert np.max(np.abs(np.abs(multiplier_eval(ui, lam)) - 1.0)) < 1e-12

    @given(
        st.floats(-4, 4, allow_nan=False),
        st.floats(-4, 4, allow_nan=False),
        st.floats(-30, 30, allow_nan=False),
    )
    def test_group_property(self, u, v, lam):
        lhs = multiplier_eval(u, lam) * multiplier_eval(v, lam)
        assert abs(lhs - multiplier_eval(u + v, lam)) < 1e-12

    def test_integer_parameter_is_rational_power(self):
        lam = np.linspace(-10, 10, 201)
        base = (1 - 2j * lam) / (1 + 2j * lam)
        for n in (-2, -1, 1, 2, 3):
            assert np.max(np.abs(multiplier_eval(n, lam) - base**n)) < 1e-12


def test_multiplier_symbol_object():
    from ouflow import Multiplier

    m = Multiplier(0.7)
    lam = np.linspace(-5, 5, 11)
    np.testing.assert_array_equal(m(lam), multiplier_eval(0.7, lam))
