import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ouflow import (
    OuPath,
    TimeGrid,
    WienerPath,
    brownian_scale,
    ou_sobolev_norm,
    ou_sobolev_norm_spectral,
    ou_sup_norm,
    to_ou,
    to_wiener,
    translate,
    wiener_dirichlet_norm,
    wiener_sup_norm,
)
from ouflow.errors import WindowError


def geometric_wiener(fn, t0=-2.0, t1=2.0, dt=0.01):
    t = np.arange(t0, t1 + dt / 2, dt)
    xs = np.exp(t)
    return WienerPath(xs, fn(xs))


class TestGridsAndContainers:
    def test_grid_validation(self):
        with pytest.raises(ValueError):
            TimeGrid(0.0, -0.1, 10)
        with pytest.raises(ValueError):
            TimeGrid(0.0, 0.1, 1)

    def test_times(self):
        g = TimeGrid(-1.0, 0.5, 5)
        np.testing.assert_allclose(g.times(), [-1.0, -0.5, 0.0, 0.5, 1.0])
        assert g.index_of(0.5) == 3
        with pytest.raises(WindowError):
            g.index_of(0.26)

    def test_paths_immutable_and_finite(self):
        g = TimeGrid(0.0, 0.1, 4)
        p = OuPath(g, [1.0, 2.0, 3.0, 4.0])
        with pytest.raises(ValueError):
            p.values[0] = 9.0
        with pytest.raises(ValueError):
            OuPath(g, [1.0, np.inf, 0.0, 0.0])
        with pytest.raises(ValueError):
            WienerPath([0.0, 1.0], [0.0, 1.0])  # xs must start positive
        with pytest.raises(ValueError):
            WienerPath([2.0, 1.0], [0.0, 1.0])  # strictly increasing


class TestCoordinateMaps:
    def test_forward_examples(self):
        # g(x) = x  ->  omega(t) = exp(t/2)
        theta = geometric_wiener(lambda x: x, -1.0, 1.0, 0.005)
        grid = TimeGrid(-1.0, 0.005, 401)
        w = to_ou(theta, grid)
        np.testing.assert_allclose(w.values, np.exp(grid.times() / 2), rtol=1e-13)
        # g(x) = sqrt(x)  ->  omega = 1
        theta = geometric_wiener(np.sqrt, -1.0, 1.0, 0.005)
        w = to_ou(theta, grid)
        np.testing.assert_allclose(w.values, 1.0, rtol=1e-13)

    def test_inverse_examples(self):
        grid = TimeGrid(-1.0, 0.01, 201)
        w = OuPath(grid, np.ones(201))
        theta = to_wiener(w)
        np.testing.assert_allclose(theta.values, np.sqrt(theta.xs), rtol=1e-14)
        w = OuPath(grid, np.exp(grid.times() / 2))
        theta = to_wiener(w)
        np.testing.assert_allclose(theta.values, theta.xs, rtol=1e-13)

    def test_roundtrips_exact_at_nodes(self):
        grid = TimeGrid(-2.0, 0.02, 201)
        rng = np.random.default_rng(7)
        w = OuPath(grid, rng.standard_normal(201))
        back = to_ou(to_wiener(w), grid)
        # identity up to pure roundoff (shared nodes, no discretization error)
        np.testing.assert_allclose(back.values, w.values, rtol=5e-14, atol=1e-15)

        theta = geometric_wiener(lambda x: np.sin(x) * np.sqrt(x))
        back2 = to_wiener(to_ou(theta, TimeGrid(-2.0, 0.01, 401)))
        # node times reconstructed independently: allow a few ulp of slack
        np.testing.assert_allclose(back2.values, theta.values, rtol=1e-11, atol=1e-13)

    def test_out_of_range_rejected(self):
        theta = geometric_wiener(lambda x: x, -1.0, 1.0)
        with pytest.raises(WindowError):
            to_ou(theta, TimeGrid(-3.0, 0.1, 21))
        with pytest.raises(ValueError):
            to_wiener(OuPath(TimeGrid(0, 0.1, 3), [0.0, 0.0, 0.0]), xs=[-1.0, 1.0])


class TestScalingAndTranslation:
    def test_scale_examples(self):
        theta = geometric_wiener(lambda x: x)
        s = brownian_scale(theta, 4.0)
        # theta(t) = t scales to 2t: value at node xs/4 equals (xs)/sqrt(4) = 2*(xs/4)
        np.testing.assert_allclose(s.values, 2.0 * s.xs, rtol=1e-14)
        s1 = brownian_scale(theta, 1.0)
        np.testing.assert_allclose(s1.values, theta.values, rtol=0, atol=0)
        with pytest.raises(ValueError):
            brownian_scale(theta, 0.0)

    def test_scale_conjugates_to_translation(self):
        # to_ou(scale(theta, a)) == translate(to_ou(theta), log a) at shared nodes
        theta = geometric_wiener(lambda x: np.sqrt(x) * np.cos(np.log(x)), -3.0, 3.0)
        for alpha in (0.5, 2.0, 4.0):
            la = math.log(alpha)
            grid = TimeGrid(-1.0, 0.01, 201)
            lhs = to_ou(brownian_scale(theta, alpha), grid)
            shifted = TimeGrid(grid.t_start + la, grid.dt, grid.n)
            rhs = translate(to_ou(theta, shifted), la)
            np.testing.assert_allclose(rhs.grid.times(), grid.times(), rtol=0, atol=1e-12)
            np.testing.assert_allclose(lhs.values, rhs.values, rtol=5e-14, atol=1e-15)

    def test_translate_group_law(self):
        g = TimeGrid(0.0, 0.25, 9)
        w = OuPath(g, np.arange(9.0))
        t0 = translate(w, 0.0)
        assert t0.grid == g
        ab = translate(translate(w, 0.75), -0.25)
        once = translate(w, 0.5)
        assert ab.grid.t_start == pytest.approx(once.grid.t_start, abs=1e-15)
        np.testing.assert_array_equal(ab.values, once.values)

    def test_translate_example(self):
        g = TimeGrid(-1.0, 0.1, 21)
        w = OuPath(g, np.exp(g.times() / 2))
        out = translate(w, 2.0)
        # output(t) = omega(2+t) = e * e^{t/2}
        np.testing.assert_allclose(
            out.values, math.e * np.exp(out.grid.times() / 2), rtol=1e-12
        )


class TestNorms:
    def test_sobolev_zero_and_gaussian(self):
        g = TimeGrid(-10.0, 1e-3, 20001)
        assert ou_sobolev_norm(OuPath(g, np.zeros(g.n))) == 0.0
        h = OuPath(g, np.exp(-g.times() ** 2 / 2))
        # integral of h^2/4 + hdot^2 = (3/4) sqrt(pi) for the unit gaussian
        assert ou_sobolev_norm(h) == pytest.approx(math.sqrt(0.75 * math.sqrt(math.pi)), abs=1e-4)

    def test_sobolev_spectral_matches_time_domain(self):
        g = TimeGrid(-10.0, 5e-4, 40001)
        t = g.times()
        h = OuPath(g, np.exp(-(t ** 2)) * np.cos(t))
        td = ou_sobolev_norm(h)
        sd = ou_sobolev_norm_spectral(h)
        assert abs(td - sd) < 1e-6

    def test_sobolev_needs_three_nodes(self):
        with pytest.raises(ValueError):
            ou_sobolev_norm(OuPath(TimeGrid(0, 1.0, 2), [0.0, 0.0]))

    def test_translate_preserves_sobolev(self):
        g = TimeGrid(-5.0, 0.01, 1001)
        w = OuPath(g, np.exp(-g.times() ** 2))
        assert ou_sobolev_norm(translate(w, 1.7)) == ou_sobolev_norm(w)

    def test_dirichlet_scale_invariance(self):
        theta = geometric_wiener(lambda x: np.sqrt(x) * np.sin(x), -3.0, 2.0)
        base = wiener_dirichlet_norm(theta)
        for alpha in (0.3, 2.0, 17.0):
            assert wiener_dirichlet_norm(brownian_scale(theta, alpha)) == pytest.approx(
                base, rel=1e-12
            )

    def test_sup_norms(self):
        g = TimeGrid(-4.0, 0.5, 17)  # contains t = 0
        assert ou_sup_norm(OuPath(g, np.zeros(17))) == 0.0
        # constant path: maximizer at t = 0 where log(e) = 1
        assert ou_sup_norm(OuPath(g, np.full(17, 2.5))) == pytest.approx(2.5, abs=1e-14)
        xs = np.exp(np.linspace(-3, 3, 101))
        vals = np.sqrt(xs) * np.log(np.e + np.abs(np.log(xs)))
        assert wiener_sup_norm(WienerPath(xs, vals)) == pytest.approx(1.0, abs=1e-14)


@given(st.floats(-3, 3), st.floats(0.05, 0.5), st.integers(3, 40))
def test_translate_zero_is_identity(t0, dt, n):
    g = TimeGrid(t0, dt, n)
    w = OuPath(g, np.linspace(-1, 1, n))
    out = translate(w, 0.0)
    assert out.grid == g
    np.testing.assert_array_equal(out.values, w.values)
