"""Acceptance checks wired for both the CLI ``verify`` command and pytest.

Each check freezes its grids, seeds and tolerances here.  A check
returns (target, achieved, passed[, detail]); ``tol_scale`` rescales
the tolerance (0 forces failure, useful to exercise the reporting
path).  Reports carry no wall-clock data so that two runs with the
same seed are byte identical; runtime budgets are enforced by the
test suite instead.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .covariance import cov
from .ergodic import Observable, flow_average, time_average
from .flow import FlowPlan, apply_flow, apply_flow_batch, group_law_defect
from .gaussian import RngStream, sample_ou, sample_ou_batch, sample_ou_circle
from .kernel import apply_fractional_kernel, ode_residual, phi_eval
from .paths import (
    OuPath,
    TimeGrid,
    WienerPath,
    brownian_scale,
    ou_sobolev_norm_spectral,
    to_ou,
    translate,
)
from .specfun import laguerre_deriv, multiplier_eval
from .transform import step_transform, wiener_step_transform

DEFAULT_SEED = 20240801


@dataclass(frozen=True)
class CheckResult:
    name: str
    target: float
    achieved: float
    passed: bool
    detail: str = field(default="")


def _bump(t0, t1, dt, width=8.0):
    g = TimeGrid(t0, dt, int(round((t1 - t0) / dt)) + 1)
    t = g.times()
    return OuPath(g, np.exp(-t * t / width))


def check_multiplier_unitarity(seed, scale):
    """C1a: |multiplier| = 1 on a (u, lambda) grid."""
    us = np.linspace(-3.0, 3.0, 25)
    lam = np.linspace(-50.0, 50.0, 201)
    worst = max(
        float(np.max(np.abs(np.abs(multiplier_eval(u, lam)) - 1.0))) for u in us
    )
    tol = 1e-12 * scale
    return tol, worst, worst < tol


def check_multiplier_group_law(seed, scale):
    """C1b: m_u * m_v = m_{u+v} pointwise."""
    us = np.linspace(-3.0, 3.0, 13)
    lam = np.linspace(-50.0, 50.0, 201)
    worst = 0.0
    for u in us:
        mu = multiplier_eval(u, lam)
        for v in us:
            dev = np.max(np.abs(mu * multiplier_eval(v, lam)
                                - multiplier_eval(u + v, lam)))
            worst = max(worst, float(dev))
    tol = 1e-12 * scale
    return tol, worst, worst < tol


def check_cov_time_slice(seed, scale):
    """C2a: cov(dt, 0) = exp(-|dt|/2) for dt in 0..10 step 0.1."""
    worst = max(
        abs(cov(float(dtv), 0.0) - math.exp(-dtv / 2.0))
        for dtv in np.arange(0.0, 10.0001, 0.1)
    )
    tol = 1e-8 * scale
    return tol, worst, worst < tol


def check_cov_parameter_slice(seed, scale):
    """C2b: cov(0, du) = sin(pi du)/(pi du) for du in +/-0.1..4."""
    worst = 0.0
    for duv in np.arange(0.1, 4.0001, 0.1):
        want = math.sin(math.pi * duv) / (math.pi * duv)
        worst = max(worst, abs(cov(0.0, float(duv)) - want),
                    abs(cov(0.0, -float(duv)) - want))
    tol = 1e-8 * scale
    return tol, worst, worst < tol


def check_cov_integer_orthogonality(seed, scale):
    """C2c: cov(0, n) = 0 for n = 1..5."""
    worst = max(abs(cov(0.0, float(n))) for n in range(1, 6))
    tol = 1e-8 * scale
    return tol, worst, worst < tol


def check_spectral_vs_time_domain(seed, scale):
    """C3: the multiplier route matches the time-domain convolution at u = 1."""
    w = _bump(-50.0, 50.0, 0.003)
    ref = apply_flow(w, 1.0)
    out = step_transform(w)
    j = w.grid.index_of(out.grid.t_start)
    t_out = out.grid.times()
    mask = np.abs(t_out) <= 10.0
    dev = float(np.max(np.abs(out.values - ref.values[j:j + out.grid.n])[mask]))
    tol = 1e-6 * scale
    return tol, dev, dev < tol


def check_group_law_defect(seed, scale):
    """C4: flow composition defect on smooth bumps."""
    w = _bump(-50.0, 50.0, 0.02)
    plan = FlowPlan.for_grid(w.grid)
    worst = max(
        group_law_defect(w, u, v, plan)
        for (u, v) in ((0.3, 0.7), (-1.2, 1.2), (1.5, -0.4))
    )
    tol = 1e-6 * scale
    return tol, worst, worst < tol


_C5_US = (0.3, 0.5, 1.5, -0.7)


def check_kernel_vs_flow_smooth(seed, scale):
    """C5a: explicit kernel vs spectral flow on a smooth bump."""
    w = _bump(-52.0, 52.0, 0.01)
    worst = 0.0
    for u in _C5_US:
        ref = apply_flow(w, u)
        out = apply_fractional_kernel(w, u)
        j = w.grid.index_of(out.grid.t_start)
        t_out = out.grid.times()
        mask = np.abs(t_out) <= 12.0
        dev = float(np.max(np.abs(out.values - ref.values[j:j + out.grid.n])[mask]))
        worst = max(worst, dev)
    tol = 1e-4 * scale
    return tol, worst, worst < tol


def _mollified_ou(grid_wide, n_trim, sigma_nodes, rng):
    """Exact stationary sample, smoothed by a normalized gaussian window.

    A raw grid sample carries unresolved content up to the Nyquist
    frequency, where no sampled-kernel quadrature can match the exact
    multiplier (any finite antisymmetric tap set has zero imaginary
    transfer there); the band-limited sample is the grid-resolved
    rendering of the path.
    """
    raw = sample_ou(grid_wide, rng).values
    ks = np.arange(-8 * sigma_nodes, 8 * sigma_nodes + 1, dtype=np.float64)
    gk = np.exp(-ks**2 / (2.0 * sigma_nodes**2))
    gk /= gk.sum()
    smooth = np.convolve(raw, gk, mode="same")
    vals = smooth[n_trim:-n_trim]
    grid = TimeGrid(grid_wide.t_start + n_trim * grid_wide.dt, grid_wide.dt,
                    grid_wide.n - 2 * n_trim)
    return OuPath(grid, vals)


def check_kernel_vs_flow_sampled(seed, scale):
    """C5b: kernel vs flow on band-limited stationary samples, central quarter."""
    dt = 0.01
    wide = TimeGrid(-58.0, dt, int(116 / dt) + 1)
    worst = 0.0
    for k, u in enumerate(_C5_US):
        w = _mollified_ou(wide, 200, 6.0, RngStream(seed, 50 + k))
        ref = apply_flow(w, u)
        out = apply_fractional_kernel(w, u)
        j = w.grid.index_of(out.grid.t_start)
        t_out = out.grid.times()
        mask = np.abs(t_out) <= 14.0
        dev = float(np.max(np.abs(out.values - ref.values[j:j + out.grid.n])[mask]))
        worst = max(worst, dev)
    tol = 1e-3 * scale
    return tol, worst, worst < tol


def check_integer_limit(seed, scale):
    """C6: phi at n + 1e-4 approaches the integer kernel density."""
    x = np.arange(0.1, 5.0001, 0.005)
    worst = 0.0
    for n in (0, 1, 2):
        lim = (-1.0) ** n * np.exp(-x / 2.0) * laguerre_deriv(n, x)
        worst = max(worst, float(np.max(np.abs(phi_eval(n + 1e-4, x) - lim))))
    tol = 1e-2 * scale
    return tol, worst, worst < tol


def check_ode_residual(seed, scale):
    """C7: finite-difference residual of the kernel equation."""
    xs = [0.5, 1.0, 2.0, 5.0, -0.5, -1.0, -2.0, -5.0]
    worst = max(ode_residual(u, xs) for u in (0.5, 1.7))
    tol = 1e-4 * scale
    return tol, worst, worst < tol


def check_phi_fourier(seed, scale):
    """C8: transform of sampled phi matches the multiplier minus its limit symbol.

    phi decays only like -c/x, so an odd rational with known transform
    is subtracted before the window transform and its closed form
    FT[c x / (x^2 + a^2)] = -i pi c exp(-a|lam|) sgn(lam) is restored
    afterwards; the regularized remainder decays like x^-3.  Sampling
    is midpoint (no node at the log singularity), the transform one FFT,
    and the checked frequencies are the FFT bins up to |lam| = 20
    (both targets are conjugate symmetric, so positive bins suffice).
    """
    dt = 1e-4
    half = 60.0
    a_reg = 0.5
    n = 2 * int(half / dt)
    x0 = -half + 0.5 * dt
    xs = x0 + dt * np.arange(n)
    lam_all = 2.0 * np.pi * np.arange(n // 2 + 1) / (n * dt)
    keep = lam_all <= 20.0001
    lam = lam_all[keep]
    worst = 0.0
    for u in (0.3, 0.5):
        c = math.sin(math.pi * u) / math.pi
        vals = phi_eval(u, xs) + c * xs / (xs * xs + a_reg * a_reg)
        spec = np.fft.rfft(vals)[keep] * dt * np.exp(-1j * lam * x0)
        # FT[c x/(x^2+a^2)] = -i pi c exp(-a|lam|) sgn(lam); add it back
        got = spec + 1j * math.pi * c * np.exp(-a_reg * lam) * np.sign(lam)
        want = multiplier_eval(u, lam) - np.exp(-1j * math.pi * u * np.sign(lam))
        want[lam == 0.0] = 1.0 - math.cos(math.pi * u)
        worst = max(worst, float(np.max(np.abs(got - want))))
    tol = 1e-4 * scale
    return tol, worst, worst < tol


def check_isometry(seed, scale):
    """C9: spectral Sobolev norm preserved on random smooth paths."""
    g = TimeGrid(-60.0, 0.05, 2401)
    t = g.times()
    plan = FlowPlan.for_grid(g)
    gen = RngStream(seed, 9).generator()
    worst = 0.0
    for _ in range(20):
        centers = gen.uniform(-8.0, 8.0, 5)
        widths = gen.uniform(0.5, 2.0, 5)
        amps = gen.uniform(-1.0, 1.0, 5)
        vals = sum(a * np.exp(-((t - c) / s) ** 2) for a, c, s in zip(amps, centers, widths))
        w = OuPath(g, vals)
        u = float(gen.uniform(0.2, 2.5) * gen.choice([-1.0, 1.0]))
        nin = ou_sobolev_norm_spectral(w)
        nout = ou_sobolev_norm_spectral(apply_flow(w, u, plan))
        worst = max(worst, abs(nout - nin) / nin)
    tol = 1e-10 * scale
    return tol, worst, worst < tol


def check_mc_covariance(seed, scale):
    """C10: Monte Carlo E[w(t) (flow_u w)(t)] against the quadrature value."""
    grid = TimeGrid(-30.0, 0.05, 1201)
    n_paths = 10000
    base = sample_ou_batch(grid, RngStream(seed, 10), n_paths)
    plan = FlowPlan.for_grid(grid)
    j0 = grid.index_of(0.0)
    worst_z = 0.0
    for u in (0.5, 1.0, 2.0):
        flowed = apply_flow_batch(base, grid, u, plan)
        prods = base[:, j0] * flowed[:, j0]
        mean = float(np.mean(prods))
        se = float(np.std(prods, ddof=1) / math.sqrt(n_paths))
        want = cov(0.0, u)
        worst_z = max(worst_z, abs(mean - want) / se)
    tol = 5.0 * scale
    return tol, worst_z, worst_z < tol


def check_ergodic_flow(seed, scale):
    """C11a: iterate average of the squared center value near 1, 8 of 10 seeds."""
    n, dt = 16384, 0.25
    g = TimeGrid(-(n // 2) * dt, dt, n)
    obs = Observable.square_at_zero()
    hits = 0
    worst = 0.0
    for k in range(10):
        w = OuPath(g, sample_ou_circle(n, dt, RngStream(seed, 100 + k)))
        rep = flow_average(w, obs, 0.7, 4096)
        dev = abs(rep.final - 1.0)
        worst = max(worst, dev)
        if dev < 0.1 * scale:
            hits += 1
    return 8.0, float(hits), hits >= 8


def check_ergodic_translation(seed, scale):
    """C11b: time average of w(0) w(1) near exp(-1/2) at T = 1000."""
    g = TimeGrid(0.0, 0.125, int(1002 / 0.125) + 1)
    w = sample_ou(g, RngStream(777, 4))
    rep = time_average(w, Observable.product_lag(1.0), 1000.0, 0.25)
    dev = abs(rep.final - math.exp(-0.5))
    tol = 0.1 * scale
    return tol, dev, dev < tol


def check_continuity_bound(seed, scale):
    """C12: a finite C <= 10 dominates 1 - cov by the modulus weight."""
    worst_ratio = 0.0
    for dtv in np.arange(-2.0, 2.0001, 0.05):
        for duv in np.arange(-2.0, 2.0001, 0.05):
            dtv = round(float(dtv), 10)
            duv = round(float(duv), 10)
            if dtv == 0.0 and duv == 0.0:
                continue
            if (dtv, duv) < (0.0, 0.0):
                continue  # cov(-dt, -du) = cov(dt, du)
            weight = abs(duv)
            if dtv != 0.0:
                weight += abs(dtv) * (1.0 + math.log(1.0 + 1.0 / (dtv * dtv)))
            ratio = (1.0 - cov(dtv, duv)) / weight
            worst_ratio = max(worst_ratio, ratio)
    tol = 10.0 * scale
    return tol, worst_ratio, worst_ratio <= tol


def check_conjugation_scaling(seed, scale):
    """C13a: coordinate map sends Brownian scaling to translation, node exact."""
    t = np.arange(-3.0, 3.0001, 0.01)
    xs = np.exp(t)
    theta = WienerPath(xs, np.sqrt(xs) * np.cos(np.log(xs)))
    worst = 0.0
    for alpha in (0.5, 2.0, 4.0):
        la = math.log(alpha)
        grid = TimeGrid(-1.0, 0.01, 201)
        lhs = to_ou(brownian_scale(theta, alpha), grid)
        shifted = TimeGrid(grid.t_start + la, grid.dt, grid.n)
        rhs = translate(to_ou(theta, shifted), la)
        dev = np.max(np.abs(lhs.values - rhs.values)
                     / np.maximum(np.abs(rhs.values), 1e-3))
        worst = max(worst, float(dev))
    tol = 1e-12 * scale
    return tol, worst, worst < tol


def check_conjugation_wiener_step(seed, scale):
    """C13b: the wiener-grid step conjugates to the stationary-side step."""
    dt = 0.01
    g = TimeGrid(-48.0, dt, int(56 / dt) + 1)
    t = g.times()
    xs = np.exp(t)
    theta = WienerPath(xs, np.sqrt(xs) * np.exp(-(np.log(xs)) ** 2 / 10.0))
    w = to_ou(theta, g)
    lhs_w = wiener_step_transform(theta)
    lhs = to_ou(WienerPath(lhs_w.xs, -lhs_w.values), g)
    rhs = step_transform(w)
    j = g.index_of(rhs.grid.t_start)
    dev = float(np.max(np.abs(lhs.values[j:j + rhs.grid.n] - rhs.values)))
    tol = 1e-4 * scale
    return tol, dev, dev < tol


CHECKS = [
    ("c01a_multiplier_unitarity", check_multiplier_unitarity),
    ("c01b_multiplier_group_law", check_multiplier_group_law),
    ("c02a_cov_time_slice", check_cov_time_slice),
    ("c02b_cov_parameter_slice", check_cov_parameter_slice),
    ("c02c_cov_integer_orthogonality", check_cov_integer_orthogonality),
    ("c03_spectral_vs_time_domain", check_spectral_vs_time_domain),
    ("c04_group_law_defect", check_group_law_defect),
    ("c05a_kernel_vs_flow_smooth", check_kernel_vs_flow_smooth),
    ("c05b_kernel_vs_flow_sampled", check_kernel_vs_flow_sampled),
    ("c06_integer_limit", check_integer_limit),
    ("c07_ode_residual", check_ode_residual),
    ("c08_phi_fourier", check_phi_fourier),
    ("c09_isometry", check_isometry),
    ("c10_mc_covariance", check_mc_covariance),
    ("c11a_ergodic_flow", check_ergodic_flow),
    ("c11b_ergodic_translation", check_ergodic_translation),
    ("c12_continuity_bound", check_continuity_bound),
    ("c13a_conjugation_scaling", check_conjugation_scaling),
    ("c13b_conjugation_wiener_step", check_conjugation_wiener_step),
]


def run_check(name: str, seed: int = DEFAULT_SEED, tol_scale: float = 1.0) -> CheckResult:
    fn = dict(CHECKS)[name]
    target, achieved, passed = fn(seed, tol_scale)
    return CheckResult(name, float(target), float(achieved), bool(passed))


def run_all(seed: int = DEFAULT_SEED, tol_scale: float = 1.0, log=None):
    """Run every acceptance check; returns (results, report_dict)."""
    results = []
    for name, fn in CHECKS:
        target, achieved, passed = fn(seed, tol_scale)
        res = CheckResult(name, float(target), float(achieved), bool(passed))
        results.append(res)
        if log is not None:
            status = "PASS" if res.passed else "FAIL"
            log(f"[{status}] {name}: target {res.target:.6g}, achieved {res.achieved:.6g}")
    report = {
        "seed": seed,
        "tolerance_scale": tol_scale,
        "checks": [
            {"name": r.name, "target": r.target, "achieved": r.achieved,
             "pass": r.passed}
            for r in results
        ],
        "all_pass": all(r.passed for r in results),
    }
    return results, report
