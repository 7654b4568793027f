"""Covariance of the two-parameter Gaussian field.

c(dt, du) = (2/pi) * integral exp(i [dt*lam + 2 du*arctan(2 lam)]) / (1 + 4 lam^2) dlam
          = (1/pi) * integral_{-pi/2}^{pi/2} cos(dt*tan(tau)/2 + 2 du*tau) dtau.

The tau form runs over a compact interval with a bounded integrand, at
the price of unbounded oscillation of tan toward the endpoints.  Panels
are sized so each holds at most about one oscillation; toward pi/2 the
panels shrink geometrically, and the last sliver is evaluated by two
integrations by parts (the 1/psi' corrections), leaving a certified
O(B^3/a^2) remainder.

The field convention: E[(flow_u path)(s) * (flow_v path)(t)] = c(t - s, u - v).
Closed slices: c(dt, 0) = exp(-|dt|/2), c(0, du) = sin(pi du)/(pi du).
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError, WindowError

_GL16 = np.polynomial.legendre.leggauss(16)
_GL32 = np.polynomial.legendre.leggauss(32)

_MAX_PANELS = 20000
_MAX_ROUNDS = 40


def _phase_cos(a, b, tau):
    return np.cos(a * np.tan(tau) + b * tau)


def _eval_panels(a, b, lo, hi):
    """GL32 values and GL16-vs-GL32 error estimates for panel batch."""
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x32, w32 = _GL32
    x16, w16 = _GL16
    f32 = _phase_cos(a, b, mid[:, None] + half[:, None] * x32[None, :])
    f16 = _phase_cos(a, b, mid[:, None] + half[:, None] * x16[None, :])
    v32 = half * (f32 @ w32)
    v16 = half * (f16 @ w16)
    return v32, np.abs(v32 - v16)


def _tail_correction(a, b, beta):
    """Two integration-by-parts terms for int_0^beta cos(a*cot + b*(pi/2 - .)) dbeta
    plus a bound on the remainder."""
    sb = math.sin(beta)
    cb = math.cos(beta)
    psi = a * cb / sb + b * (math.pi / 2.0 - beta)
    dpsi = -a / (sb * sb) - b
    d2psi = 2.0 * a * cb / (sb ** 3)
    val = math.sin(psi) / dpsi - math.cos(psi) * d2psi / dpsi ** 3
    bound = 8.0 * beta ** 3 / (a * a) * (1.0 + abs(b) * beta * beta / abs(a))
    return val, bound


def cov(d_t: float, d_u: float, abs_err: float = 1e-8) -> float:
    """Field covariance at time lag d_t and parameter lag d_u.

    Adaptive oscillation-controlled panel quadrature of the tau form;
    raises AccuracyError (with the achieved estimate) if the error
    budget cannot be met within the panel budget.
    """
    if abs_err < 1e-10:
        raise ValueError("abs_err must be at least 1e-10")
    a = 0.5 * d_t
    b = 2.0 * d_u
    budget = abs_err * math.pi / 2.0  # budget for the half-line integral
    half_pi = math.pi / 2.0

    panels = []

    def split(lo, hi, max_phase):
        n = max(1, int(math.ceil(max_phase / (2.0 * math.pi))))
        edges = np.linspace(lo, hi, n + 1)
        panels.extend(zip(edges[:-1], edges[1:]))

    tail_val = 0.0
    tail_bound = 0.0
    if a == 0.0:
        split(0.0, half_pi, abs(b) * half_pi)
    else:
        beta0 = 0.8
        # no stationary point of the phase inside the tail sliver
        b_tail = min(beta0 / 4.0,
                     (budget / 4.0 * a * a / 8.0) ** (1.0 / 3.0),
                     math.sqrt(abs(a) / (4.0 * (abs(b) + 1.0))))
        split(0.0, half_pi - beta0, abs(a) / math.tan(beta0) + abs(b) * half_pi)
        hi = beta0
        while hi > b_tail * (1.0 + 1e-12):
            lo = max(b_tail, 0.5 * hi)
            phase = abs(a) * (1.0 / math.tan(lo) - 1.0 / math.tan(hi)) + abs(b) * (hi - lo)
            n = max(1, int(math.ceil(phase / (2.0 * math.pi))))
            edges = np.linspace(lo, hi, n + 1)
            panels.extend(
                (half_pi - e1, half_pi - e0) for e0, e1 in zip(edges[:-1], edges[1:])
            )
            hi = lo
        tail_val, tail_bound = _tail_correction(a, b, b_tail)
        if tail_bound > budget / 2.0:
            raise AccuracyError(
                f"tail remainder bound {tail_bound:.3e} exceeds half the budget",
                achieved=tail_bound * 2.0 / math.pi,
            )

    lo = np.array([p[0] for p in panels])
    hi = np.array([p[1] for p in panels])
    vals, errs = _eval_panels(a, b, lo, hi)
    for _ in range(_MAX_ROUNDS):
        total_err = float(errs.sum()) + tail_bound
        if total_err <= budget or lo.size > _MAX_PANELS:
            break
        worst = errs > max(budget / (4.0 * lo.size), float(np.percentile(errs, 98)))
        if not worst.any():
            worst = errs == errs.max()
        keep_lo, keep_hi = lo[~worst], hi[~worst]
        keep_vals, keep_errs = vals[~worst], errs[~worst]
        mid = 0.5 * (lo[worst] + hi[worst])
        new_lo = np.concatenate([lo[worst], mid])
        new_hi = np.concatenate([mid, hi[worst]])
        new_vals, new_errs = _eval_panels(a, b, new_lo, new_hi)
        lo = np.concatenate([keep_lo, new_lo])
        hi = np.concatenate([keep_hi, new_hi])
        vals = np.concatenate([keep_vals, new_vals])
        errs = np.concatenate([keep_errs, new_errs])
    total_err = float(errs.sum()) + tail_bound
    if total_err > budget:
        raise AccuracyError(
            f"covariance quadrature stalled at estimated error {total_err:.3e}",
            achieved=total_err * 2.0 / math.pi,
        )
    return (float(vals.sum()) + tail_val) * 2.0 / math.pi


@dataclass(frozen=True)
class CovarianceQuery:
    """Lag pair the stationary covariance depends on."""

    d_t: float
    d_u: float

    def __post_init__(self):
        if not (math.isfinite(self.d_t) and math.isfinite(self.d_u)):
            raise ValueError("lags must be finite")


@dataclass(frozen=True)
class CovarianceTable:
    """Covariance values on a (d_t, d_u) product grid."""

    d_t_grid: np.ndarray
    d_u_grid: np.ndarray
    values: np.ndarray
    abs_err_target: float

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.shape != (len(self.d_t_grid), len(self.d_u_grid)):
            raise ValueError("table shape mismatch")
        if np.max(np.abs(vals)) > 1.0 + 1e-9:
            raise ValueError("covariance values must lie in [-1, 1] + 1e-9")


def cov_table(d_t_grid, d_u_grid, abs_err: float = 1e-8) -> CovarianceTable:
    """Fill a covariance table; values are cached on the lag pair."""
    d_t_grid = np.asarray(d_t_grid, dtype=np.float64)
    d_u_grid = np.asarray(d_u_grid, dtype=np.float64)
    cache: dict[tuple[float, float], float] = {}
    out = np.empty((d_t_grid.size, d_u_grid.size))
    for i, dtv in enumerate(d_t_grid):
        for j, duv in enumerate(d_u_grid):
            key = (float(dtv), float(duv))
            alt = (-key[0], -key[1])  # c(dt, du) = c(-dt, -du)
            if key in cache:
                out[i, j] = cache[key]
            elif alt in cache:
                out[i, j] = cache[alt]
            else:
                out[i, j] = cache[key] = cov(dtv, duv, abs_err)
    return CovarianceTable(d_t_grid, d_u_grid, out, abs_err)


def continuity_defect(d_t: float, d_u: float, c_bound: float,
                      abs_err: float = 1e-8) -> float:
    """(1 - cov) minus the modulus bound C*(|du| + |dt|*(1 + log(1 + 1/dt^2))).

    Negative output means the bound holds at this lag for this C.  The
    time term reads as 0 at d_t = 0.
    """
    if d_t == 0.0 and d_u == 0.0:
        raise ValueError("lag pair (0, 0) excluded")
    weight = abs(d_u)
    if d_t != 0.0:
        weight += abs(d_t) * (1.0 + math.log(1.0 + 1.0 / (d_t * d_t)))
    return (1.0 - cov(d_t, d_u, abs_err)) - c_bound * weight


def empirical_cov(pairs, s: float, t: float):
    """Sample mean and standard error of products path_a(s) * path_b(t).

    ``pairs`` holds (path_a, path_b) tuples from independent draws; the
    evaluation nodes must fall in the central half of each grid.
    """
    pairs = list(pairs)
    if len(pairs) < 100:
        raise ValueError("need at least 100 independent pairs")
    prods = np.empty(len(pairs))
    for i, (pa, pb) in enumerate(pairs):
        ja = _central_index(pa, s)
        jb = _central_index(pb, t)
        prods[i] = pa.values[ja] * pb.values[jb]
    mean = float(np.mean(prods))
    std_err = float(np.std(prods, ddof=1) / math.sqrt(len(prods)))
    return mean, std_err


def _central_index(path, t):
    j = path.grid.index_of(t)
    if not (path.grid.n // 4 <= j <= path.grid.n - 1 - path.grid.n // 4):
        raise WindowError(
            f"node {t} lies outside the central half of the window"
        )
    return j
