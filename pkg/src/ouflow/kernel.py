"""Explicit kernel of the fractional transform.

For non-integer parameter u the transform convolves against

    cos(pi u) * delta_0  +  (sin(pi u)/pi) * pv(1/x)  +  phi_u(x),

where phi_u is square integrable, built from a power series with
digamma brackets.  Combined with the principal-value part, the
off-atom kernel theta_u(x) = phi_u(x) + sin(pi u)/(pi x) decays like
exp(-|x|/2) * poly, which is what the convolution actually uses away
from the origin.  The two 1/x contributions inside phi_u are merged
through an expm1 factor so no catastrophic cancellation occurs near 0.

Evaluation strategy: the defining power series below |x| = 22, a
large-argument expansion above it (the series loses float64 accuracy
to cancellation there); integer u collapses to the exact signed
measures of the integer iterates.
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._backend import kernels
from .errors import AccuracyError, MarginError
from .paths import OuPath, TimeGrid
from .specfun import digamma, laguerre_deriv

EULER_GAMMA = 0.5772156649015329
SERIES_SWITCH = 22.0
SERIES_CAP = 400

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(40)
_GLAG_NODES, _GLAG_WEIGHTS = np.polynomial.laguerre.laggauss(48)


def _is_integer(u: float) -> bool:
    return float(u) == math.floor(u)


def _integer_phi(n: int, x: np.ndarray) -> np.ndarray:
    """Limit value of the smooth part at integer parameter: the signed density."""
    sign = -1.0 if n % 2 else 1.0
    out = np.zeros_like(x)
    if n > 0:
        pos = x > 0
        out[pos] = sign * np.exp(-x[pos] / 2.0) * laguerre_deriv(n, x[pos])
    elif n < 0:
        neg = x < 0
        out[neg] = sign * np.exp(x[neg] / 2.0) * laguerre_deriv(-n, -x[neg])
    return out


class _SeriesContext:
    """Precomputed seeds for the kernel series at one non-integer u."""

    def __init__(self, u: float):
        self.u = float(u)
        self.sin_pi_u = math.sin(math.pi * u)
        self.c_over = self.sin_pi_u / math.pi
        self.dig_pos = digamma(1.0 - u)
        self.dig_neg = digamma(1.0 + u)
        self.inv_g_pos = 1.0 / math.gamma(u)
        self.inv_g_neg = 1.0 / math.gamma(-u)

    def series_part(self, x: np.ndarray) -> np.ndarray:
        """psi_s(x): the kernel prefactor with the 1/x pole removed."""
        vals, flags = kernels.kernel_series_batch(
            np.ascontiguousarray(x, dtype=np.float64), self.u,
            self.dig_pos, self.dig_neg, self.inv_g_pos, self.inv_g_neg,
            self.c_over, SERIES_SWITCH, SERIES_CAP,
        )
        if np.any(flags):
            bad = np.asarray(x)[np.asarray(flags, dtype=bool)]
            raise AccuracyError(
                f"kernel series hit the {SERIES_CAP}-term cap at x={bad[:3]}"
            )
        return vals


def _eval_parts(u: float, x: np.ndarray):
    """Return (phi, theta) arrays at the points x (all nonzero)."""
    ax = np.abs(x)
    if _is_integer(u):
        dens = _integer_phi(int(round(u)), x)
        return dens, dens
    ctx = _SeriesContext(u)
    psi_s = ctx.series_part(x)
    damp = np.exp(-ax / 2.0)
    pole = ctx.c_over / x
    phi = damp * psi_s + np.expm1(-ax / 2.0) * pole
    theta = damp * (psi_s + pole)
    return phi, theta


def phi_eval(u: float, x):
    """Square-integrable smooth part of the fractional kernel at x != 0.

    Integer u returns the limit value, i.e. the density of the exact
    integer-step kernel.
    """
    arr = np.asarray(x, dtype=np.float64)
    if np.any(arr == 0.0) or not np.all(np.isfinite(arr)):
        raise ValueError("phi_eval requires finite nonzero x")
    phi, _ = _eval_parts(u, np.atleast_1d(arr))
    return float(phi[0]) if arr.ndim == 0 else phi


def theta_eval(u: float, x):
    """Off-atom kernel theta_u = phi_u + sin(pi u)/(pi x); decays like exp(-|x|/2)."""
    arr = np.asarray(x, dtype=np.float64)
    if np.any(arr == 0.0) or not np.all(np.isfinite(arr)):
        raise ValueError("theta_eval requires finite nonzero x")
    _, theta = _eval_parts(u, np.atleast_1d(arr))
    return float(theta[0]) if arr.ndim == 0 else theta


@dataclass(frozen=True)
class KernelDecomposition:
    """Atom coefficient, principal-value coefficient and smooth part."""

    u: float
    atom_coeff: float
    pv_coeff: float
    phi: Callable[[np.ndarray], np.ndarray]


def decompose(u: float) -> KernelDecomposition:
    """Three-part kernel of the transform with parameter u."""
    return KernelDecomposition(
        u=float(u),
        atom_coeff=math.cos(math.pi * u),
        pv_coeff=math.sin(math.pi * u) / math.pi,
        phi=lambda x, _u=float(u): phi_eval(_u, x),
    )


def _gl_on(a: float, b: float, f) -> float:
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    return half * float(np.dot(_GL_WEIGHTS, f(mid + half * _GL_NODES)))


def _series_gh(u: float, side: float, s: np.ndarray):
    """Split the kernel series at small s into G(s) + H(s)*log(s).

    Same recurrences as the batch kernel, with the log factored out,
    so the log-weighted near-field mass can be integrated with a
    log-aware rule.
    """
    a = 1.0 - u * side
    dig_a = digamma(a)
    dig12 = 1.0 - 2.0 * EULER_GAMMA
    coef = np.ones_like(s)
    acc_g = np.zeros_like(s)
    acc_h = np.zeros_like(s)
    for k in range(SERIES_CAP):
        acc_g += coef * (dig_a - dig12)
        acc_h += coef
        step = (a + k) * s / ((k + 1.0) * (k + 2.0))
        coef = coef * step
        if np.all(np.abs(coef) * (abs(dig_a) + abs(dig12) + 5.0)
                  <= 1e-17 * (1.0 + np.abs(acc_g))) and k >= 4:
            break
        dig_a += 1.0 / (a + k)
        dig12 += 1.0 / (1.0 + k) + 1.0 / (2.0 + k)
    pref = -u * math.sin(math.pi * u) / math.pi
    return pref * acc_g, pref * acc_h


def smooth_part_mass(u: float, eps: float) -> float:
    """integral of phi_u over [-eps, eps], with the log singularity handled exactly.

    The odd expm1 * 1/x piece cancels between the two sides; what
    remains splits into smooth terms (Gauss-Legendre) and a
    log-weighted term (Gauss-Laguerre after s = delta*exp(-y)).
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if _is_integer(u):
        n = int(round(u))
        if n == 0:
            return 0.0
        # either side's mass reduces to the same integral after s -> -s
        sign = -1.0 if n % 2 else 1.0
        k = abs(n)
        return _gl_on(0.0, eps, lambda s: sign * np.exp(-s / 2.0) * laguerre_deriv(k, s))

    c_over = math.sin(math.pi * u) / math.pi
    delta = min(0.5 * eps, 0.25)
    total = 0.0
    for side in (1.0, -1.0):
        # [delta, eps]: smooth, direct Gauss-Legendre on phi
        total += _gl_on(delta, eps, lambda s: phi_eval(u, side * s))
        # [0, delta]: exp(-s/2)*(G + H log s) + side*expm1(-s/2)*c/s
        def g_part(s, _side=side):
            g, _ = _series_gh(u, _side, s)
            return np.exp(-s / 2.0) * g

        def w_part(s, _side=side):
            _, h = _series_gh(u, _side, s)
            return np.exp(-s / 2.0) * h

        total += _gl_on(0.0, delta, g_part)
        total += _gl_on(0.0, delta, lambda s: side * c_over * np.expm1(-s / 2.0) / s)
        # log-weighted piece: int_0^delta W(s) log s ds
        total += math.log(delta) * _gl_on(0.0, delta, w_part)
        sub = delta * np.exp(-_GLAG_NODES)
        total += -delta * float(np.dot(_GLAG_WEIGHTS, _GLAG_NODES * w_part(sub)))
    return total


def fractional_taps(u: float, dt: float, n_margin: int, j_eps: int):
    """Discrete taps of the fractional kernel on offsets -K..K plus the atom term.

    Composite trapezoid of theta_u on [eps, M] both sides, the
    odd-symmetrized principal-value rule inside [0, eps], and the
    near-field smooth part integrated as phi * (w(t-s) - w(t)) plus its
    exact mass.  Returns (taps, atom_term).
    """
    k, j = n_margin, j_eps
    eps = j * dt
    offsets = np.concatenate([np.arange(-k, 0), np.arange(1, k + 1)])
    svals = offsets * dt
    phi_vals, theta_vals = _eval_parts(u, svals)

    g = np.zeros(2 * k + 1)
    idx = offsets + k
    aj = np.abs(offsets)
    # far field
    far = aj >= j
    w_far = np.where((aj == j) | (aj == k), 0.5, 1.0)
    g[idx[far]] += (w_far * dt * theta_vals)[far]
    # principal value, odd symmetrized, with the s -> 0 limit taken by a
    # centered difference (weight dt/2 at the 0 node)
    c_over = math.sin(math.pi * u) / math.pi
    if c_over != 0.0:
        g[k + 1] += 0.5 * c_over
        g[k - 1] -= 0.5 * c_over
        for jj in range(1, j + 1):
            w = 0.5 if jj == j else 1.0
            g[k + jj] += w * c_over / jj
            g[k - jj] -= w * c_over / jj
    # near-field smooth part
    near = (aj <= j) & (aj >= 1)
    w_near = np.where(aj == j, 0.5, 1.0)
    contrib = np.zeros_like(g)
    np.add.at(contrib, idx[near], (w_near * dt * phi_vals)[near])
    g += contrib
    atom = math.cos(math.pi * u) + smooth_part_mass(u, eps) - float(contrib.sum())
    return g, atom


def apply_fractional_kernel(w: OuPath, u: float, eps_pv: float | None = None, *,
                            eps_target: float = 1e-8,
                            margin: float | None = None) -> OuPath:
    """Apply the transform with parameter u through its explicit kernel.

    atom * w(t) + principal-value part + smooth part, evaluated as one
    discrete convolution; see fractional_taps.  The input window is
    trimmed by the margin M on both sides.  eps_pv defaults to 16*dt
    and is snapped to a grid multiple (noted in the metadata).
    """
    from .transform import default_margin

    dt = w.grid.dt
    sup = float(np.max(np.abs(w.values)))
    m = default_margin(sup, eps_target) if margin is None else float(margin)
    k = int(math.ceil(m / dt))
    m_eff = k * dt
    if w.grid.n - 2 * k < 2:
        raise MarginError(
            f"two-sided margin {m_eff:.3g} needs {2 * k} nodes, window has {w.grid.n}"
        )
    req = 16 * dt if eps_pv is None else float(eps_pv)
    j = max(1, int(round(req / dt)))
    if j >= k:
        raise ValueError("eps_pv must be smaller than the margin")
    snapped = abs(j * dt - req) > 1e-12 * max(1.0, req)
    g, atom = fractional_taps(u, dt, k, j)
    core = kernels.correlate_valid(w.values, g[::-1].copy())
    vals = atom * w.values[k:w.grid.n - k] + core
    grid = TimeGrid(w.grid.t_start + m_eff, dt, w.grid.n - 2 * k)
    meta = {
        "u": u,
        "margin": m_eff,
        "tail_bound": 2.0 * math.exp(-m_eff / 2.0) * sup,
        "eps_pv": j * dt,
        "eps_pv_snapped": snapped,
    }
    return OuPath(grid, vals, meta=meta)


def ode_residual(u: float, xs) -> float:
    """Max finite-difference residual of x*th'' + 2*th' + (u - x/4)*th over xs.

    theta_u solves this equation away from 0; the residual is limited
    by the differencing, not the evaluator.  Step 1e-4 * max(1, |x|).
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=np.float64))
    worst = 0.0
    for x in xs:
        h = 1e-4 * max(1.0, abs(x))
        if abs(x) < 10.0 * h:
            raise ValueError(f"x={x} too close to 0 for step {h}")
        t0 = theta_eval(u, x)
        tp = theta_eval(u, x + h)
        tm = theta_eval(u, x - h)
        d1 = (tp - tm) / (2.0 * h)
        d2 = (tp - 2.0 * t0 + tm) / (h * h)
        worst = max(worst, abs(x * d2 + 2.0 * d1 + (u - x / 4.0) * t0))
    return worst


def smooth_series_residual(u: float, xs) -> float:
    """Max residual of the undamped series factor's equation
    x*p'' + (2-|x|)*p' + (u - sgn x)*p = 0, with p = exp(|x|/2)*theta_u."""
    xs = np.atleast_1d(np.asarray(xs, dtype=np.float64))
    worst = 0.0
    for x in xs:
        h = 1e-4 * max(1.0, abs(x))
        if abs(x) < 10.0 * h:
            raise ValueError(f"x={x} too close to 0 for step {h}")
        p = lambda y: math.exp(abs(y) / 2.0) * theta_eval(u, y)
        p0, pp, pm = p(x), p(x + h), p(x - h)
        d1 = (pp - pm) / (2.0 * h)
        d2 = (pp - 2.0 * p0 + pm) / (h * h)
        sgn = 1.0 if x > 0 else -1.0
        worst = max(worst, abs(x * d2 + (2.0 - abs(x)) * d1 + (u - sgn) * p0))
    return worst
