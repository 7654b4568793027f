"""Single-step transform in both coordinate systems, and its integer powers.

On wiener-grid paths the step is theta(t) - integral_0^t theta(s)/s ds.
Conjugating through the coordinate map and flipping sign turns it into
convolution against the signed measure -delta_0 + exp(-t/2) 1_{t>=0} dt
on OU-coordinate paths.  Iterates of the step convolve against signed
measures whose densities are exponential-weighted Laguerre derivatives.
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._backend import kernels
from .errors import MarginError
from .paths import OuPath, TimeGrid, WienerPath
from .specfun import laguerre_deriv


@dataclass(frozen=True)
class SignedKernelMeasure:
    """Atom at 0 plus an exponentially decaying density on one half line."""

    atom: float
    density: Callable[[np.ndarray], np.ndarray]
    support_side: str  # "nonneg" | "nonpos"
    label: str = ""

    def __post_init__(self):
        if self.support_side not in ("nonneg", "nonpos"):
            raise ValueError(f"bad support side {self.support_side!r}")


def integer_kernel(n: int) -> SignedKernelMeasure:
    """Kernel of the n-fold step: atom (-1)^n plus a Laguerre-weighted density.

    n >= 0: density (-1)^n exp(-t/2) L'_n(t) on t >= 0;
    n <= 0: density (-1)^n exp(+t/2) L'_|n|(-t) on t <= 0.
    n = 0 is the identity (pure atom), n = 1 the single step.
    """
    n = int(n)
    k = abs(n)
    sign = -1.0 if n % 2 else 1.0
    if n >= 0:
        def density(t, _k=k, _s=sign):
            t = np.asarray(t, dtype=np.float64)
            return _s * np.exp(-t / 2.0) * laguerre_deriv(_k, t)

        return SignedKernelMeasure(sign, density, "nonneg", label=f"step^{n}")

    def density(t, _k=k, _s=sign):
        t = np.asarray(t, dtype=np.float64)
        return _s * np.exp(t / 2.0) * laguerre_deriv(_k, -t)

    return SignedKernelMeasure(sign, density, "nonpos", label=f"step^{n}")


def default_margin(sup_abs: float, eps_target: float) -> float:
    """Margin policy M = max(40, 2*ln(sup|w| / eps)); tail bound 2*exp(-M/2)*sup."""
    if sup_abs <= 0.0:
        return 40.0
    return max(40.0, 2.0 * math.log(max(sup_abs, 1.0) / eps_target))


def apply_signed_kernel(w: OuPath, kern: SignedKernelMeasure, *,
                        eps_target: float = 1e-8,
                        margin: float | None = None) -> OuPath:
    """Convolve a path with an integer-step kernel by composite trapezoid.

    The half-line integral is truncated at the margin M; the analytic
    tail bound 2*exp(-M/2)*sup|w| is recorded in the output metadata.
    The output grid is the input grid trimmed by M on the side the
    kernel reaches into; MarginError if nothing remains.
    """
    dt = w.grid.dt
    sup = float(np.max(np.abs(w.values)))
    m = default_margin(sup, eps_target) if margin is None else float(margin)
    nk = int(math.ceil(m / dt))
    m_eff = nk * dt
    if w.grid.n - nk < 2:
        raise MarginError(
            f"margin {m_eff:.3g} needs {nk} nodes, window only has {w.grid.n}"
        )
    s = dt * np.arange(nk + 1)
    if kern.support_side == "nonneg":
        g = kern.density(s) * dt
    else:
        g = kern.density(-s) * dt
    g[0] *= 0.5
    g[-1] *= 0.5
    meta = {
        "margin": m_eff,
        "tail_bound": 2.0 * math.exp(-m_eff / 2.0) * sup,
        "kernel": kern.label,
    }
    if kern.support_side == "nonneg":
        # out[j] = atom*v[j] + sum_k g_k v[j-k], valid for j >= nk
        core = kernels.correlate_valid(w.values, g[::-1].copy())
        vals = kern.atom * w.values[nk:] + core
        grid = TimeGrid(w.grid.t_start + m_eff, dt, w.grid.n - nk)
    else:
        # out[j] = atom*v[j] + sum_k g_k v[j+k], valid for j <= n-1-nk
        core = kernels.correlate_valid(w.values, g.copy())
        vals = kern.atom * w.values[:w.grid.n - nk] + core
        grid = TimeGrid(w.grid.t_start, dt, w.grid.n - nk)
    return OuPath(grid, vals, meta=meta)


def step_transform(w: OuPath, *, eps_target: float = 1e-8,
                   margin: float | None = None) -> OuPath:
    """One step in OU coordinates: -w(t) + integral_0^inf exp(-s/2) w(t-s) ds."""
    return apply_signed_kernel(w, integer_kernel(1),
                               eps_target=eps_target, margin=margin)


def wiener_step_transform(theta: WienerPath) -> WienerPath:
    """One step on a wiener-grid path: theta(t) - integral_0^t theta(s)/s ds.

    Composite trapezoid on the stored grid.  Below the first node the
    integrand theta(s)/s is extended by the constant theta(x0)/x0 (the
    chord slope through the origin), an O(x0) approximation for paths
    differentiable at 0.
    """
    xs = theta.xs
    g = theta.values / xs
    head = xs[0] * g[0]  # integral over [0, x0] under the linear extension
    inner = 0.5 * (g[1:] + g[:-1]) * np.diff(xs)
    integral = head + np.concatenate([[0.0], np.cumsum(inner)])
    return WienerPath(xs, theta.values - integral)
