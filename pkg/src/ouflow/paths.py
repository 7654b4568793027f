"""Path containers and coordinate maps.

Two coordinate systems: stationary-process paths ("ou") live on uniform
time grids over the whole line; scaled-Brownian paths ("wiener") live on
increasing positive grids with an implicit value 0 at x = 0.  The change
of coordinates omega(t) = exp(-t/2) * theta(exp(t)) sends one onto the
other and maps Brownian scaling to time translation.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import WindowError


@dataclass(frozen=True)
class TimeGrid:
    """Uniform sampling lattice: node j sits at t_start + j*dt."""

    t_start: float
    dt: float
    n: int

    def __post_init__(self):
        if not (self.dt > 0.0) or not math.isfinite(self.dt):
            raise ValueError(f"dt must be positive and finite, got {self.dt}")
        if self.n < 2:
            raise ValueError(f"grid needs at least 2 nodes, got {self.n}")
        if not math.isfinite(self.t_start):
            raise ValueError("t_start must be finite")

    @property
    def t_end(self) -> float:
        return self.t_start + (self.n - 1) * self.dt

    def times(self) -> np.ndarray:
        return self.t_start + self.dt * np.arange(self.n)

    def index_of(self, t, tol=None) -> int:
        """Index of the node at time t; WindowError if off-grid."""
        tol = 1e-9 * self.dt if tol is None else tol
        j = int(round((t - self.t_start) / self.dt))
        if j < 0 or j >= self.n or abs(self.t_start + j * self.dt - t) > tol:
            raise WindowError(f"time {t} is not a node of {self}")
        return j


def _freeze(values, n, label):
    values = np.array(values, dtype=np.float64)
    if values.shape != (n,):
        raise ValueError(f"{label} values must have shape ({n},), got {values.shape}")
    if not np.all(np.isfinite(values)):
        raise ValueError(f"{label} values must be finite")
    values.setflags(write=False)
    return values


@dataclass(frozen=True, eq=False)
class OuPath:
    """Real sample vector on a uniform time grid."""

    grid: TimeGrid
    values: np.ndarray
    meta: dict | None = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", _freeze(self.values, self.grid.n, "OuPath"))


@dataclass(frozen=True, eq=False)
class WienerPath:
    """Real sample vector on an increasing positive grid; theta(0) = 0 implicitly."""

    xs: np.ndarray
    values: np.ndarray
    meta: dict | None = field(default=None, repr=False)

    def __post_init__(self):
        xs = np.array(self.xs, dtype=np.float64)
        if xs.ndim != 1 or xs.size < 2:
            raise ValueError("xs must be a 1-d grid with at least 2 nodes")
        if not (xs[0] > 0.0):
            raise ValueError("xs must start at a positive abscissa")
        if not np.all(np.diff(xs) > 0.0):
            raise ValueError("xs must be strictly increasing")
        xs.setflags(write=False)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "values", _freeze(self.values, xs.size, "WienerPath"))


def to_ou(theta: WienerPath, grid: TimeGrid) -> OuPath:
    """Pull a wiener-grid path to OU coordinates: omega(t) = exp(-t/2)*theta(exp(t)).

    Linear interpolation between xs nodes; exact where exp(t) hits a node.
    """
    t = grid.times()
    xq = np.exp(t)
    if xq[0] < theta.xs[0] or xq[-1] > theta.xs[-1]:
        raise WindowError(
            f"requested OU grid maps to x in [{xq[0]:.6g}, {xq[-1]:.6g}], "
            f"outside the stored range [{theta.xs[0]:.6g}, {theta.xs[-1]:.6g}]"
        )
    vals = np.exp(-t / 2.0) * np.interp(xq, theta.xs, theta.values)
    return OuPath(grid, vals)


def to_wiener(w: OuPath, xs=None) -> WienerPath:
    """Push an OU-coordinate path to the wiener grid: theta(x) = sqrt(x)*omega(log x).

    Default xs = exp of the time nodes (exact, no interpolation).
    """
    if xs is None:
        xq = np.exp(w.grid.times())
        vals = np.sqrt(xq) * w.values
        return WienerPath(xq, vals)
    xs = np.asarray(xs, dtype=np.float64)
    if np.any(xs <= 0.0):
        raise ValueError("requested x nodes must be positive")
    tq = np.log(xs)
    t = w.grid.times()
    if tq[0] < t[0] or tq[-1] > t[-1]:
        raise WindowError("requested x nodes map outside the stored time window")
    vals = np.sqrt(xs) * np.interp(tq, t, w.values)
    return WienerPath(xs, vals)


def brownian_scale(theta: WienerPath, alpha: float) -> WienerPath:
    """Brownian scaling: output(t) = alpha**-0.5 * theta(alpha*t).

    Pure relabelling of the grid (exact, no interpolation).
    """
    if not (alpha > 0.0):
        raise ValueError(f"scaling parameter must be positive, got {alpha}")
    return WienerPath(theta.xs / alpha, theta.values / math.sqrt(alpha))


def translate(w: OuPath, s: float) -> OuPath:
    """Time translation: output(t) = omega(s + t); the grid shifts by -s."""
    return OuPath(TimeGrid(w.grid.t_start - s, w.grid.dt, w.grid.n), w.values)


def ou_sobolev_norm(w: OuPath) -> float:
    """Discrete sqrt( integral of h^2/4 + hdot^2 ).

    Central differences for hdot in the interior, one-sided at the ends,
    composite trapezoid for the integral.  Grid functional, not a
    certified continuum value.
    """
    if w.grid.n < 3:
        raise ValueError("sobolev norm needs at least 3 nodes")
    v = w.values
    dt = w.grid.dt
    hdot = np.empty_like(v)
    hdot[1:-1] = (v[2:] - v[:-2]) / (2.0 * dt)
    hdot[0] = (v[1] - v[0]) / dt
    hdot[-1] = (v[-1] - v[-2]) / dt
    integrand = 0.25 * v * v + hdot * hdot
    return float(np.sqrt(np.trapezoid(integrand, dx=dt)))


def ou_sobolev_norm_spectral(w: OuPath, pad_factor: int = 4) -> float:
    """Spectral form (1/8pi) * sum |hhat|^2 (1 + 4 lam^2) dlam via a padded DFT.

    Matches the time-domain form for smooth, compactly supported paths;
    intended for periodized tests and isometry checks.
    """
    n = w.grid.n
    dt = w.grid.dt
    p = 1
    while p < pad_factor * n:
        p <<= 1
    spec = np.fft.rfft(w.values, p) * dt
    lam = 2.0 * np.pi * np.fft.rfftfreq(p, d=dt)
    dlam = 2.0 * np.pi / (p * dt)
    weights = np.full(lam.size, 2.0)
    weights[0] = 1.0
    if p % 2 == 0:
        weights[-1] = 1.0  # Nyquist bin is its own conjugate
    total = np.sum(weights * np.abs(spec) ** 2 * (1.0 + 4.0 * lam * lam)) * dlam
    return float(np.sqrt(total / (8.0 * np.pi)))


def wiener_dirichlet_norm(theta: WienerPath) -> float:
    """Discrete sqrt( integral of thetadot^2 ) including the implicit origin segment.

    Exactly invariant under brownian_scale by construction.
    """
    dv = np.diff(theta.values, prepend=0.0)
    dx = np.diff(theta.xs, prepend=0.0)
    return float(np.sqrt(np.sum(dv * dv / dx)))


def ou_sup_norm(w: OuPath) -> float:
    """sup over nodes of |omega(t)| / log(e + |t|)."""
    t = w.grid.times()
    return float(np.max(np.abs(w.values) / np.log(np.e + np.abs(t))))


def wiener_sup_norm(theta: WienerPath) -> float:
    """sup over nodes of |theta(x)| / (sqrt(x) * log(e + |log x|))."""
    x = theta.xs
    denom = np.sqrt(x) * np.log(np.e + np.abs(np.log(x)))
    return float(np.max(np.abs(theta.values) / denom))
