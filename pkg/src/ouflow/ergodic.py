"""Long-run averages along translations and along flow iterates.

Time averages of window observables converge to the ensemble mean for
the stationary process; the same holds for iterate averages of the flow
at any nonzero parameter.  Iterates are always realized directly from
the multiplier at m*u (one application per iterate), never by repeated
application, so windowing errors do not compound.

Two evaluation models for iterate averages:

* ``circular`` (default): the path is one period of a stationary
  circle; the multiplier is exactly unitary there and iterates of any
  order stay valid.  This is the honest scale for thousands of
  iterates, whose group delay (about 4*u per unit of parameter) would
  otherwise demand windows tens of thousands of time units wide.
* ``windowed``: genuine line-segment evaluation with explicit margin
  accounting; raises WindowError once the group delay pushes the
  needed history outside the stored window.
"""

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import WindowError
from .flow import FlowPlan, apply_flow
from .paths import OuPath
from .specfun import multiplier_eval


@dataclass(frozen=True)
class Observable:
    """Path functional readable from a bounded window around t = 0."""

    kind: str
    lag: float = 0.0
    fn: Callable | None = field(default=None, compare=False)

    @classmethod
    def value_at_zero(cls):
        return cls("value_at_0")

    @classmethod
    def square_at_zero(cls):
        return cls("value_square_at_0")

    @classmethod
    def product_lag(cls, lag: float):
        return cls("product_lag", lag=float(lag))

    @classmethod
    def window_fn(cls, fn: Callable, reach: float = 0.0):
        """Custom observable fn(values, grid, center_index); ``reach`` is the
        largest |t| it reads around the center."""
        return cls("user_window_fn", lag=float(reach), fn=fn)

    def reach_nodes(self, dt: float) -> tuple[int, int]:
        """(backward, forward) node reach around the center."""
        if self.kind in ("value_at_0", "value_square_at_0"):
            return 0, 0
        if self.kind == "product_lag":
            off = int(round(self.lag / dt))
            return max(0, -off), max(0, off)
        r = int(round(abs(self.lag) / dt))
        return r, r

    def evaluate(self, values: np.ndarray, grid, center: int) -> float:
        if self.kind == "value_at_0":
            return float(values[center])
        if self.kind == "value_square_at_0":
            return float(values[center] ** 2)
        if self.kind == "product_lag":
            off = int(round(self.lag / grid.dt))
            if abs(off * grid.dt - self.lag) > 1e-9 * grid.dt:
                raise ValueError("observable lag must be a grid multiple")
            return float(values[center] * values[center + off])
        if self.kind == "user_window_fn":
            return float(self.fn(values, grid, center))
        raise ValueError(f"unknown observable kind {self.kind!r}")


@dataclass(frozen=True)
class AverageReport:
    """Running averages with a batch-means error estimate."""

    partial_averages: np.ndarray
    final: float
    std_err_estimate: float
    params: dict


def _batch_std_err(samples: np.ndarray, n_batches: int = 16) -> float:
    n = samples.size
    if n < 2 * n_batches:
        return float(np.std(samples, ddof=1) / math.sqrt(n))
    cut = (n // n_batches) * n_batches
    means = samples[:cut].reshape(n_batches, -1).mean(axis=1)
    return float(np.std(means, ddof=1) / math.sqrt(n_batches))


def time_average(w: OuPath, obs: Observable, t_max: float,
                 step: float) -> AverageReport:
    """Running averages (1/T) integral_0^T f(translate_s w) ds by trapezoid.

    The grid must contain t = 0, and the window must reach t_max plus
    the observable's furthest read.
    """
    dt = w.grid.dt
    stride = max(1, int(round(step / dt)))
    step_eff = stride * dt
    center0 = w.grid.index_of(0.0)
    n_steps = int(math.floor(t_max / step_eff + 1e-9))
    back, fwd = obs.reach_nodes(dt)
    last = center0 + n_steps * stride + fwd
    if last >= w.grid.n or center0 - back < 0:
        raise WindowError(
            f"window too short: need node index {last}, have {w.grid.n}"
        )
    f = np.array([
        obs.evaluate(w.values, w.grid, center0 + j * stride)
        for j in range(n_steps + 1)
    ])
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (f[1:] + f[:-1]) * step_eff)])
    times = step_eff * np.arange(n_steps + 1)
    partial = np.empty(n_steps + 1)
    partial[0] = f[0]
    partial[1:] = cum[1:] / times[1:]
    return AverageReport(
        partial_averages=partial,
        final=float(partial[-1]),
        std_err_estimate=_batch_std_err(f),
        params={"kind": obs.kind, "lag": obs.lag, "t_max": n_steps * step_eff,
                "step": step_eff, "mode": "translation"},
    )


def flow_average(w: OuPath, obs: Observable, u: float, n_max: int,
                 mode: str = "circular",
                 plan: FlowPlan | None = None) -> AverageReport:
    """Running averages (1/n) sum_m f(flow_{m*u} w), iterates from the multiplier.

    u must be nonzero (the parameter 0 map is the identity, the one
    non-ergodic member of the family).
    """
    if u == 0.0:
        raise ValueError("iterate averages need a nonzero parameter")
    if n_max < 1:
        raise ValueError("n_max must be positive")
    if mode not in ("circular", "windowed"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "circular":
        f = _iterate_values_circular(w, obs, u, n_max)
    else:
        f = _iterate_values_windowed(w, obs, u, n_max, plan)
    partial = np.cumsum(f) / np.arange(1, n_max + 1)
    return AverageReport(
        partial_averages=partial,
        final=float(partial[-1]),
        std_err_estimate=_batch_std_err(f),
        params={"kind": obs.kind, "lag": obs.lag, "u": u, "n_max": n_max,
                "mode": mode},
    )


def _iterate_values_circular(w, obs, u, n_max):
    vals = w.values
    p = vals.size
    dt = w.grid.dt
    center = w.grid.index_of(0.0)
    back, fwd = obs.reach_nodes(dt)
    reach = back + fwd
    idxs = [i % p for i in range(center - back, center + fwd + 1)]
    lam = 2.0 * np.pi * np.fft.fftfreq(p, d=dt)
    q = multiplier_eval(u, lam)
    if p % 2 == 0:
        q[p // 2] = q[p // 2].real
    spec = np.fft.fft(vals)
    # bases[k, i] = spec_k * exp(2 pi i k idx_i / p) / p; iterate value at
    # idx_i is Re(z . bases[:, i]) with z the running multiplier power
    phases = np.exp(2j * np.pi * np.outer(np.fft.fftfreq(p) * p, np.array(idxs)) / p)
    bases = (spec[:, None] * phases) / p
    z = np.ones(p, dtype=np.complex128)
    local = np.empty(len(idxs))
    out = np.empty(n_max)
    center_local = back  # idxs are contiguous around the center
    for m in range(n_max):
        local[:] = (z @ bases).real
        if reach:
            # local holds the needed contiguous window around the center
            out[m] = obs.evaluate(local, w.grid, center_local)
        else:
            out[m] = obs.evaluate(local, w.grid, 0)
        z *= q
    return out


def _iterate_values_windowed(w, obs, u, n_max, plan):
    if plan is None:
        plan = FlowPlan.for_grid(w.grid)
    dt = w.grid.dt
    center = w.grid.index_of(0.0)
    back, fwd = obs.reach_nodes(dt)
    half = min(center - back, w.grid.n - 1 - center - fwd) * dt
    out = np.empty(n_max)
    for m in range(n_max):
        # margin consumed by the iterate: base truncation plus group
        # delay ~ 4|m u| of the kernel's mass transport
        needed = 40.0 + 4.0 * abs(m * u)
        if needed > half:
            raise WindowError(
                f"margin exhausted at iterate {m}: need {needed:.1f} time "
                f"units of margin, window half-width is {half:.1f}"
            )
        vals = apply_flow(w, m * u, plan).values
        out[m] = obs.evaluate(vals, w.grid, center)
    return out
