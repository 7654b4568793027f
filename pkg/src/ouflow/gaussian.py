"""Exact stationary path sampling and direct draws of the two-parameter field.

The stationary process has unit variance and autocovariance
exp(-|dt|/2); on a uniform grid that is an AR(1) recursion with drift
factor exp(-dt/2) and innovation scale sqrt(1 - exp(-dt)), which is
exact (no discretization error in law).  The two-parameter field is
drawn densely from its covariance matrix by Cholesky with a jitter
ladder.

Randomness comes from counter-based Philox streams keyed on
(seed, stream_id): distinct stream ids give independent sequences and
the same pair reproduces draws bit for bit.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .covariance import cov
from .errors import NonPsdError
from .flow import FlowPlan, apply_flow_batch
from .paths import OuPath, TimeGrid

MAX_FIELD_DIM = 4096


@dataclass(frozen=True)
class RngStream:
    """Reproducible, splittable random source."""

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed % 2**64, self.stream_id % 2**64], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def child(self, offset: int) -> "RngStream":
        return RngStream(self.seed, self.stream_id + offset)


def _ar1_coeffs(dt: float):
    rho = math.exp(-dt / 2.0)
    sig = math.sqrt(-math.expm1(-dt))  # sqrt(1 - exp(-dt))
    return rho, sig


def sample_ou(grid: TimeGrid, rng: RngStream) -> OuPath:
    """Draw one stationary path on the grid.

    omega(t_0) ~ N(0,1), then
    omega(t+dt) = exp(-dt/2) omega(t) + sqrt(1 - exp(-dt)) xi.
    """
    gen = rng.generator()
    x0 = gen.standard_normal(1)
    innov = gen.standard_normal((1, grid.n - 1))
    rho, sig = _ar1_coeffs(grid.dt)
    out = kernels.ar1_batch(x0, innov, rho, sig)
    return OuPath(grid, out[0], meta={"seed": rng.seed, "stream_id": rng.stream_id})


def sample_ou_batch(grid: TimeGrid, rng: RngStream, n_paths: int) -> np.ndarray:
    """Draw n_paths independent stationary paths as a matrix (n_paths x n).

    Draw order: all initial values first, then the innovation matrix.
    """
    gen = rng.generator()
    x0 = gen.standard_normal(n_paths)
    innov = gen.standard_normal((n_paths, grid.n - 1))
    rho, sig = _ar1_coeffs(grid.dt)
    return kernels.ar1_batch(x0, innov, rho, sig)


def sample_ou_circle(n: int, dt: float, rng: RngStream) -> np.ndarray:
    """Stationary Gaussian sample on a circle of circumference n*dt.

    Circulant embedding of the periodized exponential covariance: the
    draw is exactly stationary on the circle (no seam), so the periodic
    spectral transforms act on it exactly unitarily.
    """
    if n % 2 != 0:
        raise ValueError("circle sampler needs an even number of nodes")
    circumference = n * dt
    d = np.minimum(np.arange(n), n - np.arange(n)) * dt
    r = np.exp(-d / 2.0) + np.exp(-(circumference - d) / 2.0)
    c = np.fft.fft(r).real
    if np.min(c) < -1e-12:
        raise NonPsdError(f"circulant spectrum negative: {np.min(c):.3e}")
    c = np.maximum(c, 0.0)
    gen = rng.generator()
    half = n // 2
    spec = np.zeros(n, dtype=np.complex128)
    spec[0] = math.sqrt(c[0]) * gen.standard_normal()
    spec[half] = math.sqrt(c[half]) * gen.standard_normal()
    a = gen.standard_normal(half - 1)
    b = gen.standard_normal(half - 1)
    spec[1:half] = np.sqrt(c[1:half] / 2.0) * (a + 1j * b)
    spec[half + 1:] = np.conj(spec[1:half][::-1])
    return np.sqrt(float(n)) * np.fft.ifft(spec).real


@dataclass(frozen=True)
class FieldSample:
    """One draw of the field on a (parameter grid) x (time grid) lattice."""

    u_grid: np.ndarray
    t_grid: TimeGrid
    values: np.ndarray

    def row(self, i: int) -> OuPath:
        return OuPath(self.t_grid, self.values[i])


def field_covariance_matrix(u_grid, t_grid: TimeGrid, abs_err: float = 1e-8):
    """Dense covariance of the flattened field, cached on lag pairs.

    Entry for ((u_i, t_j), (u_k, t_l)) is c(t_l - t_j, u_i - u_k).
    """
    u_grid = np.asarray(u_grid, dtype=np.float64)
    t = t_grid.times()
    nu, nt = u_grid.size, t.size
    cache: dict[tuple[float, float], float] = {}

    def c(dtv, duv):
        key = (round(float(dtv), 12), round(float(duv), 12))
        alt = (-key[0], -key[1])
        if key in cache:
            return cache[key]
        if alt in cache:
            return cache[alt]
        val = cov(dtv, duv, abs_err)
        cache[key] = val
        return val

    mat = np.empty((nu * nt, nu * nt))
    for i in range(nu):
        for k in range(nu):
            duv = u_grid[i] - u_grid[k]
            for j in range(nt):
                for l in range(nt):
                    mat[i * nt + j, k * nt + l] = c(t[l] - t[j], duv)
    return mat


def sample_field(u_grid, t_grid: TimeGrid, rng: RngStream,
                 jitter: float = 1e-10, abs_err: float = 1e-8) -> FieldSample:
    """Draw the centered Gaussian field with covariance c(dt, du).

    Dense Cholesky with a jitter ladder: the requested diagonal jitter
    is grown tenfold on failure up to 1e-6, after which NonPsdError
    reports the most negative eigenvalue estimate.
    """
    u_grid = np.asarray(u_grid, dtype=np.float64)
    dim = u_grid.size * t_grid.n
    if dim > MAX_FIELD_DIM:
        raise ValueError(f"field dimension {dim} exceeds the dense budget {MAX_FIELD_DIM}")
    mat = field_covariance_matrix(u_grid, t_grid, abs_err)
    asym = float(np.max(np.abs(mat - mat.T)))
    if asym > 1e-12:
        raise NonPsdError(f"covariance assembly asymmetric by {asym:.2e}")
    mat = 0.5 * (mat + mat.T)
    jit = max(jitter, 0.0)
    chol = None
    while True:
        try:
            chol = np.linalg.cholesky(mat + jit * np.eye(dim) if jit > 0 else mat)
            break
        except np.linalg.LinAlgError:
            jit = 1e-10 if jit == 0.0 else 10.0 * jit
            if jit > 1e-6:
                min_eig = float(np.linalg.eigvalsh(mat)[0])
                raise NonPsdError(
                    f"Cholesky failed at max jitter 1e-6; min eigenvalue {min_eig:.3e}",
                    min_eigenvalue=min_eig,
                ) from None
    z = rng.generator().standard_normal(dim)
    vals = (chol @ z).reshape(u_grid.size, t_grid.n)
    return FieldSample(u_grid, t_grid, vals)


def sample_field_batch(u_grid, t_grid: TimeGrid, rng: RngStream, n_draws: int,
                       jitter: float = 1e-10, abs_err: float = 1e-8) -> np.ndarray:
    """Independent field draws sharing one factorization.

    Returns an array of shape (n_draws, len(u_grid), t_grid.n).  Draw
    k equals sample_field(..., rng.child(k)) in distribution but not
    bit for bit (one generator supplies all draws).
    """
    u_grid = np.asarray(u_grid, dtype=np.float64)
    dim = u_grid.size * t_grid.n
    if dim > MAX_FIELD_DIM:
        raise ValueError(f"field dimension {dim} exceeds the dense budget {MAX_FIELD_DIM}")
    mat = field_covariance_matrix(u_grid, t_grid, abs_err)
    mat = 0.5 * (mat + mat.T)
    jit = max(jitter, 1e-10)
    while True:
        try:
            chol = np.linalg.cholesky(mat + jit * np.eye(dim))
            break
        except np.linalg.LinAlgError:
            jit *= 10.0
            if jit > 1e-6:
                min_eig = float(np.linalg.eigvalsh(mat)[0])
                raise NonPsdError(
                    f"Cholesky failed at max jitter 1e-6; min eigenvalue {min_eig:.3e}",
                    min_eigenvalue=min_eig,
                ) from None
    z = rng.generator().standard_normal((dim, n_draws))
    return (chol @ z).T.reshape(n_draws, u_grid.size, t_grid.n)


def field_vs_flow_check(n_paths: int, u: float, rng: RngStream,
                        grid: TimeGrid | None = None,
                        lags=(0.0, 0.5, 1.0, 2.0)) -> dict:
    """Monte Carlo check that the spectral flow realizes the field covariance.

    Samples stationary paths, pushes them through the flow, and compares
    the empirical E[w(t0) * (flow_u w)(t0 + lag)] at the window center
    against the quadrature value c(lag, -u).  Returns a report with the
    worst absolute deviation and its standard-error budget.
    """
    if n_paths < 100:
        raise ValueError("need at least 100 paths")
    if grid is None:
        grid = TimeGrid(-30.0, 0.05, 1201)
    base = sample_ou_batch(grid, rng, n_paths)
    plan = FlowPlan.for_grid(grid)
    flowed = apply_flow_batch(base, grid, u, plan)
    j0 = grid.index_of(round((grid.t_start + grid.t_end) / 2 / grid.dt) * grid.dt)
    rows = []
    worst = 0.0
    for lag in lags:
        jl = j0 + int(round(lag / grid.dt))
        emp = base[:, j0] * flowed[:, jl]
        mean = float(np.mean(emp))
        se = float(np.std(emp, ddof=1) / math.sqrt(n_paths))
        quadrature = cov(lag, -u)
        dev = abs(mean - quadrature)
        worst = max(worst, dev)
        rows.append({
            "lag": float(lag),
            "empirical": mean,
            "std_err": se,
            "quadrature": quadrature,
            "z_score": dev / se if se > 0 else float("inf"),
        })
    return {
        "u": u,
        "n_paths": n_paths,
        "rows": rows,
        "max_abs_deviation": worst,
        "max_z_score": max(r["z_score"] for r in rows),
    }
