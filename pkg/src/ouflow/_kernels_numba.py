"""Numba build of the hot kernels. See _kernels_numpy for the contracts."""

import math

import numpy as np
from numba import njit

from . import _kernels_numpy

EULER_GAMMA = 0.5772156649015329


@njit(cache=True)
def _series_point(ax, lx, a, dig_a0, u, c_over, cap):
    # power series with digamma brackets; returns (value, converged)
    dig_a = dig_a0
    dig12 = 1.0 - 2.0 * EULER_GAMMA
    coef = 1.0
    acc = 0.0
    ok = False
    for k in range(cap):
        term = coef * (dig_a - dig12 + lx)
        acc += term
        if k >= 4 and abs(term) <= 1e-16 * (1.0 + abs(acc)):
            ok = True
            break
        ak = a + k
        coef *= ak * ax / ((k + 1.0) * (k + 2.0))
        dig_a += 1.0 / ak
        dig12 += 1.0 / (1.0 + k) + 1.0 / (2.0 + k)
    return (-u * c_over) * acc, ok


@njit(cache=True)
def _asym_point(ax, us, inv_g):
    a = 1.0 - us
    acc = 0.0
    term = 1.0
    prev = 1e308
    for k in range(60):
        if abs(term) > prev:
            break
        acc += term
        prev = abs(term)
        term *= -(a + k) * (a - 1.0 + k) / ((k + 1.0) * ax)
        if abs(term) < 1e-18 * abs(acc):
            acc += term
            break
    return acc * math.exp((us - 1.0) * math.log(ax)) * inv_g


@njit(cache=True)
def kernel_series_batch(x, u, dig_pos, dig_neg, inv_g_pos, inv_g_neg,
                        c_over, switch, cap):
    n = x.size
    out = np.zeros(n)
    flags = np.zeros(n, dtype=np.int64)
    for i in range(n):
        xi = x[i]
        s = 1.0 if xi > 0 else -1.0
        ax = abs(xi)
        if ax < switch:
            a = 1.0 - u * s
            dig_a0 = dig_pos if s > 0 else dig_neg
            val, ok = _series_point(ax, math.log(ax), a, dig_a0, u, c_over, cap)
            out[i] = val
            if not ok:
                flags[i] = 1
        else:
            inv_g = inv_g_pos if s > 0 else inv_g_neg
            psi = _asym_point(ax, u * s, inv_g)
            out[i] = psi - c_over * s / ax
    return out, flags


@njit(cache=True)
def correlate_direct(x, taps):
    n = x.size
    m = taps.size
    nout = n - m + 1
    out = np.empty(nout)
    for i in range(nout):
        acc = 0.0
        for k in range(m):
            acc += taps[k] * x[i + k]
        out[i] = acc
    return out


def correlate_valid(x, taps):
    # the jitted loop only wins for short tap arrays; the transform
    # kernels here carry thousands of taps, where the FFT route is
    # one to two orders of magnitude faster (see benchmarks)
    x = np.ascontiguousarray(x, dtype=np.float64)
    taps = np.ascontiguousarray(taps, dtype=np.float64)
    if taps.size > x.size:
        raise ValueError("taps longer than signal")
    if taps.size <= 128:
        return correlate_direct(x, taps)
    return _kernels_numpy.correlate_valid(x, taps)


@njit(cache=True)
def ar1_batch(x0, innovations, rho, sig):
    b = innovations.shape[0]
    nm1 = innovations.shape[1]
    out = np.empty((b, nm1 + 1))
    for ib in range(b):
        out[ib, 0] = x0[ib]
        prev = x0[ib]
        for j in range(nm1):
            prev = rho * prev + sig * innovations[ib, j]
            out[ib, j + 1] = prev
    return out
