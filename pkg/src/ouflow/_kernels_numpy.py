"""Pure-numpy build of the hot kernels.

Same contracts as ``_kernels_numba``:

* ``kernel_series_batch`` evaluates the smooth-part prefactor of the
  fractional step kernel (power series with digamma brackets below the
  switch radius, large-argument expansion above it).  Returns the value
  with the 1/x pole already removed.
* ``correlate_valid`` computes the sliding dot product
  ``y[i] = sum_m taps[m] * x[i + m]`` (length ``len(x) - len(taps) + 1``),
  here via zero-padded real FFTs.
* ``ar1_batch`` runs the exact stationary AR(1) recursion.
"""

import numpy as np

EULER_GAMMA = 0.5772156649015329


def kernel_series_batch(x, u, dig_pos, dig_neg, inv_g_pos, inv_g_neg,
                        c_over, switch, cap):
    """Evaluate psi_s(x) = psi(x) - c_over/x for the fractional kernel.

    ``dig_pos``/``dig_neg`` seed the digamma recurrence at 1 -/+ u,
    ``inv_g_pos``/``inv_g_neg`` are 1/Gamma(+/-u), ``c_over`` is
    sin(pi*u)/pi.  ``x`` must be nonzero.  Returns (values, flags);
    flag 1 marks a series that hit the term cap without converging.
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    out = np.zeros(n)
    flags = np.zeros(n, dtype=np.int64)
    sgn = np.where(x > 0, 1.0, -1.0)
    ax = np.abs(x)

    ser = ax < switch
    if np.any(ser):
        xs = ax[ser]
        ss = sgn[ser]
        a = 1.0 - u * ss
        dig_a = np.where(ss > 0, dig_pos, dig_neg)
        dig12 = (1.0 - 2.0 * EULER_GAMMA)  # psi(1) + psi(2) at k = 0
        lx = np.log(xs)
        coef = np.ones_like(xs)
        acc = np.zeros_like(xs)
        active = np.ones(xs.size, dtype=bool)
        hit_cap = np.ones(xs.size, dtype=bool)
        for k in range(cap):
            term = coef * (dig_a - dig12 + lx)
            acc = np.where(active, acc + term, acc)
            if k >= 4:
                done = np.abs(term) <= 1e-16 * (1.0 + np.abs(acc))
                newly = active & done
                hit_cap[newly] = False
                active &= ~done
                if not active.any():
                    break
            ak = a + k
            coef *= ak * xs / ((k + 1.0) * (k + 2.0))
            dig_a = dig_a + 1.0 / ak
            dig12 += 1.0 / (1.0 + k) + 1.0 / (2.0 + k)
        pref = -u * c_over  # -u * sin(pi u) / pi
        vals = pref * acc
        out[ser] = vals
        fl = np.zeros(xs.size, dtype=np.int64)
        fl[active & hit_cap] = 1
        flags[ser] = fl

    big = ~ser
    if np.any(big):
        xs = ax[big]
        ss = sgn[big]
        us = u * ss
        a = 1.0 - us
        acc = np.zeros_like(xs)
        term = np.ones_like(xs)
        prev = np.full_like(xs, np.inf)
        stopped = np.zeros(xs.size, dtype=bool)
        for k in range(60):
            grow = np.abs(term) > prev
            stopped |= grow
            take = ~stopped
            acc = np.where(take, acc + term, acc)
            prev = np.where(take, np.abs(term), prev)
            term = term * (-(a + k) * (a - 1.0 + k) / ((k + 1.0) * xs))
            tiny = np.abs(term) < 1e-18 * np.abs(acc)
            if np.all(stopped | tiny):
                acc = np.where(~stopped & tiny, acc + 0.0, acc)
                break
        inv_g = np.where(ss > 0, inv_g_pos, inv_g_neg)
        psi = acc * np.exp((us - 1.0) * np.log(xs)) * inv_g
        out[big] = psi - c_over * ss / xs
    return out, flags


def _next_pow2(m):
    p = 1
    while p < m:
        p <<= 1
    return p


def correlate_valid(x, taps):
    """y[i] = sum_m taps[m] * x[i+m], via padded real FFTs."""
    x = np.asarray(x, dtype=np.float64)
    taps = np.asarray(taps, dtype=np.float64)
    n, m = x.size, taps.size
    if m > n:
        raise ValueError("taps longer than signal")
    L = _next_pow2(n + m)
    conv = np.fft.irfft(np.fft.rfft(x, L) * np.fft.rfft(taps[::-1], L), L)
    return conv[m - 1:n]


def ar1_batch(x0, innovations, rho, sig):
    """Exact stationary AR(1): out[:, j+1] = rho*out[:, j] + sig*innov[:, j]."""
    x0 = np.asarray(x0, dtype=np.float64)
    innovations = np.asarray(innovations, dtype=np.float64)
    b, nm1 = innovations.shape
    out = np.empty((b, nm1 + 1))
    out[:, 0] = x0
    for j in range(nm1):
        out[:, j + 1] = rho * out[:, j] + sig * innovations[:, j]
    return out
