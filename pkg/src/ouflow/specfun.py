"""Special functions used by the transform kernels.

Laguerre polynomials and their derivatives (three-term recurrences),
the digamma function, Pochhammer symbols and the unit-modulus frequency
multiplier that generates the flow.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import PoleError

EULER_GAMMA = 0.5772156649015329


def laguerre(n, t):
    """Laguerre polynomial L_n(t) by the stable three-term recurrence.

    Accepts scalar or array ``t``; n >= 0.
    """
    if n < 0:
        raise ValueError(f"Laguerre index must be >= 0, got {n}")
    t = np.asarray(t, dtype=np.float64)
    prev = np.ones_like(t)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 - t
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 - t) * cur - k * prev) / (k + 1)
    return cur if cur.ndim else float(cur)


def laguerre_deriv(n, t):
    """L'_n(t) from the recurrence L'_{k+1} = L'_k - L_k with L'_0 = 0."""
    if n < 0:
        raise ValueError(f"Laguerre index must be >= 0, got {n}")
    t = np.asarray(t, dtype=np.float64)
    deriv = np.zeros_like(t)
    lag_prev = np.ones_like(t)   # L_0
    lag_cur = 1.0 - t            # L_1
    for k in range(n):
        lk = lag_prev if k == 0 else lag_cur
        if k >= 1:
            lag_prev, lag_cur = lag_cur, ((2 * k + 1 - t) * lag_cur
                                          - k * lag_prev) / (k + 1)
            lk = lag_prev
        deriv = deriv - lk
    return deriv if deriv.ndim else float(deriv)


def digamma(x):
    """Logarithmic derivative of the gamma function.

    Upward recurrence to x >= 8, then the asymptotic series through the
    x**-14 term; reflection for x < 0.  Raises PoleError at nonpositive
    integers.
    """
    x = float(x)
    if x <= 0.0 and x == math.floor(x):
        raise PoleError(f"digamma pole at {x}")
    if x < 0.0:
        # psi(x) = psi(1-x) - pi*cot(pi*x); reduce the cot argument mod 1
        frac = x - math.floor(x)
        return digamma(1.0 - x) - math.pi / math.tan(math.pi * frac)
    acc = 0.0
    while x < 8.0:
        acc -= 1.0 / x
        x += 1.0
    r = 1.0 / x
    r2 = r * r
    tail = r2 * (1.0 / 12.0 - r2 * (1.0 / 120.0 - r2 * (1.0 / 252.0
           - r2 * (1.0 / 240.0 - r2 * (1.0 / 132.0 - r2 * (691.0 / 32760.0
           - r2 * (1.0 / 12.0)))))))
    return acc + math.log(x) - 0.5 * r - tail


def pochhammer(a, k):
    """Rising factorial a(a+1)...(a+k-1); the empty product is 1."""
    if k < 0:
        raise ValueError(f"Pochhammer order must be >= 0, got {k}")
    out = 1.0
    for j in range(k):
        out *= a + j
    return out


def multiplier_eval(u, lam):
    """Frequency multiplier exp(-2i*u*arctan(2*lam)) of the flow.

    Has unit modulus for every real (u, lam); u = 1 reduces to the
    rational symbol (1 - 2i*lam)/(1 + 2i*lam) of the single-step
    transform.  Vectorized over ``lam``.
    """
    lam = np.asarray(lam, dtype=np.float64)
    out = np.exp(-2j * u * np.arctan(2.0 * lam))
    return out if out.ndim else complex(out)


@dataclass(frozen=True)
class Multiplier:
    """The flow multiplier at a fixed parameter, as a callable symbol."""

    u: float

    def __call__(self, lam):
        return multiplier_eval(self.u, lam)
