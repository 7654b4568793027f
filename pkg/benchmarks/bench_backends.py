#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Times the three hot paths (kernel-series evaluation, valid-mode
correlation, AR(1) recursion) in both builds and prints a table.
Run:  python benchmarks/bench_backends.py [--repeats 5]
"""

import argparse
import math
import time

import numpy as np

from ouflow import _kernels_numpy
from ouflow.specfun import digamma

try:
    from ouflow import _kernels_numba
except ImportError:
    _kernels_numba = None


def _series_args(u=0.6):
    return dict(
        u=u,
        dig_pos=digamma(1.0 - u),
        dig_neg=digamma(1.0 + u),
        inv_g_pos=1.0 / math.gamma(u),
        inv_g_neg=1.0 / math.gamma(-u),
        c_over=math.sin(math.pi * u) / math.pi,
        switch=22.0,
        cap=400,
    )


def bench(fn, repeats):
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    x_series = np.concatenate([np.linspace(1e-3, 60, 40000),
                               -np.linspace(1e-3, 60, 40000)])
    sargs = _series_args()
    sig = rng.standard_normal(40000)
    x0 = rng.standard_normal(256)
    innov = rng.standard_normal((256, 4000))
    rho, s = math.exp(-0.025), math.sqrt(-math.expm1(-0.05))

    cases = {
        "kernel_series (80k pts)": lambda k: k.kernel_series_batch(x_series, **sargs),
        "ar1 (256 x 4000 steps)": lambda k: k.ar1_batch(x0, innov, rho, s),
    }

    builds = [("numpy", _kernels_numpy)]
    if _kernels_numba is not None:
        for fn in cases.values():
            fn(_kernels_numba)  # JIT warmup
        builds.append(("numba", _kernels_numba))

    print(f"{'case':<28}" + "".join(f"{n:>12}" for n, _ in builds) + f"{'ratio':>9}")
    for label, fn in cases.items():
        times = [bench(lambda m=mod: fn(m), args.repeats) for _, mod in builds]
        row = f"{label:<28}" + "".join(f"{t * 1e3:>10.1f}ms" for t in times)
        if len(times) == 2 and times[1] > 0:
            row += f"{times[0] / times[1]:>8.1f}x"
        print(row)

    # correlation: jitted direct loop vs FFT, crossing over with tap count
    if _kernels_numba is not None:
        print("\ncorrelate_valid: direct loop (numba) vs padded FFT (numpy)")
        print(f"{'taps':>8}{'direct':>12}{'fft':>12}{'winner':>10}")
        for m in (64, 512, 8001):
            taps = rng.standard_normal(m)
            _kernels_numba.correlate_direct(sig, taps)
            t_dir = bench(lambda: _kernels_numba.correlate_direct(sig, taps),
                          args.repeats)
            t_fft = bench(lambda: _kernels_numpy.correlate_valid(sig, taps),
                          args.repeats)
            winner = "direct" if t_dir < t_fft else "fft"
            print(f"{m:>8}{t_dir * 1e3:>10.2f}ms{t_fft * 1e3:>10.2f}ms{winner:>10}")


if __name__ == "__main__":
    main()
