"""Runtime selection of the accelerated kernels.

The hot numeric loops (kernel-series evaluation, direct correlation,
AR(1) recursion) exist twice: a numba @njit build and a pure-numpy
build with identical signatures and results.  The environment variable
``OUFLOW_BACKEND`` picks one:

    OUFLOW_BACKEND=numba   require numba (error if unavailable)
    OUFLOW_BACKEND=numpy   force the pure-numpy fallback
    unset                  numba if importable, else numpy

``benchmarks/bench_backends.py`` compares the two builds directly.
"""

import os

_requested = os.environ.get("OUFLOW_BACKEND", "").strip().lower()
if _requested not in ("", "numba", "numpy"):
    raise RuntimeError(
        f"OUFLOW_BACKEND must be 'numba' or 'numpy', got {_requested!r}"
    )

if _requested == "numpy":
    from . import _kernels_numpy as kernels

    USING_NUMBA = False
else:
    try:
        from . import _kernels_numba as kernels

        USING_NUMBA = True
    except ImportError:
        if _requested == "numba":
            raise RuntimeError(
                "OUFLOW_BACKEND=numba but numba could not be imported"
            )
        from . import _kernels_numpy as kernels

        USING_NUMBA = False


def backend_name() -> str:
    return "numba" if USING_NUMBA else "numpy"
