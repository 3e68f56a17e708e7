"""Kernel backend selection.

Hot loops are written once in nopython style and compiled with numba when it
is available. Setting the environment variable FIXSAT_BACKEND=python skips
compilation and runs the same function bodies interpreted, which is the
pure-numpy fallback path. benchmarks/backend_bench.py compares the two.
"""

import os

try:
    import numba
    HAVE_NUMBA = True
except ImportError:
    numba = None
    HAVE_NUMBA = False

_requested = os.environ.get("FIXSAT_BACKEND", "").strip().lower()
USE_NUMBA = HAVE_NUMBA and _requested not in ("python", "numpy", "interpreted")


def kernel(func):
    """Compile func with numba when the numba backend is active.

    Either way the undecorated function stays reachable as .py_func so both
    paths can be exercised side by side.
    """
    if USE_NUMBA:
        return numba.njit(cache=True)(func)
    func.py_func = func
    return func


def backend_name() -> str:
    return "numba" if USE_NUMBA else "python"
