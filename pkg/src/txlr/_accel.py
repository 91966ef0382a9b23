"""Optional numba acceleration with a pure-numpy fallback.

Hot inner loops (Hankel gather/scatter, Poisson-disc dart throwing) have two
implementations: a numba ``@njit`` version and a plain numpy/python version.
The numba path is used when numba imports successfully, unless the
environment variable ``TXLR_DISABLE_NUMBA`` is set to a non-empty value
other than ``0``.  ``benchmarks/bench_kernels.py`` compares the two paths.
"""

import os


def numba_requested() -> bool:
    flag = os.environ.get("TXLR_DISABLE_NUMBA", "0")
    return flag in ("", "0")


def _probe() -> bool:
    if not numba_requested():
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


NUMBA_ENABLED = _probe()

if NUMBA_ENABLED:
    from numba import njit
else:
    def njit(*args, **kwargs):
        # signature-compatible no-op decorator
        if args and callable(args[0]):
            return args[0]
        return lambda func: func
