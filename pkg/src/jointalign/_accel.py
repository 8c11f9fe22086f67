"""Optional numba acceleration.

Kernels are written once as plain Python over numpy arrays. When numba is
importable and ``JOINTALIGN_DISABLE_NUMBA`` is unset (or ``0``), they are
compiled with ``@njit``; otherwise the same functions run interpreted. Both
paths produce identical results because kernels draw randomness from an
in-kernel integer generator rather than from numba's RNG.
"""

import os

_FLAG = "JOINTALIGN_DISABLE_NUMBA"


def _numba_requested():
    return os.environ.get(_FLAG, "0").strip().lower() in ("", "0", "false", "no")


try:
    if not _numba_requested():
        raise ImportError("numba disabled by " + _FLAG)
    from numba import njit as _njit

    USING_NUMBA = True
except ImportError:
    _njit = None
    USING_NUMBA = False


def jit(func):
    """Compile ``func`` with ``njit(cache=True)`` if numba is active."""
    if USING_NUMBA:
        return _njit(cache=True)(func)
    return func


def backend():
    return "numba" if USING_NUMBA else "python"
