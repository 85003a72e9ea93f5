"""Kernel backend selection.

Set ``EXDIV_DISABLE_NUMBA=1`` to route every kernel through its pure-numpy
path.  The flag is read once, at import time; numba being absent has the
same effect.
"""
import os

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda fn: fn


_FLAG = os.environ.get("EXDIV_DISABLE_NUMBA", "").strip().lower()

USE_NUMBA = HAVE_NUMBA and _FLAG not in ("1", "true", "yes", "on")

BACKEND = "numba" if USE_NUMBA else "numpy"
