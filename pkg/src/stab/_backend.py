"""Kernel backend selection.

Numba-compiled kernels are used when numba imports cleanly, unless the
environment variable STAB_NUMBA is set to "0" (or "false"/"off"), in which
case the pure-numpy fallbacks run instead.  The choice is read once at import.
"""
import os

_flag = os.environ.get("STAB_NUMBA", "1").strip().lower()
_wanted = _flag not in ("0", "false", "off", "no")

try:
    import numba  # noqa: F401
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba ships with the environment
    HAVE_NUMBA = False

USE_NUMBA = _wanted and HAVE_NUMBA


def njit(*args, **kwargs):
    """numba.njit when available, identity decorator otherwise."""
    if HAVE_NUMBA:
        from numba import njit as _njit
        kwargs.setdefault("cache", True)
        return _njit(*args, **kwargs)

    def wrap(fn):
        return fn

    if args and callable(args[0]):
        return args[0]
    return wrap


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
