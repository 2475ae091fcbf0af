"""Optional numba acceleration.

Set ``CURVOP_NUMBA=0`` in the environment to force the pure-numpy kernels even
when numba is importable.  ``njit`` degrades to an identity decorator when
numba is missing or disabled, so kernels stay importable either way.
"""
import os

_flag = os.environ.get("CURVOP_NUMBA", "1").strip().lower()
_disabled = _flag in ("0", "false", "no", "off")

try:
    if _disabled:
        raise ImportError
    from numba import njit as _numba_njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


def njit(*args, **kwargs):
    if HAVE_NUMBA:
        kwargs.setdefault("cache", True)
        return _numba_njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f
