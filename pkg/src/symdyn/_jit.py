"""Optional numba acceleration.

Hot kernels are written once in a numba-compatible subset of Python and
decorated with :func:`njit`.  When numba is missing, or the environment
variable ``SYMDYN_NO_NUMBA`` is set to a non-empty value other than ``0``,
the decorator is the identity and the same source runs as plain numpy.
"""

import os

_flag = os.environ.get("SYMDYN_NO_NUMBA", "")
DISABLED = _flag not in ("", "0")

try:
    if DISABLED:
        raise ImportError
    import numba as _numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    _numba = None
    HAVE_NUMBA = False


def njit(*args, **kwargs):
    """``numba.njit`` when acceleration is active, identity otherwise."""
    if HAVE_NUMBA:
        kwargs.setdefault("cache", True)
        return _numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda fn: fn


def backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"
