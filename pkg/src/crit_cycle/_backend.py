"""Backend selection for the hot kernels.

Numba is used when it is importable and ``CRIT_CYCLE_NUMBA`` is not set to a
false value (``0``, ``false``, ``no``, ``off``). The pure-numpy kernels are
always importable and produce the same results to rounding.
"""
import os

_FALSE = {"0", "false", "no", "off"}


def _numba_requested():
    return os.environ.get("CRIT_CYCLE_NUMBA", "1").strip().lower() not in _FALSE


try:
    import numba as _numba
    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None
    NUMBA_AVAILABLE = False

USE_NUMBA = NUMBA_AVAILABLE and _numba_requested()


def njit(*args, **kwargs):
    """``numba.njit`` when available, otherwise an identity decorator."""
    if NUMBA_AVAILABLE:
        return _numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
