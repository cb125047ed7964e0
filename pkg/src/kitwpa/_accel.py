"""Numba switch.

Set ``KITWPA_DISABLE_NUMBA=1`` to run every kernel on its pure-numpy path.
The flag is read once, at import time.
"""

import os

_FLAG = os.environ.get("KITWPA_DISABLE_NUMBA", "").strip().lower()

try:  # pragma: no cover - exercised implicitly by whichever path is installed
    import numba
except ImportError:  # pragma: no cover
    numba = None

USE_NUMBA = numba is not None and _FLAG not in {"1", "true", "yes", "on"}

NUMBA_OPTIONS = {"nogil": True, "cache": True, "fastmath": False}


def njit(func):
    """Compile ``func`` with numba when available, else return it unchanged."""
    if numba is None:
        return func
    return numba.njit(**NUMBA_OPTIONS)(func)
