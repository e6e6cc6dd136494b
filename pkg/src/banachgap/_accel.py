"""Acceleration mode selection.

Hot kernels exist in two variants: numba-jitted loops and vectorized numpy.
The jitted path is the default whenever numba imports; setting the
environment variable ``BANACHGAP_NO_NUMBA`` to a truthy value (``1``,
``true``, ``yes``, ``on``) forces the pure-numpy fallback.  The flag is
read once at import time.
"""

from __future__ import annotations

import os

ENV_FLAG = "BANACHGAP_NO_NUMBA"


def _flag_set() -> bool:
    return os.environ.get(ENV_FLAG, "").strip().lower() in {"1", "true", "yes", "on"}


try:
    if _flag_set():
        raise ImportError("numba disabled via %s" % ENV_FLAG)
    from numba import njit  # noqa: F401

    NUMBA_ACTIVE = True
except ImportError:
    NUMBA_ACTIVE = False

    def njit(*args, **kwargs):  # type: ignore[misc]
        """No-op @njit stand-in so kernel modules import either way."""
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def wrap(fn):
            return fn

        return wrap


def active_mode() -> str:
    return "numba" if NUMBA_ACTIVE else "numpy"
