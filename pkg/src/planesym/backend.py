"""Kernel backend selection.

The hot inner loops (pattern rendering, isometry mismatch scoring, candidate
scans) exist twice: a numba @njit implementation and a pure-numpy fallback
with identical semantics.  Selection order:

  PLANESYM_BACKEND=numba   force numba (ImportError if unavailable)
  PLANESYM_BACKEND=numpy   force the pure-numpy path
  unset / auto             numba when importable, else numpy

Both paths are deterministic; per-pixel arithmetic matches to float64
rounding (summation order differs, so cross-backend equality is ~1e-9,
not bitwise).
"""

from __future__ import annotations

import os
from types import ModuleType

_ENV_VAR = "PLANESYM_BACKEND"
_cached: ModuleType | None = None
_cached_name: str | None = None


def backend_name() -> str:
    get_backend()
    return _cached_name  # type: ignore[return-value]


def get_backend() -> ModuleType:
    """Return the kernel module for the configured backend (cached)."""
    global _cached, _cached_name
    if _cached is not None:
        return _cached
    choice = os.environ.get(_ENV_VAR, "auto").lower()
    if choice not in ("auto", "numba", "numpy"):
        raise ValueError(f"{_ENV_VAR} must be auto|numba|numpy, got {choice!r}")
    if choice in ("auto", "numba"):
        try:
            from . import _kernels_numba as mod
            _cached, _cached_name = mod, "numba"
            return mod
        except ImportError:
            if choice == "numba":
                raise
    from . import _kernels_numpy as mod
    _cached, _cached_name = mod, "numpy"
    return mod


def reset_backend() -> None:
    """Drop the cached backend so the env variable is re-read (tests)."""
    global _cached, _cached_name
    _cached = None
    _cached_name = None
