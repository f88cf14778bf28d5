"""Kernel backend selection.

LATTICE_SELECT_BACKEND=numba (default) uses the jitted kernels;
LATTICE_SELECT_BACKEND=numpy forces the pure-numpy fallback. If numba is
missing or fails to import, the fallback is selected automatically with a
warning.
"""

from __future__ import annotations

import os
import warnings

_ENV_VAR = "LATTICE_SELECT_BACKEND"
_kernels = None


def load_backend(name: str):
    """Import a kernel module by backend name ('numba' or 'numpy')."""
    if name == "numpy":
        from . import _kernels_numpy

        return _kernels_numpy
    if name == "numba":
        from . import _kernels_numba

        return _kernels_numba
    raise ValueError(f"unknown kernel backend {name!r} (expected 'numba' or 'numpy')")


def kernels():
    """The process-wide kernel module, selected on first use."""
    global _kernels
    if _kernels is None:
        choice = os.environ.get(_ENV_VAR, "numba").lower()
        if choice not in ("numba", "numpy"):
            raise ValueError(f"{_ENV_VAR}={choice!r}: expected 'numba' or 'numpy'")
        if choice == "numba":
            try:
                _kernels = load_backend("numba")
            except Exception as exc:  # pragma: no cover - depends on environment
                warnings.warn(f"numba backend unavailable ({exc}); using numpy fallback")
                _kernels = load_backend("numpy")
        else:
            _kernels = load_backend("numpy")
    return _kernels


def backend_name() -> str:
    return kernels().BACKEND_NAME


def warmup() -> str:
    """Force kernel compilation/cache-load now; returns the backend name."""
    k = kernels()
    k.warmup()
    return k.BACKEND_NAME
