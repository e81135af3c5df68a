"""Kernel backend selection.

The compiled ``_ckernels`` module is used when it imports; otherwise the
numpy kernels in ``_pykernels``. Setting ``QTRAP_BACKEND=python`` forces the
fallback.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _pykernels

try:
    from . import _ckernels  # type: ignore[attr-defined]
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS: dict[str, ModuleType] = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels

_active: ModuleType = _BACKENDS.get(
    "python" if os.environ.get("QTRAP_BACKEND", "").lower() == "python" else "cython",
    _pykernels,
)


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def kernels() -> ModuleType:
    return _active


def backend_name() -> str:
    return _active.BACKEND


def set_backend(name: str) -> str:
    """Switch kernels process-wide; returns the previous backend name."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} not available; have {available_backends()}")
    prev = _active.BACKEND
    _active = _BACKENDS[name]
    return prev
