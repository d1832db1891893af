"""Kernel backend selection.

The compiled extension is preferred; the pure-Python module is a drop-in
replacement.  ``MAXENT_TSP_KERNELS=python`` forces the fallback (used by
the benchmark and the backend-equivalence tests).
"""

from __future__ import annotations

import os

from . import _kernels_py

try:
    from . import _kernels  # type: ignore[attr-defined]
except ImportError:  # pragma: no cover - depends on build environment
    _kernels = None

BACKEND = "compiled" if _kernels is not None else "python"


def kernels(name: str | None = None):
    """Return the kernel module: compiled if available, else pure Python."""
    if name is None:
        name = os.environ.get("MAXENT_TSP_KERNELS", BACKEND)
    if name == "python":
        return _kernels_py
    if name == "compiled":
        if _kernels is None:
            raise RuntimeError("compiled kernels requested but not built")
        return _kernels
    raise ValueError(f"unknown kernel backend {name!r}")


def active_backend() -> str:
    name = os.environ.get("MAXENT_TSP_KERNELS")
    return name if name in ("python", "compiled") else BACKEND
