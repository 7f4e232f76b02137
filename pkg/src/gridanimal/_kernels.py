"""Kernel backend selection.

The compiled extension is used when it imports; setting
``GRIDANIMAL_PURE=1`` forces the pure-Python fallback.
"""
from __future__ import annotations

import importlib
import os

from . import _pykernels


def load(name: str):
    """Return the kernel module for backend ``"cython"`` or ``"python"``."""
    if name == "python":
        return _pykernels
    if name == "cython":
        return importlib.import_module("gridanimal._ckernels")
    raise ValueError(f"unknown backend {name!r}")


def available() -> list[str]:
    out = ["python"]
    try:
        load("cython")
        out.insert(0, "cython")
    except ImportError:
        pass
    return out


if os.environ.get("GRIDANIMAL_PURE", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        _impl = load("cython")
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

vertex_masks = _impl.vertex_masks
boundary_counts = _impl.boundary_counts
toggle_scan = _impl.toggle_scan
edge_search = _impl.edge_search

FOUND, EXHAUSTED, NODE_LIMIT, TIMED_OUT = (
    _pykernels.FOUND,
    _pykernels.EXHAUSTED,
    _pykernels.NODE_LIMIT,
    _pykernels.TIMED_OUT,
)
