"""Hot-loop kernels, compiled when available.

The Cython extension ``bibliopipe._core`` is used if it imports; otherwise
the pure-Python module ``bibliopipe._pycore`` is used. Setting
``BIBLIOPIPE_PURE_PYTHON=1`` forces the fallback.
"""
from __future__ import annotations

import os

from . import _pycore

if os.environ.get("BIBLIOPIPE_PURE_PYTHON"):
    _impl = _pycore
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _pycore

BACKEND = "compiled" if _impl is not _pycore else "python"

fr_layout = _impl.fr_layout
kth_neighbor_distances = _impl.kth_neighbor_distances
dbscan_labels = _impl.dbscan_labels
assign_labels = _impl.assign_labels


def backend(name: str):
    """Return the kernel module named ``"compiled"`` or ``"python"``."""
    if name == "python":
        return _pycore
    if name == "compiled":
        from . import _core  # type: ignore[attr-defined]

        return _core
    raise ValueError(f"unknown kernel backend {name!r}")
