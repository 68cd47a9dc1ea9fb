"""Kernel backend selection: compiled extension when available, numpy fallback.

Set MIPSERIES_KERNELS=python (or =compiled) to force a backend; the default
is the compiled extension when the build produced one.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable

from . import _kernels_py

try:
    from . import _speedups
except ImportError:
    _speedups = None

HAVE_COMPILED = _speedups is not None


@dataclass(frozen=True)
class Kernels:
    name: str
    eliminate: Callable
    accumulate_rowsum: Callable
    subtract_scaled_columns: Callable


PYTHON_KERNELS = Kernels(
    "python",
    _kernels_py.eliminate,
    _kernels_py.accumulate_rowsum,
    _kernels_py.subtract_scaled_columns,
)

COMPILED_KERNELS = Kernels(
    "compiled",
    _speedups.eliminate,
    _speedups.accumulate_rowsum,
    _speedups.subtract_scaled_columns,
) if HAVE_COMPILED else None


def get_kernels(name: str | None = None) -> Kernels:
    """Resolve a backend by name ('python', 'compiled', 'auto' or None)."""
    if name is None:
        name = os.environ.get("MIPSERIES_KERNELS", "auto")
    if name == "auto":
        return COMPILED_KERNELS if HAVE_COMPILED else PYTHON_KERNELS
    if name == "python":
        return PYTHON_KERNELS
    if name == "compiled":
        if not HAVE_COMPILED:
            raise RuntimeError("compiled kernels requested but the extension is not built")
        return COMPILED_KERNELS
    raise ValueError(f"unknown kernel backend {name!r}")
