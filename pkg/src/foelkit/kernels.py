"""Kernel backend selection.

The compiled extension is used when it was built and ``FOELKIT_PURE_PYTHON``
is unset; otherwise the pure-Python module takes over with identical results.
"""

import os

from . import _kernels_py

if os.environ.get("FOELKIT_PURE_PYTHON"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

pair_strands = _impl.pair_strands
enumerate_hw_downs = _impl.enumerate_hw_downs
assemble_half = _impl.assemble_half

__all__ = ["BACKEND", "pair_strands", "enumerate_hw_downs", "assemble_half"]
