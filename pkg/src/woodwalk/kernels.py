"""Kernel selection.

The compiled module is used when it imports; set ``WOODWALK_PURE_PYTHON=1``
to force the numpy fallback.  Both give identical results.
"""

from __future__ import annotations

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("WOODWALK_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on the build
        _impl = _pykernels

chain_letters = _impl.chain_letters
rejection_accepts = _impl.rejection_accepts
green_run = _impl.green_run
sigma_sequence = _impl.sigma_sequence
region_counts = _impl.region_counts
segment_violations = _impl.segment_violations

__all__ = ["BACKEND", "chain_letters", "rejection_accepts", "green_run", "sigma_sequence",
           "region_counts", "segment_violations"]
