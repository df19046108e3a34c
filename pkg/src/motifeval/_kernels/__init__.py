"""Alignment kernels with a compiled fast path.

The Cython extension is used when available; setting the environment
variable ``MOTIFEVAL_PURE_PYTHON=1`` forces the numpy fallback. Both
implementations share one contract and are cross-checked in the test
suite; ``benchmarks/bench_kernels.py`` compares their speed.
"""

import os

from . import _kabsch_py

if os.environ.get("MOTIFEVAL_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kabsch_py
    KERNEL_BACKEND = "python"
else:
    try:
        from . import _kabsch_cy as _impl
        KERNEL_BACKEND = "cython"
    except ImportError:
        _impl = _kabsch_py
        KERNEL_BACKEND = "python"

superpose = _impl.superpose
aligned_sq_dists = _impl.aligned_sq_dists
tm_like_score = _impl.tm_like_score
tm_like_matrix = _impl.tm_like_matrix


def kernel_backend():
    """Name of the active implementation: "cython" or "python"."""
    return KERNEL_BACKEND
