"""Kernel backend selection: compiled extension when available, else pure Python.

Set CODEMIX_PURE_PYTHON=1 to force the fallback (used by the benchmark and to
debug suspected extension issues).
"""

from __future__ import annotations

import os
from array import array
from typing import Sequence

from codemix.metrics import _pykernels

if os.environ.get("CODEMIX_PURE_PYTHON") == "1":
    _impl = _pykernels
else:
    try:
        from codemix.metrics import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pykernels

KERNEL_BACKEND: str = _impl.BACKEND_NAME
_COMPILED = KERNEL_BACKEND == "cython"


def lcs_length(a: Sequence[int], b: Sequence[int]) -> int:
    """LCS length over two int-id sequences."""
    if _COMPILED:
        return _impl.lcs_length_ids(array("q", a), array("q", b))
    return _impl.lcs_length_ids(a, b)


def greedy_align(hyp_stages: Sequence[Sequence[int]],
                 ref_stages: Sequence[Sequence[int]]) -> tuple[int, int]:
    """Greedy staged one-to-one alignment; returns (matches, chunks).

    ``hyp_stages[s][i]`` is the stage-s key of hypothesis token i (negative =
    unmatched at that stage); same layout for the reference side. All stages
    must cover the same token count on each side.
    """
    if len(hyp_stages) != len(ref_stages):
        raise ValueError("hyp and ref must have the same number of stages")
    n_stages = len(hyp_stages)
    m = len(hyp_stages[0]) if n_stages else 0
    n = len(ref_stages[0]) if n_stages else 0
    if any(len(s) != m for s in hyp_stages) or any(len(s) != n for s in ref_stages):
        raise ValueError("ragged stage key arrays")
    flat_h = [k for stage in hyp_stages for k in stage]
    flat_r = [k for stage in ref_stages for k in stage]
    if _COMPILED:
        return _impl.greedy_align_ids(array("q", flat_h), array("q", flat_r), n_stages, m, n)
    return _impl.greedy_align_ids(flat_h, flat_r, n_stages, m, n)
