"""Pure-Python fallback for the alignment kernels.

Semantics must match codemix.metrics._ckernels exactly; both are exercised by
the same test suite and the benchmark harness.
"""

from __future__ import annotations

BACKEND_NAME = "python"


def lcs_length_ids(a, b) -> int:
    """Length of the longest common subsequence of two int-id sequences.

    Rolling single-row DP; O(len(a)*len(b)) time, O(len(b)) space.
    """
    if not a or not b:
        return 0
    row = [0] * (len(b) + 1)
    for x in a:
        prev_diag = 0
        for j, y in enumerate(b, start=1):
            prev_row = row[j]
            if x == y:
                row[j] = prev_diag + 1
            elif row[j - 1] > row[j]:
                row[j] = row[j - 1]
            prev_diag = prev_row
    return row[len(b)]


def greedy_align_ids(hyp_keys, ref_keys, n_stages: int, m: int, n: int) -> tuple[int, int]:
    """Stage-wise greedy one-to-one alignment over flattened key arrays.

    ``hyp_keys`` holds n_stages*m ids (stage-major), ``ref_keys`` n_stages*n.
    A key < 0 never matches. Earlier stages claim tokens first; within a
    stage, hypothesis tokens are scanned left to right and each takes the
    leftmost unclaimed reference token with the same key.

    Returns (matches, chunks) where chunks counts maximal runs of matched
    hypothesis tokens whose reference positions advance by exactly 1.
    """
    aligned = [-1] * m
    taken = [False] * n
    for s in range(n_stages):
        h_off = s * m
        r_off = s * n
        for i in range(m):
            if aligned[i] >= 0:
                continue
            key = hyp_keys[h_off + i]
            if key < 0:
                continue
            for j in range(n):
                if not taken[j] and ref_keys[r_off + j] == key:
                    aligned[i] = j
                    taken[j] = True
                    break
    matches = 0
    chunks = 0
    prev_i = -2
    prev_j = -2
    for i in range(m):
        j = aligned[i]
        if j < 0:
            continue
        matches += 1
        if i != prev_i + 1 or j != prev_j + 1:
            chunks += 1
        prev_i = i
        prev_j = j
    return matches, chunks
