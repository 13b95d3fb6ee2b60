# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled alignment kernels. Must stay semantically identical to
codemix.metrics._pykernels; the test suite runs both."""

import array as _array

BACKEND_NAME = "cython"


def lcs_length_ids(long long[::1] a, long long[::1] b):
    cdef Py_ssize_t la = a.shape[0]
    cdef Py_ssize_t lb = b.shape[0]
    if la == 0 or lb == 0:
        return 0
    row_obj = _array.array("q", bytes(8 * (lb + 1)))
    cdef long long[::1] row = row_obj
    cdef Py_ssize_t i, j
    cdef long long x, prev_diag, prev_row
    for i in range(la):
        x = a[i]
        prev_diag = 0
        for j in range(1, lb + 1):
            prev_row = row[j]
            if x == b[j - 1]:
                row[j] = prev_diag + 1
            elif row[j - 1] > row[j]:
                row[j] = row[j - 1]
            prev_diag = prev_row
    return row[lb]


def greedy_align_ids(long long[::1] hyp_keys, long long[::1] ref_keys,
                     Py_ssize_t n_stages, Py_ssize_t m, Py_ssize_t n):
    if m == 0 or n == 0:
        return 0, 0
    aligned_obj = _array.array("q", [-1]) * m
    taken_obj = _array.array("b", bytes(n))
    cdef long long[::1] aligned = aligned_obj
    cdef signed char[::1] taken = taken_obj
    cdef Py_ssize_t s, i, j, h_off, r_off
    cdef long long key
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
                if taken[j] == 0 and ref_keys[r_off + j] == key:
                    aligned[i] = j
                    taken[j] = 1
                    break
    cdef long long matches = 0
    cdef long long chunks = 0
    cdef long long prev_i = -2
    cdef long long prev_j = -2
    for i in range(m):
        j = aligned[i]
        if j < 0:
            continue
        matches += 1
        if i != prev_i + 1 or j != prev_j + 1:
            chunks += 1
        prev_i = i
        prev_j = <long long> j
    return matches, chunks
