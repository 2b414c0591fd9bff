# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: GL(v,2) setwise-stabilizer sweep and batched
line-permutation application for orbit enumeration."""

import numpy as np

cimport cython
from libc.stdint cimport int16_t, int64_t, uint8_t, uint64_t


cdef inline uint64_t _expand_span(uint64_t mask, int r) nogil:
    cdef uint64_t out = mask
    cdef uint64_t m = mask
    cdef int s
    while m:
        s = 0
        while not (m >> s) & 1:
            s += 1
        m &= m - 1
        out |= (<uint64_t>1) << (s ^ r)
    return out


cdef int64_t _dfs(
    int depth,
    int v,
    int npts,
    uint64_t span,
    int* rows,
    int* img,
    const int64_t* tgt_a,
    const int64_t* tgt_b,
    int n_target,
    const int16_t* pair_lid,
    const uint8_t* in_target,
) nogil:
    cdef int64_t count = 0
    cdef int r, p, lsb, t, i, ia, ib
    cdef int16_t lid
    cdef bint ok
    for r in range(1, npts + 1):
        if (span >> r) & 1:
            continue
        rows[depth] = r
        if depth == v - 1:
            # images of all points via subset-XOR dynamic programming
            img[0] = 0
            for p in range(1, npts + 1):
                lsb = p & (-p)
                t = 0
                while not (lsb >> t) & 1:
                    t += 1
                img[p] = img[p ^ lsb] ^ rows[v - 1 - t]
            ok = True
            for i in range(n_target):
                ia = img[tgt_a[i]]
                ib = img[tgt_b[i]]
                lid = pair_lid[(ia << v) | ib]
                if not in_target[lid]:
                    ok = False
                    break
            if ok:
                count += 1
        else:
            count += _dfs(
                depth + 1, v, npts, _expand_span(span, r), rows, img,
                tgt_a, tgt_b, n_target, pair_lid, in_target,
            )
    return count


def gl2_stabilizer_count(
    int v,
    int64_t[::1] tgt_a not None,
    int64_t[::1] tgt_b not None,
    int16_t[::1] pair_lid not None,
    uint8_t[::1] in_target not None,
    int64_t[::1] first_rows not None,
):
    """Count invertible v x v GF(2) matrices (first row restricted to
    ``first_rows``) mapping the target line set onto itself."""
    if v > 6:
        raise ValueError("kernel supports v <= 6")
    cdef int npts = (1 << v) - 1
    cdef int rows[8]
    cdef int img[128]
    cdef int64_t total = 0
    cdef int64_t r0
    cdef uint64_t span0
    cdef int n_target = tgt_a.shape[0]
    cdef Py_ssize_t i
    with nogil:
        for i in range(first_rows.shape[0]):
            r0 = first_rows[i]
            rows[0] = <int>r0
            span0 = _expand_span(<uint64_t>1, <int>r0)
            total += _dfs(
                1, v, npts, span0, rows, img,
                &tgt_a[0], &tgt_b[0], n_target, &pair_lid[0], &in_target[0],
            )
    return int(total)


def apply_line_perm_sorted(uint8_t[:, ::1] states not None, uint8_t[::1] perm not None):
    """Row-wise: apply a line permutation to each id and re-sort the row."""
    cdef Py_ssize_t n = states.shape[0]
    cdef Py_ssize_t k = states.shape[1]
    out_arr = np.empty((n, k), dtype=np.uint8)
    cdef uint8_t[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, m
    cdef uint8_t val
    with nogil:
        for i in range(n):
            for j in range(k):
                val = perm[states[i, j]]
                m = j
                while m > 0 and out[i, m - 1] > val:
                    out[i, m] = out[i, m - 1]
                    m -= 1
                out[i, m] = val
    return out_arr
