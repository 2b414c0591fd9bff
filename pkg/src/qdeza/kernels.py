"""Hot-kernel dispatch: the compiled extension when available, numpy
fallbacks otherwise.  Both implementations are kept behaviorally
identical (tests compare them; benchmarks/bench_kernels.py times them).
"""
from __future__ import annotations

import numpy as np

try:
    from . import _fastcore

    _HAVE_EXT = True
except ImportError:  # pure-python install or failed build
    _fastcore = None
    _HAVE_EXT = False


def backend() -> str:
    return "cython" if _HAVE_EXT else "python"


# ---------------------------------------------------------------------------
# GL(v,2) setwise-stabilizer sweep


def _gl2_count_py(v, tgt_a, tgt_b, pair_lid, in_target, first_rows):
    npts = (1 << v) - 1
    pair_lid = pair_lid.reshape(1 << v, 1 << v)
    batch: list[tuple] = []
    stab = 0
    BATCH = 1 << 17

    def flush():
        nonlocal stab
        if not batch:
            return
        rows_arr = np.array(batch, dtype=np.int64)
        batch.clear()
        img = np.zeros((len(rows_arr), npts + 1), dtype=np.int64)
        for p in range(1, npts + 1):
            lsb = p & (-p)
            t = lsb.bit_length() - 1
            img[:, p] = img[:, p ^ lsb] ^ rows_arr[:, v - 1 - t]
        ok = np.ones(len(rows_arr), dtype=bool)
        for a, b in zip(tgt_a, tgt_b):
            lid = pair_lid[img[:, a], img[:, b]]
            ok &= in_target[lid].astype(bool)
        stab += int(ok.sum())

    def rec(depth, span, rows):
        if depth == v:
            batch.append(tuple(rows))
            if len(batch) >= BATCH:
                flush()
            return
        for r in range(1, npts + 1):
            if r in span:
                continue
            rows.append(r)
            rec(depth + 1, span | {x ^ r for x in span}, rows)
            rows.pop()

    for r0 in first_rows:
        r0 = int(r0)
        rec(1, {0, r0}, [r0])
    flush()
    return stab


def gl2_stabilizer_count(
    v: int,
    target_pairs,
    pair_lid: np.ndarray,
    in_target: np.ndarray,
    first_rows=None,
) -> int:
    """Count matrices of GL(v,2) whose induced line permutation fixes the
    target line set.  ``target_pairs`` lists one basis point pair per
    target line; ``pair_lid`` maps (a << v) | b to a line id; the sweep
    can be partitioned by restricting ``first_rows``."""
    npts = (1 << v) - 1
    if first_rows is None:
        first_rows = np.arange(1, npts + 1, dtype=np.int64)
    else:
        first_rows = np.asarray(first_rows, dtype=np.int64)
    tgt = np.asarray(target_pairs, dtype=np.int64).reshape(-1, 2)
    tgt_a = np.ascontiguousarray(tgt[:, 0])
    tgt_b = np.ascontiguousarray(tgt[:, 1])
    pair_lid = np.ascontiguousarray(pair_lid.reshape(-1), dtype=np.int16)
    in_target = np.ascontiguousarray(in_target, dtype=np.uint8)
    if _HAVE_EXT:
        return _fastcore.gl2_stabilizer_count(
            v, tgt_a, tgt_b, pair_lid, in_target, np.ascontiguousarray(first_rows)
        )
    return _gl2_count_py(v, tgt_a, tgt_b, pair_lid, in_target, first_rows)


# ---------------------------------------------------------------------------
# batched line-permutation application (orbit BFS step)


def apply_line_perm_sorted(states: np.ndarray, perm: np.ndarray) -> np.ndarray:
    """Apply ``perm`` elementwise to every row of ``states`` and sort
    each row; rows are line-id tuples of a fixed size."""
    states = np.ascontiguousarray(states, dtype=np.uint8)
    perm = np.ascontiguousarray(perm, dtype=np.uint8)
    if _HAVE_EXT:
        return _fastcore.apply_line_perm_sorted(states, perm)
    return np.sort(perm[states], axis=1)
