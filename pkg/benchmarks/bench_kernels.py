#!/usr/bin/env python3
"""Time the compiled kernels against the numpy fallbacks.

Run after an editable install:  python3 benchmarks/bench_kernels.py
"""
import time

import numpy as np

from qdeza import gf, hexagon, kernels
from qdeza.groups import _pair_line_table


def timeit(fn, *args, repeat=1):
    best = None
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return out, best


def gl_setup(v, lineset):
    lines, lid, table = _pair_line_table(v)
    in_target = np.zeros(len(lines), dtype=np.uint8)
    pairs = []
    for s in lineset:
        a, b = s.rows
        in_target[lid[tuple(sorted((a, b, a ^ b)))]] = 1
        pairs.append((a, b))
    tgt = np.asarray(pairs, dtype=np.int64)
    return tgt[:, 0].copy(), tgt[:, 1].copy(), table.reshape(-1), in_target


def bench_gl(v, lineset, label, repeat):
    ta, tb, table, in_target = gl_setup(v, lineset)
    first = np.arange(1, (1 << v), dtype=np.int64)
    rows = []
    if kernels.backend() == "cython":
        from qdeza import _fastcore

        val, dt = timeit(
            _fastcore.gl2_stabilizer_count, v, ta, tb,
            np.ascontiguousarray(table, dtype=np.int16), in_target, first,
            repeat=repeat,
        )
        rows.append(("cython", val, dt))
    val, dt = timeit(
        kernels._gl2_count_py, v, ta, tb, table, in_target, first, repeat=repeat
    )
    rows.append(("python", val, dt))
    for backend, val, dt in rows:
        print(f"  {label:<28} {backend:<7} {dt:9.3f}s   result={val}")


def bench_perm(repeat):
    rng = np.random.default_rng(0)
    states = np.sort(rng.integers(0, 155, size=(1_000_000, 15), dtype=np.uint8), axis=1)
    perm = rng.permutation(155).astype(np.uint8)
    rows = []
    if kernels.backend() == "cython":
        from qdeza import _fastcore

        out, dt = timeit(_fastcore.apply_line_perm_sorted, states, perm, repeat=repeat)
        rows.append(("cython", out, dt))
    out, dt = timeit(lambda s, p: np.sort(p[s], axis=1), states, perm, repeat=repeat)
    rows.append(("python", out, dt))
    ref = rows[-1][1]
    for backend, out, dt in rows:
        assert (out == ref).all()
        print(f"  {'perm-apply (1M x 15)':<28} {backend:<7} {dt:9.3f}s")


def main():
    print(f"backend selected at import: {kernels.backend()}")
    print("\nGL(v,2) setwise-stabilizer sweeps")
    bench_gl(4, gf.enumerate_subspaces(4, 2, 2), "GL(4,2) full (20160)", repeat=3)
    cfg = hexagon.build_badex()
    tab = hexagon.line_table(5)
    badex_lines = [gf.subspace_from_words(tab.lines[i][:2], 5) for i in cfg.line_ids]
    bench_gl(5, badex_lines, "GL(5,2) full (9,999,360)", repeat=1)
    print("\nline-permutation batches (orbit enumeration inner step)")
    bench_perm(repeat=3)


if __name__ == "__main__":
    main()
