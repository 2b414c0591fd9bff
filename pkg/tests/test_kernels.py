"""Compiled kernels versus the pure fallbacks: both must agree."""
import numpy as np
import pytest

from qdeza import gf, kernels
from qdeza.groups import FullGL, _pair_line_table


def _target_setup(v, line_subspaces):
    lines, lid, table = _pair_line_table(v)
    in_target = np.zeros(len(lines), dtype=np.uint8)
    pairs = []
    for s in line_subspaces:
        a, b = s.rows
        in_target[lid[tuple(sorted((a, b, a ^ b)))]] = 1
        pairs.append((a, b))
    return pairs, table, in_target


def test_backend_reported():
    assert kernels.backend() in ("cython", "python")


def test_gl42_full_group_both_paths():
    pairs, table, in_target = _target_setup(4, gf.enumerate_subspaces(4, 2, 2))
    got = kernels.gl2_stabilizer_count(4, pairs, table, in_target)
    ref = kernels._gl2_count_py(
        4,
        np.array([p[0] for p in pairs], dtype=np.int64),
        np.array([p[1] for p in pairs], dtype=np.int64),
        table.reshape(-1),
        in_target,
        np.arange(1, 16, dtype=np.int64),
    )
    assert got == ref == FullGL(4, 2).order


def test_gl42_proper_subset_both_paths():
    subset = list(gf.enumerate_subspaces(4, 2, 2))[:6]
    pairs, table, in_target = _target_setup(4, subset)
    got = kernels.gl2_stabilizer_count(4, pairs, table, in_target)
    ref = kernels._gl2_count_py(
        4,
        np.array([p[0] for p in pairs], dtype=np.int64),
        np.array([p[1] for p in pairs], dtype=np.int64),
        table.reshape(-1),
        in_target,
        np.arange(1, 16, dtype=np.int64),
    )
    assert got == ref


def test_first_row_partition_sums_to_total():
    pairs, table, in_target = _target_setup(4, gf.enumerate_subspaces(4, 2, 2))
    total = kernels.gl2_stabilizer_count(4, pairs, table, in_target)
    parts = 0
    for chunk in np.array_split(np.arange(1, 16, dtype=np.int64), 4):
        parts += kernels.gl2_stabilizer_count(4, pairs, table, in_target, first_rows=chunk)
    assert parts == total


def test_apply_line_perm_sorted_matches_numpy():
    rng = np.random.default_rng(11)
    states = rng.integers(0, 155, size=(500, 15), dtype=np.uint8)
    states = np.sort(states, axis=1)
    perm = rng.permutation(155).astype(np.uint8)
    got = kernels.apply_line_perm_sorted(states, perm)
    ref = np.sort(perm[states], axis=1)
    assert (got == ref).all()


@pytest.mark.skipif(kernels.backend() != "cython", reason="extension not built")
def test_extension_agrees_with_fallback_on_random_targets():
    rng = np.random.default_rng(5)
    table5 = gf.enumerate_subspaces(5, 2, 2)
    idx = rng.choice(len(table5), size=10, replace=False)
    subset = [table5[i] for i in idx]
    pairs, table, in_target = _target_setup(5, subset)
    rows = np.array([1, 2, 3], dtype=np.int64)  # partial sweep keeps it quick
    got = kernels.gl2_stabilizer_count(5, pairs, table, in_target, first_rows=rows)
    ref = kernels._gl2_count_py(
        5,
        np.array([p[0] for p in pairs], dtype=np.int64),
        np.array([p[1] for p in pairs], dtype=np.int64),
        table.reshape(-1),
        in_target,
        rows,
    )
    assert got == ref
