"""Finite matrix groups over F_q: closure generation, actions on
subspaces, orbits and setwise stabilizers; includes the Singer-cycle
construction on F_2^6 with its printed generators.

Points are row vectors and matrices act on the right, so
act(m1*m2, s) == act(m2, act(m1, s)).
"""
from __future__ import annotations

import functools
import os
from dataclasses import dataclass
from itertools import product

import numpy as np

from . import gf, kernels
from .errors import (
    AmbientMismatchError,
    BudgetExceededError,
    FormatError,
    InvariantViolationError,
    QdezaError,
)
from .gf import Subspace

DEFAULT_GROUP_BUDGET = 10**6
DEFAULT_GL_SWEEP_BUDGET = 2 * 10**7


@dataclass(frozen=True)
class GMatrix:
    """An invertible v x v matrix over F_q; rows are packed words for
    q = 2 and coordinate tuples otherwise."""

    v: int
    q: int
    rows: tuple

    def __post_init__(self):
        if self.q == 2:
            rank = len(gf.rref_words(self.rows, self.v))
        else:
            rank = len(gf.rref_rows(self.rows, self.q))
        if rank != self.v:
            raise QdezaError("singular matrix")

    @classmethod
    def from_rows(cls, rows, q: int = 2) -> "GMatrix":
        rows = [tuple(r) for r in rows]
        v = len(rows)
        if any(len(r) != v for r in rows):
            raise QdezaError("matrix must be square")
        if q == 2:
            return cls(v, 2, tuple(gf.word_from_coords(r) for r in rows))
        return cls(v, q, tuple(rows))

    @classmethod
    def identity(cls, v: int, q: int = 2) -> "GMatrix":
        return cls.from_rows(
            [[1 if i == j else 0 for j in range(v)] for i in range(v)], q
        )

    def row_coords(self) -> tuple[tuple[int, ...], ...]:
        if self.q == 2:
            return tuple(gf.coords_from_word(w, self.v) for w in self.rows)
        return self.rows

    def apply_word(self, w: int) -> int:
        """Image of a packed row vector (q = 2)."""
        out = 0
        v = self.v
        while w:
            t = w.bit_length() - 1
            w ^= 1 << t
            out ^= self.rows[v - 1 - t]
        return out

    def apply_coords(self, x) -> tuple[int, ...]:
        fld = gf.field(self.q)
        acc = [0] * self.v
        for c, row in zip(x, self.row_coords()):
            if c:
                acc = [fld.add(u, fld.mul(c, w)) for u, w in zip(acc, row)]
        return tuple(acc)

    def __mul__(self, other: "GMatrix") -> "GMatrix":
        if (self.v, self.q) != (other.v, other.q):
            raise AmbientMismatchError("matrix product across ambients")
        if self.q == 2:
            return GMatrix(self.v, 2, tuple(other.apply_word(r) for r in self.rows))
        return GMatrix(
            self.v, self.q, tuple(other.apply_coords(r) for r in self.rows)
        )

    def inverse(self) -> "GMatrix":
        v = self.v
        if self.q == 2:
            aug = [(self.rows[i] << v) | (1 << (v - 1 - i)) for i in range(v)]
            red = gf.rref_words(aug, 2 * v)
            mask = (1 << v) - 1
            rows = [r & mask for r in red]
            return GMatrix(v, 2, tuple(rows))
        fld = gf.field(self.q)
        aug = [
            tuple(self.rows[i]) + tuple(1 if j == i else 0 for j in range(v))
            for i in range(v)
        ]
        red = gf.rref_rows(aug, self.q)
        return GMatrix(v, self.q, tuple(r[v:] for r in red))

    def order(self, limit: int = 10**6) -> int:
        ident = GMatrix.identity(self.v, self.q)
        m = self
        for o in range(1, limit + 1):
            if m == ident:
                return o
            m = m * self
        raise BudgetExceededError("order exceeds limit")


def act(m: GMatrix, s: Subspace) -> Subspace:
    """Canonical image subspace {x·m : x in s}; dimension is preserved."""
    if (m.v, m.q) != (s.v, s.q):
        raise AmbientMismatchError("matrix and subspace ambient differ")
    if m.q == 2:
        return gf.subspace_from_words([m.apply_word(w) for w in s.rows], s.v)
    return gf.subspace_from_rows([m.apply_coords(r) for r in s.rows], s.v, s.q)


@dataclass(frozen=True)
class MatrixGroup:
    generators: tuple
    elements: tuple
    order: int


def generate_group(gens, budget: int = DEFAULT_GROUP_BUDGET) -> MatrixGroup:
    """Breadth-first closure of the generated group; refuses past budget."""
    gens = tuple(gens)
    if not gens:
        raise QdezaError("need at least one generator")
    v, q = gens[0].v, gens[0].q
    for g in gens:
        if (g.v, g.q) != (v, q):
            raise AmbientMismatchError("generators live in different ambients")
    ident = GMatrix.identity(v, q)
    seen = {ident}
    out = [ident]
    frontier = [ident]
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                p = g * h
                if p not in seen:
                    seen.add(p)
                    out.append(p)
                    nxt.append(p)
                    if len(seen) > budget:
                        raise BudgetExceededError(
                            f"group closure exceeded budget {budget}"
                        )
        frontier = nxt
    return MatrixGroup(gens, tuple(out), len(out))


# ---------------------------------------------------------------------------
# Singer construction on F_2^6

_SIGMA_ROWS = (
    (0, 1, 0, 0, 0, 0),
    (0, 0, 1, 0, 0, 0),
    (0, 0, 0, 1, 0, 0),
    (0, 0, 0, 0, 1, 0),
    (0, 0, 0, 0, 0, 1),
    (1, 1, 0, 1, 1, 0),
)
_PHI_ROWS = (
    (0, 0, 0, 1, 0, 1),
    (1, 1, 0, 0, 0, 0),
    (0, 0, 0, 0, 1, 1),
    (0, 1, 0, 0, 0, 0),
    (0, 0, 0, 0, 0, 1),
    (1, 0, 1, 0, 1, 1),
)


def singer_generators() -> tuple[GMatrix, GMatrix]:
    """The 6x6 matrices over F_2: a Singer cycle generator of order 63
    and the companion generator used for the order-63 point-transitive
    subgroup K = <sigma^3, phi>."""
    return GMatrix.from_rows(_SIGMA_ROWS), GMatrix.from_rows(_PHI_ROWS)


@functools.lru_cache(maxsize=None)
def singer_frobenius() -> GMatrix:
    """An invertible F with F·sigma·F^{-1} = sigma², found by solving the
    linear system F·sigma = sigma²·F over F_2 (first invertible solution
    in a fixed order).  Together with sigma it generates the full
    normalizer of <sigma>."""
    sigma, _ = singer_generators()
    v = sigma.v
    S = np.array(sigma.row_coords(), dtype=np.uint8)
    S2 = (S @ S) % 2
    eqs = []
    for i in range(v):
        for j in range(v):
            coeff = np.zeros((v, v), dtype=np.uint8)
            for k in range(v):
                coeff[i, k] ^= S[k, j]
                coeff[k, j] ^= S2[i, k]
            eqs.append(tuple(int(x) for x in coeff.reshape(-1)))
    basis = gf.nullspace(eqs, v * v, 2)
    for coeffs in product((0, 1), repeat=len(basis)):
        if not any(coeffs):
            continue
        vec = [0] * (v * v)
        for c, bvec in zip(coeffs, basis):
            if c:
                vec = [x ^ y for x, y in zip(vec, bvec)]
        rows = [tuple(vec[i * v : (i + 1) * v]) for i in range(v)]
        try:
            F = GMatrix.from_rows(rows)
        except QdezaError:
            continue
        if F * sigma == (sigma * sigma) * F:
            return F
    raise InvariantViolationError("no invertible Frobenius conjugator found")


def singer_normalizer() -> MatrixGroup:
    """The normalizer N of the Singer group <sigma>, generated by sigma,
    phi and the Frobenius conjugator; its order is verified to be 378.

    Note: the printed pair (sigma, phi) alone generates an index-2
    subgroup of order 189, so the Frobenius element is required."""
    sigma, phi = singer_generators()
    group = generate_group([sigma, phi, singer_frobenius()])
    if group.order != 378:
        raise InvariantViolationError(
            f"normalizer closure has order {group.order}, expected 378"
        )
    return group


def deza_orbit_representatives() -> tuple[Subspace, Subspace, Subspace]:
    """Spans of the three printed generator pairs: one representative
    2-subspace per line orbit that carries a (6,2,1,0;2) graph."""
    pairs = (
        ((1, 0, 0, 0, 0, 0), (0, 1, 1, 0, 0, 0)),
        ((1, 0, 0, 0, 0, 0), (0, 0, 1, 1, 0, 0)),
        ((0, 1, 0, 0, 0, 0), (0, 0, 1, 1, 0, 0)),
    )
    return tuple(gf.subspace_from_rows(p, 6, 2) for p in pairs)


# ---------------------------------------------------------------------------
# matrix literal files: rows as digit strings, one matrix per blank-line
# separated block, '#' comments


def format_matrices(mats) -> str:
    blocks = []
    for m in mats:
        blocks.append("\n".join("".join(str(c) for c in row) for row in m.row_coords()))
    return "\n\n".join(blocks) + "\n"


def parse_matrices(text: str, q: int = 2) -> tuple[GMatrix, ...]:
    mats = []
    block: list[tuple[int, ...]] = []
    for raw in text.splitlines() + [""]:
        line = raw.split("#", 1)[0].strip()
        if not line:
            if block:
                mats.append(GMatrix.from_rows(block, q))
                block = []
            continue
        if not all(ch.isdigit() and int(ch) < q for ch in line):
            raise FormatError(f"bad matrix row {line!r}")
        block.append(tuple(int(ch) for ch in line))
    if not mats:
        raise FormatError("no matrices found")
    return tuple(mats)


# ---------------------------------------------------------------------------
# orbits


@dataclass(frozen=True)
class OrbitPartition:
    v: int
    k: int
    q: int
    orbits: tuple  # tuple[(representative id, tuple of member ids)]

    def sizes(self) -> dict:
        out: dict[int, int] = {}
        for _, members in self.orbits:
            out[len(members)] = out.get(len(members), 0) + 1
        return out


def orbit_partition(group, k: int) -> OrbitPartition:
    """Orbits of the group on all k-subspaces, by union-find over
    generator images; the full group is never required."""
    gens = group.generators if isinstance(group, MatrixGroup) else tuple(group)
    v, q = gens[0].v, gens[0].q
    table = gf.enumerate_subspaces(v, k, q)
    index = {s: i for i, s in enumerate(table)}
    parent = list(range(len(table)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, s in enumerate(table):
        for g in gens:
            j = index[act(g, s)]
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[int]] = {}
    for i in range(len(table)):
        groups.setdefault(find(i), []).append(i)
    orbits = tuple(
        (root, tuple(sorted(members))) for root, members in sorted(groups.items())
    )
    part = OrbitPartition(v, k, q, orbits)
    if isinstance(group, MatrixGroup):
        for _, members in part.orbits:
            if group.order % len(members):
                raise InvariantViolationError(
                    f"orbit size {len(members)} does not divide group order {group.order}"
                )
    return part


# ---------------------------------------------------------------------------
# setwise stabilizers


@dataclass(frozen=True)
class FullGL:
    """Marker universe: all of GL(v, q)."""

    v: int
    q: int

    @property
    def order(self) -> int:
        n = 1
        for i in range(self.v):
            n *= self.q**self.v - self.q**i
        return n


def _lineset_words(lineset) -> list[tuple[int, int]]:
    pairs = []
    for s in lineset:
        if s.dim != 2 or s.q != 2:
            raise QdezaError("line sets must consist of 2-subspaces over F_2")
        pairs.append((s.rows[0], s.rows[1]))
    return pairs


@functools.lru_cache(maxsize=8)
def _pair_line_table(v: int):
    """(pair -> line id) lookup for PG(v-1,2), flattened to (1<<v)^2."""
    npts = (1 << v) - 1
    lines = sorted(
        {tuple(sorted((a, b, a ^ b))) for a in range(1, npts + 1) for b in range(a + 1, npts + 1)}
    )
    table = np.zeros((1 << v) * (1 << v), dtype=np.int16)
    for i, (a, b, c) in enumerate(lines):
        for x, y in ((a, b), (b, a), (a, c), (c, a), (b, c), (c, b)):
            table[(x << v) | y] = i
    lid = {l: i for i, l in enumerate(lines)}
    return lines, lid, table


def setwise_stabilizer_order(
    universe,
    lineset,
    budget: int = DEFAULT_GL_SWEEP_BUDGET,
    workers: int | None = None,
) -> int:
    """Number of matrices in the universe mapping the set of 2-subspaces
    onto itself.  For FullGL the whole group is swept (q = 2 only, order
    within budget; GL(6,2) is refused at the default budget)."""
    lineset = list(lineset)
    if isinstance(universe, MatrixGroup):
        target = frozenset(lineset)
        count = 0
        for m in universe.elements:
            if frozenset(act(m, s) for s in lineset) == target:
                count += 1
        return count
    if not isinstance(universe, FullGL):
        raise QdezaError("universe must be a MatrixGroup or FullGL")
    if universe.q != 2:
        raise QdezaError("full-GL sweeps are implemented for q = 2 only")
    if universe.order > budget:
        raise BudgetExceededError(
            f"|GL({universe.v},2)| = {universe.order} exceeds sweep budget {budget}"
        )
    v = universe.v
    lines, lid, pair_table = _pair_line_table(v)
    in_target = np.zeros(len(lines), dtype=np.uint8)
    target_pairs = []
    for a, b in _lineset_words(lineset):
        tri = tuple(sorted((a, b, a ^ b)))
        in_target[lid[tri]] = 1
        target_pairs.append((a, b))
    npts = (1 << v) - 1
    if workers is None:
        workers = 1
    if workers <= 1:
        return kernels.gl2_stabilizer_count(v, target_pairs, pair_table, in_target)
    import concurrent.futures

    chunks = np.array_split(np.arange(1, npts + 1, dtype=np.int64), workers)
    total = 0
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        futs = [
            pool.submit(
                kernels.gl2_stabilizer_count, v, target_pairs, pair_table, in_target, chunk
            )
            for chunk in chunks
            if len(chunk)
        ]
        for f in futs:
            total += f.result()
    return total


def default_workers() -> int:
    env = os.environ.get("QGRAPH_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, os.cpu_count() or 1)
