"""Spreads and the divisible-design / Deza / strongly-regular classifiers
for q-ary graphs, together with the constructions they recognize.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import sparse

from . import gf
from .errors import (
    AmbientMismatchError,
    ClassificationError,
    FormatError,
    InfeasibleParametersError,
    InvariantViolationError,
    NotRegularError,
    QdezaError,
)
from .gf import Subspace, gaussian_bracket
from .qgraph import QaryGraph, regularity


# ---------------------------------------------------------------------------
# spreads


@dataclass(frozen=True)
class Spread:
    """A partition of the nonzero vectors of F_q^v into n-subspaces."""

    v: int
    q: int
    n: int
    elements: tuple  # tuple[Subspace]

    def __len__(self):
        return len(self.elements)


def field_reduction_spread(v: int, n: int, q: int) -> Spread:
    """The spread obtained by viewing F_q^v as F_{q^n}^{v/n}; scalar
    multiplication by x acts blockwise through the companion matrix of
    the lowest-lex irreducible degree-n polynomial over F_q."""
    if n < 1 or v % n:
        raise QdezaError(f"need n | v, got n={n}, v={v}")
    fld = gf.field(q)
    C = gf.companion_matrix(gf.default_modulus_over(q, n), q)

    def phi(w):
        out = []
        for b0 in range(0, v, n):
            block = w[b0 : b0 + n]
            img = [0] * n
            for j, c in enumerate(block):
                if c:
                    img = [fld.add(x, fld.mul(c, y)) for x, y in zip(img, C[j])]
            out.extend(img)
        return tuple(out)

    covered = set()
    elements = []
    target = (q**v - 1) // (q**n - 1)
    for idx in range(1, q**v):
        # decode idx into a coordinate tuple, most significant first
        w = []
        m = idx
        for _ in range(v):
            w.append(m % q)
            m //= q
        w = tuple(reversed(w))
        if w in covered:
            continue
        rows = [w]
        for _ in range(n - 1):
            rows.append(phi(rows[-1]))
        elem = gf.subspace_from_rows(rows, v, q)
        if elem.dim != n:
            raise InvariantViolationError("field reduction produced a degenerate element", witness=w)
        for vec in elem.vectors():
            if not vec.is_zero():
                covered.add(vec.coords)
        elements.append(elem)
        if len(elements) > target:
            break
    s = Spread(v, q, n, tuple(sorted(elements, key=lambda e: e.rows)))
    if not validate_spread(s):
        raise InvariantViolationError("field reduction did not produce a spread")
    return s


def validate_spread(s: Spread) -> bool:
    """Every nonzero vector covered exactly once, all dimensions n."""
    if s.n < 1 or s.v % s.n:
        return False
    if len(s.elements) != (s.q**s.v - 1) // (s.q**s.n - 1):
        return False
    seen = set()
    for e in s.elements:
        if e.ambient != (s.v, s.q) or e.dim != s.n:
            return False
        for vec in e.vectors():
            if vec.is_zero():
                continue
            if vec.coords in seen:
                return False
            seen.add(vec.coords)
    return len(seen) == s.q**s.v - 1


def format_spread(s: Spread) -> str:
    lines = [f"spread v={s.v} n={s.n} q={s.q}"]
    for e in s.elements:
        lines.append(",".join("".join(str(c) for c in row) for row in e.row_coords()))
    return "\n".join(lines) + "\n"


def parse_spread(text: str) -> Spread:
    rows = [ln.strip() for ln in text.splitlines()]
    rows = [ln for ln in rows if ln and not ln.startswith("#")]
    if not rows:
        raise FormatError("empty spread file")
    head = rows[0].split()
    if len(head) != 4 or head[0] != "spread":
        raise FormatError(f"bad header: {rows[0]!r}")
    try:
        v = int(head[1].removeprefix("v="))
        n = int(head[2].removeprefix("n="))
        q = int(head[3].removeprefix("q="))
    except ValueError as exc:
        raise FormatError(f"bad header: {rows[0]!r}") from exc
    elements = []
    for ln in rows[1:]:
        vecs = []
        for part in ln.split(","):
            if len(part) != v or not all(ch.isdigit() for ch in part):
                raise FormatError(f"bad vector {part!r}")
            vecs.append(tuple(int(ch) for ch in part))
        if len(vecs) != n:
            raise FormatError(f"element needs {n} basis vectors: {ln!r}")
        e = gf.subspace_from_rows(vecs, v, q)
        if e.dim != n:
            raise FormatError(f"rank-deficient element: {ln!r}")
        elements.append(e)
    return Spread(v, q, n, tuple(sorted(elements, key=lambda e: e.rows)))


# ---------------------------------------------------------------------------
# parameter records


@dataclass(frozen=True)
class DdgParams:
    v: int
    k: int
    lambda1: int | None  # None when the spread has n = 1 (no within pairs)
    lambda2: int | None  # None when n = v (no cross pairs)
    n: int
    q: int

    @property
    def m(self) -> int:
        return gaussian_bracket(self.v, self.q) // gaussian_bracket(self.n, self.q)


@dataclass(frozen=True)
class DezaParams:
    v: int
    k: int
    b: int
    a: int
    q: int

    def __post_init__(self):
        if not 0 <= self.a <= self.b:
            raise QdezaError(f"need 0 <= a <= b, got a={self.a}, b={self.b}")


@dataclass(frozen=True)
class DezaCounts:
    n1: int  # vertices sharing b common neighbors with a fixed vertex
    n2: int  # vertices sharing a common neighbors


@dataclass(frozen=True)
class SrgRecognition:
    kind: str  # "spread-union-of-complete" | "symplectic" | "other"
    lam: int | None
    mu: int | None
    witness: object  # Spread, form matrix (tuple of tuples), or None


# ---------------------------------------------------------------------------
# common-neighbor sweeps
#
# For points x != y the count |(N(x) ∩ N(y)) \ {x,y}| equals (M²)_{xy}
# minus 2 when x ~ y, with M the 0/1 neighborhood-membership matrix.
# Sparse products keep the v = 12 spread-replicated graphs cheap.


class _PairData:
    def __init__(self, g: QaryGraph):
        inc = g._inc
        self.n = inc.n
        rows, cols = [], []
        for pts in inc.edge_points:
            for a in pts:
                for b in pts:
                    if a != b:
                        rows.append(a)
                        cols.append(b)
        A = sparse.csr_matrix(
            (np.ones(len(rows), dtype=np.int32), (rows, cols)),
            shape=(self.n, self.n),
        )
        A.data[:] = 1  # collapse duplicate co-occurrences
        self.A = A
        M = (A + sparse.identity(self.n, dtype=np.int32, format="csr")).tocsr()
        D = (M @ M - 2 * A).tocoo()
        mask = D.row != D.col
        self.pr = D.row[mask]
        self.pc = D.col[mask]
        self.pv = np.asarray(D.data[mask], dtype=np.int64)
        self.explicit_per_row = np.bincount(self.pr, minlength=self.n)

    def value_witnesses(self) -> dict:
        """One witness pair per distinct common-neighbor value."""
        out = {}
        for r, c, val in zip(self.pr, self.pc, self.pv):
            if val not in out:
                out[int(val)] = (int(r), int(c))
        if (self.explicit_per_row < self.n - 1).any() and 0 not in out:
            i = int(np.argmax(self.explicit_per_row < self.n - 1))
            pattern = set(self.pc[self.pr == i])
            j = next(j for j in range(self.n) if j != i and j not in pattern)
            out[0] = (i, j)
        return out

    def per_vertex_count(self, value: int) -> np.ndarray:
        cnt = np.bincount(self.pr[self.pv == value], minlength=self.n)
        if value == 0:
            cnt = cnt + (self.n - 1 - self.explicit_per_row)
        return cnt

    def adjacent_pairs(self):
        A = self.A.tocoo()
        return set(zip(A.row.tolist(), A.col.tolist()))


def _require_regular(g: QaryGraph) -> int:
    rep = regularity(g)
    if not rep.is_regular:
        raise NotRegularError("graph is not a regular q-ary graph", witness=rep.witness)
    return rep.k


# ---------------------------------------------------------------------------
# q-DDG


def classify_ddg(g: QaryGraph, s: Spread) -> DdgParams | None:
    """Match common-neighbor counts against the spread classes: constant
    λ1 inside an element, constant λ2 across.  None when the counts do
    not respect the spread."""
    if (g.v, g.q) != (s.v, s.q):
        raise AmbientMismatchError("graph and spread ambient differ")
    if not validate_spread(s):
        raise QdezaError("invalid spread")
    k = _require_regular(g)
    inc = g._inc
    elem_of = {}
    for i, pt in enumerate(inc.points):
        for ei, elem in enumerate(s.elements):
            if gf.contains(elem, pt):
                elem_of[i] = ei
                break
    pd = _PairData(g)
    cls = np.array([elem_of[i] for i in range(pd.n)])
    same = cls[pd.pr] == cls[pd.pc]
    vals_same = set(pd.pv[same].tolist())
    vals_cross = set(pd.pv[~same].tolist())
    # pairs absent from the sparse pattern have value 0
    sz = gaussian_bracket(s.n, s.q)
    total_same = len(s.elements) * sz * (sz - 1)  # ordered pairs
    total_cross = pd.n * (pd.n - 1) - total_same
    if len(pd.pv[same]) < total_same:
        vals_same.add(0)
    if len(pd.pv[~same]) < total_cross:
        vals_cross.add(0)
    if len(vals_same) > 1 or len(vals_cross) > 1:
        return None
    lam1 = int(next(iter(vals_same))) if total_same else None
    lam2 = int(next(iter(vals_cross))) if total_cross else None
    return DdgParams(g.v, k, lam1, lam2, s.n, g.q)


def ddg_parameter_identity(p: DdgParams) -> bool:
    """([k+1]_q - 1)^2 = ([k+1]_q - 1) + λ1([n]_q - 1) + λ2([v]_q - [n]_q)."""
    q = p.q
    kk = gaussian_bracket(p.k + 1, q) - 1
    t1 = (p.lambda1 or 0) * (gaussian_bracket(p.n, q) - 1)
    t2 = (p.lambda2 or 0) * (gaussian_bracket(p.v, q) - gaussian_bracket(p.n, q))
    return kk * kk == kk + t1 + t2


def classical_ddg_identity(v: int, k: int, lambda1: int, lambda2: int, m: int, n: int) -> bool:
    """k² = k + λ1(n-1) + λ2·n·(m-1) for a classical DDG on v = m·n points."""
    if v != m * n:
        raise QdezaError(f"need v = m*n, got {v} != {m}*{n}")
    return k * k == k + lambda1 * (n - 1) + lambda2 * n * (m - 1)


# ---------------------------------------------------------------------------
# q-Deza


def classify_deza(g: QaryGraph) -> tuple[DezaParams, DezaCounts]:
    """Classify a regular q-ary graph as q-Deza.  Raises
    ClassificationError (with witnesses) when three or more distinct
    common-neighbor values occur."""
    k = _require_regular(g)
    pd = _PairData(g)
    witnesses = pd.value_witnesses()
    values = sorted(witnesses)
    if len(values) > 2:
        raise ClassificationError(
            f"{len(values)} distinct common-neighbor values {values}",
            witnesses=[(w, val) for val, w in witnesses.items()],
        )
    if not values:  # single vertex, no pairs
        values = [0]
    b = max(values)
    a = min(values)
    params = DezaParams(g.v, k, b, a, g.q)
    nv = gaussian_bracket(g.v, g.q)
    if a == b:
        counts = DezaCounts(nv - 1, 0)
    else:
        per_vertex = pd.per_vertex_count(b)
        if len(set(per_vertex.tolist())) != 1:
            raise InvariantViolationError(
                "per-vertex count of the larger value is not constant",
                witness=int(np.argmax(per_vertex != per_vertex[0])),
            )
        counts = deza_counts(params)
        if counts.n1 != int(per_vertex[0]):
            raise InvariantViolationError(
                f"closed-form n1={counts.n1} disagrees with observed {int(per_vertex[0])}"
            )
    return params, counts


def deza_counts(p: DezaParams) -> DezaCounts:
    """Closed-form counts: n1 vertices share b common neighbors with any
    fixed vertex, n2 share a; defined only when b != a."""
    if p.b == p.a:
        raise InfeasibleParametersError("counts are undefined when a = b")
    q = p.q
    K = gaussian_bracket(p.k + 1, q)
    nv = gaussian_bracket(p.v, q)
    num = (K - 1) * (K - 2) - p.a * (nv - 1)
    if num % (p.b - p.a):
        raise InfeasibleParametersError(f"non-integral n1 for {p}")
    n1 = num // (p.b - p.a)
    n2 = nv - 1 - n1
    if n1 < 0 or n2 < 0:
        raise InfeasibleParametersError(f"negative count for {p}")
    return DezaCounts(n1, n2)


def classical_deza_count(v: int, k: int, b: int, a: int) -> Fraction:
    """(k(k-1) - a(v-1)) / (b-a); integrality is the caller's check."""
    if b == a:
        raise InfeasibleParametersError("undefined for b = a")
    return Fraction(k * (k - 1) - a * (v - 1), b - a)


def deza_parameter_families(p: DezaParams) -> str:
    """Tag a parameter tuple by the admissibility trichotomy:
    'srg-compatible', 'family-2', 'family-3' or 'inadmissible'."""
    q, v, k, b, a = p.q, p.v, p.k, p.b, p.a
    if a == b:
        return "srg-compatible"
    # disjoint union of complete graphs on a (k+1)-spread
    if a == 0 and (k + 1) < v and v % (k + 1) == 0 and b == gaussian_bracket(k + 1, q) - 2:
        return "srg-compatible"
    # symplectic-polarity graph
    if v % 2 == 0 and k == v - 2 and b == gaussian_bracket(v - 2, q) and a == b - 2:
        return "srg-compatible"
    if q == 2 and a == 1 and v == 2 * k + 1 and k % 2 == 0:
        alpha = (b + 1).bit_length() - 1
        if (1 << alpha) - 1 == b and 2 <= alpha <= k - 1:
            if k % (alpha - 1) == 0 or (k - 2) % (alpha - 1) == 0:
                return "family-2"
    if q == 2 and b == 1 and a == 0 and k >= 2 and v >= 2 * k + 2 and (v * k) % 2 == 0:
        return "family-3"
    return "inadmissible"


# ---------------------------------------------------------------------------
# constructions


def symplectic_srg(v: int, q: int) -> QaryGraph:
    """Edges are the 2-subspaces on which the standard alternating form
    sum_i (x_{2i} y_{2i+1} - x_{2i+1} y_{2i}) vanishes identically."""
    if v % 2:
        raise QdezaError("symplectic form needs even dimension")
    fld = gf.field(q)

    def form(x, y):
        acc = 0
        for i in range(0, v, 2):
            acc = fld.add(acc, fld.mul(x[i], y[i + 1]))
            acc = fld.sub(acc, fld.mul(x[i + 1], y[i]))
        return acc

    edges = []
    for e in gf.enumerate_subspaces(v, 2, q):
        r0, r1 = e.row_coords()
        if form(r0, r1) == 0:
            edges.append(e)
    return QaryGraph(v, q, frozenset(edges))


def _model_embed_edges(elem: Subspace, q: int):
    """All 2-subspaces of F_q^n pushed through an element's basis rows."""
    n = elem.dim
    if n < 2:
        return []
    v = elem.v
    fld = gf.field(q)
    base = elem.row_coords()
    out = []
    for s in gf.enumerate_subspaces(n, 2, q):
        rows = []
        for model_row in s.row_coords():
            acc = [0] * v
            for c, brow in zip(model_row, base):
                if c:
                    acc = [fld.add(x, fld.mul(c, y)) for x, y in zip(acc, brow)]
            rows.append(tuple(acc))
        out.append(gf.subspace_from_rows(rows, v, q))
    return out


def spread_union_complete(s: Spread) -> QaryGraph:
    """Disjoint union of the complete q-graphs on the spread elements."""
    if not validate_spread(s):
        raise QdezaError("invalid spread")
    edges = []
    for elem in s.elements:
        edges.extend(_model_embed_edges(elem, s.q))
    return QaryGraph(s.v, s.q, frozenset(edges))


def extend_by_spread(g: QaryGraph, t: int) -> QaryGraph:
    """Replicate a (v,k,1,0;2) graph inside every element of a v-spread
    of F_2^{vt}; the union is a (vt,k,1,0;2) graph and is disconnected."""
    if t < 2:
        raise QdezaError("need t >= 2")
    if g.q != 2:
        raise QdezaError("spread replication is defined for q = 2")
    params, _ = classify_deza(g)
    if (params.b, params.a) != (1, 0):
        raise QdezaError(f"graph must classify as (v,k,1,0;2), got {params}")
    spread = field_reduction_spread(g.v * t, g.v, 2)
    edges = []
    for elem in spread.elements:
        rows = [gf.word_from_coords(c) for c in elem.row_coords()]

        def emb(w, rows=rows):
            img = 0
            for j in range(g.v):
                if (w >> (g.v - 1 - j)) & 1:
                    img ^= rows[j]
            return img

        for e in g.sorted_edges():
            r0, r1 = e.rows
            edges.append(gf.subspace_from_words([emb(r0), emb(r1)], g.v * t))
    return QaryGraph(g.v * t, 2, frozenset(edges))


# ---------------------------------------------------------------------------
# q-SRG recognition


def _try_spread_witness(g: QaryGraph, k: int) -> Spread | None:
    inc = g._inc
    elements = set()
    for i in range(inc.n):
        ids = {i}
        for ei in inc.point_edges[i]:
            ids.update(inc.edge_points[ei])
        closure = _closure_of(g, sorted(ids))
        if closure is None or closure.dim != k + 1:
            return None
        elements.add(closure)
    s = Spread(g.v, g.q, k + 1, tuple(sorted(elements, key=lambda e: e.rows)))
    if not validate_spread(s):
        return None
    if spread_union_complete(s).edges != g.edges:
        return None
    return s


def _closure_of(g: QaryGraph, ids):
    inc = g._inc
    if g.q == 2:
        s = gf.subspace_from_words(inc.point_words(ids), g.v)
    else:
        s = gf.subspace_from_rows([inc.points[i].rows[0] for i in ids], g.v, g.q)
    if len(ids) == gaussian_bracket(s.dim, g.q):
        return s
    return None


def _try_symplectic_witness(g: QaryGraph) -> tuple | None:
    """Reconstruct an alternating form whose zero pairs are exactly the
    adjacent pairs, by solving the linear constraints from adjacency."""
    v, q = g.v, g.q
    fld = gf.field(q)
    inc = g._inc
    nvar = v * (v - 1) // 2
    var_ix = {}
    c = 0
    for i in range(v):
        for j in range(i + 1, v):
            var_ix[(i, j)] = c
            c += 1

    def pair_coeffs(x, y):
        row = [0] * nvar
        for (i, j), ix in var_ix.items():
            val = fld.sub(fld.mul(x[i], y[j]), fld.mul(x[j], y[i]))
            row[ix] = val
        return tuple(row)

    adj_pairs = set()
    for pts in inc.edge_points:
        for a in pts:
            for b in pts:
                if a < b:
                    adj_pairs.add((a, b))
    eqs = [
        pair_coeffs(inc.points[a].row_coords()[0], inc.points[b].row_coords()[0])
        for a, b in adj_pairs
    ]
    basis = gf.nullspace(eqs, nvar, q)
    if not basis or len(basis) > 4:
        return None

    from itertools import product as iproduct

    for coeffs in iproduct(range(q), repeat=len(basis)):
        if not any(coeffs):
            continue
        sol = [0] * nvar
        for cc, bvec in zip(coeffs, basis):
            if cc:
                sol = [fld.add(x, fld.mul(cc, y)) for x, y in zip(sol, bvec)]
        B = [[0] * v for _ in range(v)]
        for (i, j), ix in var_ix.items():
            B[i][j] = sol[ix]
            B[j][i] = fld.neg(sol[ix])
        if len(gf.rref_rows([tuple(r) for r in B], q)) != v:
            continue
        ok = True
        for a in range(inc.n):
            xa = inc.points[a].row_coords()[0]
            for b in range(a + 1, inc.n):
                xb = inc.points[b].row_coords()[0]
                val = 0
                for i in range(v):
                    if xa[i]:
                        for j in range(v):
                            if B[i][j] and xb[j]:
                                val = fld.add(val, fld.mul(xa[i], fld.mul(B[i][j], xb[j])))
                if (val == 0) != ((a, b) in adj_pairs):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return tuple(tuple(r) for r in B)
    return None


def classify_srg(g: QaryGraph) -> SrgRecognition | None:
    """Succeeds iff common-neighbor counts depend only on adjacency; the
    recognizer then extracts a spread or a symplectic-form witness."""
    k = _require_regular(g)
    pd = _PairData(g)
    adj = pd.adjacent_pairs()
    lam_vals, mu_vals = set(), set()
    for r, c, val in zip(pd.pr, pd.pc, pd.pv):
        (lam_vals if (int(r), int(c)) in adj else mu_vals).add(int(val))
        if len(lam_vals) > 1 or len(mu_vals) > 1:
            return None
    n_adj = len(adj)
    if len(pd.pr) - n_adj < pd.n * (pd.n - 1) - n_adj:
        mu_vals.add(0)  # some non-adjacent pair is absent from the pattern
    if len(lam_vals) > 1 or len(mu_vals) > 1:
        return None
    lam = next(iter(lam_vals)) if lam_vals else None
    mu = next(iter(mu_vals)) if mu_vals else None
    spread = _try_spread_witness(g, k)
    if spread is not None:
        return SrgRecognition("spread-union-of-complete", lam, mu, spread)
    if k == g.v - 2:
        form = _try_symplectic_witness(g)
        if form is not None:
            return SrgRecognition("symplectic", lam, mu, form)
    return SrgRecognition("other", lam, mu, None)
