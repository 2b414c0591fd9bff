"""The split Cayley hexagon of order two embedded in PG(5,2), hyperplane
sections of (6,2,1,0;2) graphs, the 15-line quintuple-point configuration
("badex") and the classification sweep built on its GL(5,2) orbit:
orbit filtering, couple enumeration and good-line extension.

All of this lives over F_2; points are packed words (coordinate j at bit
v-1-j) and lines are ids into a per-dimension line table.
"""
from __future__ import annotations

import functools
import hashlib
from collections import deque
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import gf, kernels
from .designs import classify_deza
from .errors import (
    BudgetExceededError,
    ConstructionError,
    InvariantViolationError,
    QdezaError,
)
from .gf import Subspace, gaussian_bracket
from .qgraph import QaryGraph, regularity


def _parity(x: int) -> int:
    return x.bit_count() & 1


def _span_words(words):
    basis = []
    for w in words:
        x = w
        for b in basis:
            x = min(x, x ^ b)
        if x:
            basis.append(x)
            basis.sort(reverse=True)
    return basis


# ---------------------------------------------------------------------------
# line tables for PG(v-1, 2)


class LineTable:
    def __init__(self, v: int):
        self.v = v
        npts = (1 << v) - 1
        self.npoints = npts
        lines = sorted(
            {
                tuple(sorted((a, b, a ^ b)))
                for a in range(1, npts + 1)
                for b in range(a + 1, npts + 1)
            }
        )
        self.lines = tuple(lines)
        lid = {}
        masks = []
        through = [[] for _ in range(npts + 1)]
        for i, (a, b, c) in enumerate(lines):
            for x, y in ((a, b), (b, a), (a, c), (c, a), (b, c), (c, b)):
                lid[(x, y)] = i
            masks.append((1 << (a - 1)) | (1 << (b - 1)) | (1 << (c - 1)))
            for p in (a, b, c):
                through[p].append(i)
        self.lid = lid
        self.point_mask = tuple(masks)
        self.through = tuple(tuple(t) for t in through)

    def id_of_words(self, a: int, b: int) -> int:
        return self.lid[(a, b)]


@functools.lru_cache(maxsize=4)
def line_table(v: int) -> LineTable:
    return LineTable(v)


def graph_line_ids(g: QaryGraph) -> tuple[int, ...]:
    """Sorted line-table ids of a q=2 graph's edges."""
    if g.q != 2:
        raise QdezaError("line ids are defined for q = 2")
    tab = line_table(g.v)
    return tuple(sorted(tab.id_of_words(e.rows[0], e.rows[1]) for e in g.edges))


def lines_to_graph(v: int, ids) -> QaryGraph:
    tab = line_table(v)
    edges = []
    for i in ids:
        a, b, _ = tab.lines[i]
        edges.append(gf.subspace_from_words([a, b], v))
    return QaryGraph(v, 2, frozenset(edges))


# ---------------------------------------------------------------------------
# split Cayley hexagon
#
# Construction route: the parabolic quadric x0x4 + x1x5 + x2x6 = x3^2 in
# PG(6,2) carries 63 points and 315 lines; the 63 hexagon lines are those
# whose Pluecker coordinates satisfy six linear conditions pairing each
# p_{3j} with the coordinate of the complementary index pair under the
# pairing 0<->4, 1<->5, 2<->6.  Projecting from the nucleus (0,0,0,1,0,0,0)
# maps them onto PG(5,2).  The construction is accepted only through the
# closed-loop validator below.

_PLUECKER_CONDITIONS = (
    ((0, 3), (5, 6)),
    ((1, 3), (4, 6)),
    ((2, 3), (4, 5)),
    ((3, 4), (1, 2)),
    ((3, 5), (0, 2)),
    ((3, 6), (0, 1)),
)


def _hexagon_line_ids() -> tuple[int, ...]:
    def coords7(x):
        return [(x >> (6 - j)) & 1 for j in range(7)]

    qpts = []
    for x in range(1, 128):
        c = coords7(x)
        if (c[0] & c[4]) ^ (c[1] & c[5]) ^ (c[2] & c[6]) ^ c[3] == 0:
            qpts.append(x)
    qset = set(qpts)
    hex_lines = []
    for a, b in combinations(qpts, 2):
        if (a ^ b) not in qset or (a ^ b) < b:
            continue  # each quadric line visited once, by its two smallest points
        ca, cb = coords7(a), coords7(b)
        p = [[(ca[i] & cb[j]) ^ (ca[j] & cb[i]) for j in range(7)] for i in range(7)]
        if all(p[i1][j1] == p[i2][j2] for (i1, j1), (i2, j2) in _PLUECKER_CONDITIONS):
            hex_lines.append((a, b))
    tab = line_table(6)

    def project(x):
        c = coords7(x)
        return gf.word_from_coords([c[0], c[1], c[2], c[4], c[5], c[6]])

    ids = {tab.id_of_words(project(a), project(b)) for a, b in hex_lines}
    return tuple(sorted(ids))


@functools.lru_cache(maxsize=1)
def build_split_cayley_hexagon() -> QaryGraph:
    """The 63-line hexagon graph in F_2^6; aborts unless the full
    validator suite passes."""
    ids = _hexagon_line_ids()
    if len(ids) != 63:
        raise ConstructionError(f"hexagon construction produced {len(ids)} lines")
    g = lines_to_graph(6, ids)
    rep = regularity(g)
    if not (rep.is_regular and rep.k == 2):
        raise ConstructionError("hexagon graph is not 2-regular")
    params, _ = classify_deza(g)
    if (params.v, params.k, params.b, params.a, params.q) != (6, 2, 1, 0, 2):
        raise ConstructionError(f"hexagon graph classified as {params}")
    if not is_generalized_hexagon(g):
        raise ConstructionError("hexagon graph failed the girth/diameter check")
    if not regular_embedding_checks(g):
        raise ConstructionError("hexagon graph failed the regular-embedding check")
    return g


# ---------------------------------------------------------------------------
# incidence-graph validation


def _incidence_adj(g: QaryGraph):
    inc = g._inc
    n = inc.n
    nl = len(inc.edge_points)
    adj = [[] for _ in range(n + nl)]
    for ei, pts in enumerate(inc.edge_points):
        for p in pts:
            adj[p].append(n + ei)
            adj[n + ei].append(p)
    return adj, n, nl


def is_generalized_hexagon(g: QaryGraph) -> bool:
    """Point-line geometry test: the bipartite incidence graph must have
    diameter 6 and girth 12."""
    adj, n, nl = _incidence_adj(g)
    total = n + nl
    if total == 0 or nl == 0:
        return False
    diam = 0
    girth = None
    for s in range(total):
        dist = [-1] * total
        par = [-1] * total
        dist[s] = 0
        dq = deque([s])
        while dq:
            u = dq.popleft()
            for w in adj[u]:
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    par[w] = u
                    dq.append(w)
                elif par[u] != w and dist[w] >= dist[u]:
                    cyc = dist[u] + dist[w] + 1
                    if girth is None or cyc < girth:
                        girth = cyc
        ecc = max(dist)
        if min(dist) < 0:
            return False  # disconnected
        diam = max(diam, ecc)
    return diam == 6 and girth == 12


def incidence_point_distance_census(g: QaryGraph, point: Subspace) -> dict:
    """Counts of points at each incidence-graph distance from ``point``
    (point-to-point distances are even); unreachable points count under
    the key None."""
    adj, n, _ = _incidence_adj(g)
    inc = g._inc
    s = inc.pindex[point]
    dist = [-1] * len(adj)
    dist[s] = 0
    dq = deque([s])
    while dq:
        u = dq.popleft()
        for w in adj[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                dq.append(w)
    census: dict = {}
    for p in range(n):
        key = dist[p] if dist[p] >= 0 else None
        census[key] = census.get(key, 0) + 1
    return census


def regular_embedding_checks(g: QaryGraph) -> bool:
    """For every point P, the points at incidence distance <= 4 must be
    exactly the point set of a hyperplane (a (v-1)-subspace).  The
    stated "distance less than 4" only reaches the coplanar neighbors;
    the hyperplane property is carried by the distance-4 ball."""
    adj, n, _ = _incidence_adj(g)
    inc = g._inc
    want = gaussian_bracket(g.v - 1, g.q)
    for s in range(n):
        dist = {s: 0}
        dq = deque([s])
        while dq:
            u = dq.popleft()
            if dist[u] >= 4:
                continue
            for w in adj[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    dq.append(w)
        near = [p for p in range(n) if dist.get(p, 99) <= 4]
        if len(near) != want:
            return False
        if g.q == 2:
            dim = len(_span_words([inc.points[p].rows[0] for p in near]))
        else:
            dim = len(gf.rref_rows([inc.points[p].rows[0] for p in near], g.q))
        if dim != g.v - 1:
            return False
    return True


def pi_plane(g: QaryGraph, point: Subspace) -> Subspace:
    """The plane spanned by the three graph lines through a point of a
    (6,2,1,0;2) graph."""
    inc = g._inc
    pid = inc.pindex[point]
    eids = inc.point_edges[pid]
    if len(eids) != 3:
        raise InvariantViolationError(
            f"point lies on {len(eids)} lines, expected 3", witness=point
        )
    words = [point.rows[0]]
    for ei in eids:
        for p in inc.edge_points[ei]:
            words.append(inc.points[p].rows[0])
    s = gf.subspace_from_words(words, g.v)
    if s.dim != 3:
        raise InvariantViolationError("pencil through point is not coplanar", witness=point)
    return s


# ---------------------------------------------------------------------------
# hyperplane sections


@dataclass(frozen=True)
class SectionReport:
    v: int
    dual: int  # hyperplane as a dual word: p in H iff parity(p & dual) = 0
    line_ids: tuple  # E_H
    s_points: tuple  # words of the 7 points on three section lines
    degrees: tuple  # (point word, section degree) for every point of H

    def hyperplane(self) -> Subspace:
        pts = [p for p in range(1, 1 << self.v) if _parity(p & self.dual) == 0]
        return gf.subspace_from_words(pts, self.v)

    def lines_as_subspaces(self) -> tuple[Subspace, ...]:
        tab = line_table(self.v)
        return tuple(
            gf.subspace_from_words(tab.lines[i][:2], self.v) for i in self.line_ids
        )


def hyperplane_section(g: QaryGraph, hyperplane) -> SectionReport:
    """Restrict a (6,2,1,0;2) graph to a hyperplane: the 15 lines inside
    it and the 7 points covering three of them.  A section degree other
    than 1 or 3 aborts with the offending point."""
    if g.q != 2:
        raise QdezaError("sections are implemented for q = 2")
    v = g.v
    if isinstance(hyperplane, Subspace):
        if hyperplane.dim != v - 1:
            raise QdezaError("hyperplane must have dimension v-1")
        dual = 0
        for h in range(1, 1 << v):
            if all(_parity(w & h) == 0 for w in hyperplane.rows):
                dual = h
                break
    else:
        dual = int(hyperplane)
    tab = line_table(v)
    ids = graph_line_ids(g)
    e_h = [i for i in ids if _parity(tab.lines[i][0] & dual) == 0 and _parity(tab.lines[i][1] & dual) == 0]
    deg: dict[int, int] = {}
    hpts = [p for p in range(1, 1 << v) if _parity(p & dual) == 0]
    for p in hpts:
        deg[p] = 0
    for i in e_h:
        for p in tab.lines[i]:
            deg[p] += 1
    for p, d in deg.items():
        if d not in (1, 3):
            raise InvariantViolationError(
                f"point on {d} section lines (must be 1 or 3)", witness=p
            )
    s_points = tuple(sorted(p for p, d in deg.items() if d == 3))
    if len(e_h) != 15 or len(s_points) != 7:
        raise InvariantViolationError(
            f"section has {len(e_h)} lines and {len(s_points)} triple points",
            witness=dual,
        )
    return SectionReport(v, dual, tuple(e_h), s_points, tuple(sorted(deg.items())))


def all_hyperplane_sections(g: QaryGraph) -> tuple[SectionReport, ...]:
    """Sections over all hyperplanes, keyed by dual word in lex order."""
    return tuple(hyperplane_section(g, h) for h in range(1, 1 << g.v))


def section_case(g: QaryGraph, rep: SectionReport) -> str:
    """"pencil" when the 7 triple points are exactly some pi-plane of a
    point among them; "badex" otherwise (with the 3/4 intersection law
    verified)."""
    inc = g._inc
    s_set = set(rep.s_points)
    planes = {}
    for p in rep.s_points:
        pt = inc.points[_point_index(g, p)]
        planes[p] = set(pi_plane(g, pt).nonzero_words())
    for p in rep.s_points:
        if planes[p] == s_set:
            return "pencil"
    sizes = set()
    for p in rep.s_points:
        size = len(planes[p] & s_set)
        if size not in (3, 4):
            raise InvariantViolationError(
                f"|S_H ∩ pi_T| = {size}, expected 3 or 4", witness=p
            )
        sizes.add(size)
    if sizes != {3, 4}:
        raise InvariantViolationError(f"intersection sizes {sizes}; both 3 and 4 must occur")
    return "badex"


def _point_index(g: QaryGraph, word: int) -> int:
    return g._inc.pindex[gf.subspace_from_words([word], g.v)]


# ---------------------------------------------------------------------------
# the 15-line badex configuration in F_2^5


@dataclass(frozen=True)
class BadexConfig:
    q_points: tuple  # P1..P7 as words of F_2^5
    line_ids: tuple  # the 15 lines, ids into line_table(5)
    ell: int  # line id of {P3, P4, P7}
    gamma: Subspace  # plane containing P1, P2, P5, P6
    m_line: int  # line id of gamma minus those four points
    special_solids: tuple  # 3 dual words: solids containing exactly one line

    def lines_as_point_triples(self):
        tab = line_table(5)
        return tuple(tab.lines[i] for i in self.line_ids)


@functools.lru_cache(maxsize=1)
def build_badex() -> BadexConfig:
    """The configuration on the basis P1..P5 with P6 = P1+P2+P5 and
    P7 = P3+P4: seven points each on three coplanar lines, every other
    point of the space on exactly one.  All stated facts are verified."""
    v = 5
    tab = line_table(v)
    e = [gf.word_from_coords([1 if i == j else 0 for i in range(v)]) for j in range(v)]
    P = {i + 1: e[i] for i in range(5)}
    P[6] = P[1] ^ P[2] ^ P[5]
    P[7] = P[3] ^ P[4]
    q_points = tuple(P[i] for i in range(1, 8))
    pairs = [
        (P[1], P[2]), (P[2], P[3]), (P[3], P[4]), (P[4], P[5]), (P[5], P[1]),
        (P[1], P[6]), (P[6], P[7]),
        (P[2], P[1] ^ P[3]), (P[3], P[2] ^ P[4]), (P[7], P[3] ^ P[6]),
        (P[4], P[3] ^ P[5]), (P[5], P[1] ^ P[4]), (P[6], P[1] ^ P[7]),
        (P[1] ^ P[2] ^ P[4], P[2] ^ P[3] ^ P[5]),
        (P[1] ^ P[3] ^ P[5], P[2] ^ P[4] ^ P[5]),
    ]
    ids = tuple(sorted(tab.id_of_words(a, b) for a, b in pairs))
    if len(set(ids)) != 15:
        raise ConstructionError("the 15 printed lines are not distinct")
    deg = {p: 0 for p in range(1, 32)}
    for i in ids:
        for p in tab.lines[i]:
            deg[p] += 1
    qset = set(q_points)
    for p in range(1, 32):
        want = 3 if p in qset else 1
        if deg[p] != want:
            raise ConstructionError(f"point {p} lies on {deg[p]} lines, expected {want}")
    for p in qset:
        pts = set()
        for i in ids:
            if p in tab.lines[i]:
                pts.update(tab.lines[i])
        if len(_span_words(pts)) != 3:
            raise ConstructionError(f"pencil at {p} is not coplanar")
    # 13 lines meet the seven points and cover 25 points; the remaining
    # 6 points split into the two final lines
    through_q = [i for i in ids if any(p in qset for p in tab.lines[i])]
    if len(through_q) != 13:
        raise ConstructionError(f"{len(through_q)} lines meet the point set, expected 13")
    cover = set()
    for i in through_q:
        cover.update(tab.lines[i])
    if len(cover) != 25:
        raise ConstructionError(f"the 13 lines cover {len(cover)} points, expected 25")
    residue = set(range(1, 32)) - cover
    residual_ids = {i for i in ids if set(tab.lines[i]) <= residue}
    if len(residue) != 6 or len(residual_ids) != 2 or residual_ids != set(ids) - set(through_q):
        raise ConstructionError("leftover points do not form the two residual lines")
    ell = tab.id_of_words(P[3], P[4])
    gamma = gf.subspace_from_words([P[1], P[2], P[5]], v)
    gamma_pts = set(gamma.nonzero_words())
    m_pts = sorted(gamma_pts - {P[1], P[2], P[5], P[6]})
    m_line = tab.id_of_words(m_pts[0], m_pts[1])
    if set(tab.lines[m_line]) != set(m_pts):
        raise ConstructionError("gamma residue is not a line")
    if gamma_pts & set(tab.lines[ell]):
        raise ConstructionError("ell and gamma are not disjoint")
    specials = []
    for h in range(1, 32):
        inside = [i for i in ids if all(_parity(p & h) == 0 for p in tab.lines[i][:2])]
        if len(inside) == 1:
            specials.append(h)
    if len(specials) != 3:
        raise ConstructionError(f"{len(specials)} solids with exactly one line, expected 3")
    for h in specials:
        solid_pts = {p for p in range(1, 32) if _parity(p & h) == 0}
        if len(solid_pts & set(tab.lines[ell])) != 1:
            raise ConstructionError("special solid does not meet ell in one point")
        if solid_pts & (gamma_pts & qset):
            raise ConstructionError("special solid meets gamma ∩ Q")
        uline = next(i for i in ids if set(tab.lines[i]) <= solid_pts)
        if len(set(tab.lines[uline]) & qset) != 1:
            raise ConstructionError("unique line lacks a unique marked point")
    return BadexConfig(q_points, ids, ell, gamma, m_line, tuple(sorted(specials)))


def solid_census(obj):
    """Per-solid (points of S, lines of E) counts for the 31 solids of a
    5-dimensional space; the two numbers must agree on every solid.
    ``obj`` is a SectionReport or a BadexConfig."""
    if isinstance(obj, BadexConfig):
        v5_lines = [line_table(5).lines[i] for i in obj.line_ids]
        s_pts = set(obj.q_points)
    elif isinstance(obj, SectionReport):
        v5_lines, s_pts = _section_in_model(obj)
        s_pts = set(s_pts)
    else:
        raise QdezaError("solid_census needs a SectionReport or BadexConfig")
    census = []
    for h in range(1, 32):
        pts_in = len([p for p in s_pts if _parity(p & h) == 0])
        lines_in = len(
            [l for l in v5_lines if _parity(l[0] & h) == 0 and _parity(l[1] & h) == 0]
        )
        if pts_in != lines_in:
            raise InvariantViolationError(
                f"solid {h}: {pts_in} marked points vs {lines_in} lines", witness=h
            )
        census.append((h, pts_in, lines_in))
    return census


def _section_in_model(rep: SectionReport):
    """Map a hyperplane section of F_2^6 onto the model F_2^5 through the
    hyperplane's echelon basis (coordinates = pivot bits)."""
    H = rep.hyperplane()
    pivots = [r.bit_length() - 1 for r in H.rows]

    def down(w):
        return gf.word_from_coords([(w >> p) & 1 for p in pivots])

    tab6 = line_table(rep.v)
    lines = [tuple(sorted(down(p) for p in tab6.lines[i])) for i in rep.line_ids]
    s_pts = tuple(down(p) for p in rep.s_points)
    return lines, s_pts


# ---------------------------------------------------------------------------
# the GL(5,2) orbit of the badex line set

_ORBIT_GENS = (
    # cyclic coordinate shift and one transvection e1 -> e1+e2
    ((0, 1, 0, 0, 0), (0, 0, 1, 0, 0), (0, 0, 0, 1, 0), (0, 0, 0, 0, 1), (1, 0, 0, 0, 0)),
    ((1, 1, 0, 0, 0), (0, 1, 0, 0, 0), (0, 0, 1, 0, 0), (0, 0, 0, 1, 0), (0, 0, 0, 0, 1)),
)


def _line_perm(rows) -> np.ndarray:
    tab = line_table(5)
    words = [gf.word_from_coords(r) for r in rows]

    def img(w):
        out = 0
        while w:
            t = w.bit_length() - 1
            w ^= 1 << t
            out ^= words[5 - 1 - t]
        return out

    perm = np.empty(len(tab.lines), dtype=np.uint8)
    for i, (a, b, _) in enumerate(tab.lines):
        perm[i] = tab.id_of_words(img(a), img(b))
    return perm


_ORBIT_CACHE: list = []


def badex_orbit(progress=None) -> np.ndarray:
    """All GL(5,2)-images of the badex line set as sorted 15-tuples of
    line ids, in BFS order from the printed configuration.  The orbit
    size 1,666,560 = |GL(5,2)|/6 doubles as a completeness check for the
    two generators used.  Computed once per process."""
    if _ORBIT_CACHE:
        return _ORBIT_CACHE[0]
    start = np.array(build_badex().line_ids, dtype=np.uint8)
    perms = [_line_perm(g) for g in _ORBIT_GENS]
    visited = {start.tobytes()}
    chunks = [start[None, :]]
    frontier = start[None, :]
    while len(frontier):
        images = np.concatenate(
            [kernels.apply_line_perm_sorted(frontier, p) for p in perms]
        )
        images = np.unique(images, axis=0)
        fresh = [row for row in images if row.tobytes() not in visited]
        for row in fresh:
            visited.add(row.tobytes())
        frontier = (
            np.array(fresh, dtype=np.uint8) if fresh else np.empty((0, 15), np.uint8)
        )
        if len(frontier):
            chunks.append(frontier)
            if progress is not None:
                progress(f"orbit: {sum(len(c) for c in chunks)} line sets")
    orbit = np.concatenate(chunks)
    _ORBIT_CACHE.append(orbit)
    return orbit


@dataclass(frozen=True)
class OrbitZReport:
    orbit_size: int
    one_line_in_solid: int  # images with exactly one line inside the solid
    with_line_r: int  # ... where that line is r
    bucket_counts: tuple  # (marked point on r, count) per point of r
    z: int  # per-flag count: fixed solid, fixed line, fixed marked point
    shortcut: int  # orbit_size / (31 * 35)
    agree: bool


def _solid_dual_of(solid) -> int:
    if isinstance(solid, Subspace):
        if (solid.v, solid.q, solid.dim) != (5, 2, 4):
            raise QdezaError("solid must be a 4-subspace of F_2^5")
        return next(
            h for h in range(1, 32) if all(_parity(w & h) == 0 for w in solid.rows)
        )
    return int(solid)


def badex_orbit_z_report(solid=None, r_line: int | None = None) -> OrbitZReport:
    """Filter the orbit by a (solid, line, marked point) flag and compare
    the direct count with the double-count shortcut orbit/(31*35).  The
    solid may be a dual word or a 4-subspace."""
    cfg = build_badex()
    tab = line_table(5)
    solid_dual = cfg.special_solids[0] if solid is None else _solid_dual_of(solid)
    if r_line is None:
        candidates = [
            i
            for i in cfg.line_ids
            if all(_parity(p & solid_dual) == 0 for p in tab.lines[i][:2])
        ]
        if len(candidates) != 1:
            raise QdezaError("solid does not contain exactly one badex line")
        r_line = candidates[0]
    orbit = badex_orbit()
    in_solid = np.zeros(len(tab.lines), dtype=bool)
    for i in range(len(tab.lines)):
        a, b, _ = tab.lines[i]
        in_solid[i] = _parity(a & solid_dual) == 0 and _parity(b & solid_dual) == 0
    counts = in_solid[orbit].sum(axis=1)
    one = orbit[counts == 1]
    unique_line = one[np.arange(len(one)), np.argmax(in_solid[one], axis=1)]
    with_r = one[unique_line == r_line]
    r_pts = tab.lines[r_line]
    buckets = []
    z = None
    for p in r_pts:
        on_p = np.array([p in tab.lines[i] for i in range(len(tab.lines))])
        cnt = int((on_p[with_r].sum(axis=1) == 3).sum())
        buckets.append((p, cnt))
    sizes = {c for _, c in buckets}
    if len(sizes) != 1:
        raise InvariantViolationError(f"flag buckets differ: {buckets}")
    z = buckets[0][1]
    shortcut = len(orbit) // (31 * 35)
    report = OrbitZReport(
        len(orbit), int((counts == 1).sum()), len(with_r), tuple(buckets), z, shortcut,
        z == shortcut,
    )
    if not report.agree:
        raise InvariantViolationError(
            f"direct z = {z} disagrees with shortcut {shortcut}"
        )
    return report


def badex_orbit_z(solid=None, r_line: int | None = None) -> int:
    return badex_orbit_z_report(solid, r_line).z


# ---------------------------------------------------------------------------
# couples


@dataclass(frozen=True)
class CoupleConfig:
    sigma: Subspace  # the solid, as a 4-subspace of F_2^6
    r_line: int  # line id in PG(5,2)
    lines_h: tuple  # base section E_H (15 ids)
    lines_h1: tuple  # E_H' (15 ids)
    lines_h2: tuple  # E_H'' (15 ids)

    def union_ids(self) -> tuple:
        return tuple(sorted(set(self.lines_h) | set(self.lines_h1) | set(self.lines_h2)))

    def x_points(self) -> frozenset:
        tab = line_table(6)
        pts = set(self.sigma.nonzero_words())
        for ids in (self.lines_h, self.lines_h1, self.lines_h2):
            deg: dict[int, int] = {}
            for i in ids:
                for p in tab.lines[i]:
                    deg[p] = deg.get(p, 0) + 1
            pts.update(p for p, d in deg.items() if d == 3)
        return frozenset(pts)

    def stable_key(self) -> str:
        payload = repr((self.sigma.rows, self.r_line, self.lines_h, self.lines_h1, self.lines_h2))
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class CouplesResult:
    candidate_pool: int
    retained: tuple  # tuple[CoupleConfig]
    per_assignment: tuple  # retained count per (P', P'') assignment


def _vec_times_rows(w: int, rows, vdim: int) -> int:
    out = 0
    while w:
        t = w.bit_length() - 1
        w ^= 1 << t
        out ^= rows[vdim - 1 - t]
    return out


def _invert_word_matrix(rows, v: int):
    aug = [(rows[i] << v) | (1 << (v - 1 - i)) for i in range(v)]
    red = gf.rref_words(aug, 2 * v)
    if len(red) != v or any(r < (1 << v) for r in red):
        raise QdezaError("singular basis matrix")
    mask = (1 << v) - 1
    return [r & mask for r in red]


def _complete_word_basis(pool, have):
    basis = list(have)
    out = []
    for p in pool:
        if len(_span_words(basis + [p])) > len(_span_words(basis)):
            basis.append(p)
            out.append(p)
    return out


def _flag_iso(model_flag, target_flag):
    """A linear map F_2^5 -> F_2^6 carrying (solid, line, point, space)
    onto the target flag; returned as five image words."""
    (u0, u1, u23, u4) = model_flag
    (w0, w1, w23, w4) = target_flag
    U = [u0, u1] + u23 + [u4]
    W = [w0, w1] + w23 + [w4]
    invU = _invert_word_matrix(U, 5)
    return [_vec_times_rows(r, W, 5) for r in invU]


def enumerate_couples(
    sigma: Subspace | None = None,
    r_line: int | None = None,
    base_lines: tuple | None = None,
    progress=None,
    budget: int | None = None,
) -> CouplesResult:
    """Stream the 2 * 1536^2 candidate couples over the two other
    hyperplanes through the solid and retain those whose 43-line union
    has three coplanar lines through every point of sigma minus r.

    Defaults: the badex configuration embedded in the hyperplane x5 = 0,
    with its first special solid.  A budget smaller than the candidate
    pool is refused."""
    if budget is not None and 2 * 1536 * 1536 > budget:
        raise BudgetExceededError(
            f"couple sweep needs {2 * 1536 * 1536} candidates, over budget {budget}"
        )
    tab5 = line_table(5)
    tab6 = line_table(6)
    cfg = build_badex()

    if sigma is None or r_line is None or base_lines is None:
        solid_dual = cfg.special_solids[0]

        def up(w):  # model coordinate j -> coordinate j of F_2^6 (last coord 0)
            return w << 1

        base_lines = tuple(
            sorted(tab6.id_of_words(up(tab5.lines[i][0]), up(tab5.lines[i][1])) for i in cfg.line_ids)
        )
        sigma_pts = [up(p) for p in range(1, 32) if _parity(p & solid_dual) == 0]
        sigma = gf.subspace_from_words(sigma_pts, 6)
        model_r = next(
            i for i in cfg.line_ids
            if all(_parity(p & solid_dual) == 0 for p in tab5.lines[i][:2])
        )
        r_line = tab6.id_of_words(up(tab5.lines[model_r][0]), up(tab5.lines[model_r][1]))
    if sigma.dim != 4:
        raise QdezaError("sigma must be a solid (4-dimensional subspace)")
    sigma_set = set(sigma.nonzero_words())
    r_pts6 = tab6.lines[r_line]
    if not set(r_pts6) <= sigma_set:
        raise QdezaError("r must lie inside sigma")

    # the base section's hyperplane and marked point on r
    base_deg: dict[int, int] = {}
    for i in base_lines:
        for p in tab6.lines[i]:
            base_deg[p] = base_deg.get(p, 0) + 1
    base_words = set()
    for i in base_lines:
        base_words.update(tab6.lines[i])
    H_base = gf.subspace_from_words(sorted(base_words), 6)
    if H_base.dim != 5:
        raise QdezaError("base section does not span a hyperplane")
    r_marked = [p for p in r_pts6 if base_deg.get(p, 0) == 3]
    if len(r_marked) != 1:
        raise QdezaError("base section must have exactly one triple point on r")
    R_pt = r_marked[0]
    inside = [
        i for i in base_lines
        if set(tab6.lines[i]) <= sigma_set
    ]
    if inside != [r_line]:
        raise QdezaError("r must be the unique base-section line inside sigma")

    duals = [
        h for h in range(1, 64)
        if all(_parity(p & h) == 0 for p in sigma.rows)
    ]
    base_dual = next(h for h in duals if all(_parity(w & h) == 0 for w in H_base.rows))
    h1_dual, h2_dual = [h for h in duals if h != base_dual]

    # model flag: the canonical special solid, its line, its marked point
    model_solid = cfg.special_solids[0]
    model_r = next(
        i for i in cfg.line_ids
        if all(_parity(p & model_solid) == 0 for p in tab5.lines[i][:2])
    )
    model_p0 = next(p for p in tab5.lines[model_r] if p in set(cfg.q_points))
    model_solid_pts = [p for p in range(1, 32) if _parity(p & model_solid) == 0]
    mu1 = min(p for p in tab5.lines[model_r] if p != model_p0)
    mu23 = _complete_word_basis(sorted(model_solid_pts), [model_p0, mu1])[:2]
    mu4 = _complete_word_basis(range(1, 32), [model_p0, mu1] + mu23)[0]
    model_flag_basis = (model_p0, mu1, mu23, mu4)

    # the 1536 model candidates with that flag
    orbit = badex_orbit()
    in_solid = np.zeros(len(tab5.lines), dtype=bool)
    for i in range(len(tab5.lines)):
        a, b, _ = tab5.lines[i]
        in_solid[i] = _parity(a & model_solid) == 0 and _parity(b & model_solid) == 0
    counts = in_solid[orbit].sum(axis=1)
    one = orbit[counts == 1]
    uline = one[np.arange(len(one)), np.argmax(in_solid[one], axis=1)]
    with_r = one[uline == model_r]
    on_p0 = np.array([model_p0 in tab5.lines[i] for i in range(len(tab5.lines))])
    bucket = with_r[on_p0[with_r].sum(axis=1) == 3]
    if progress is not None:
        progress(f"couples: {len(bucket)} flagged sections per hyperplane")

    def hyperplane_words(h):
        return [p for p in range(1, 64) if _parity(p & h) == 0]

    def target_flag(h_dual, point):
        w1 = min(p for p in r_pts6 if p != point)
        w23 = _complete_word_basis(sorted(sigma_set), [point, w1])[:2]
        w4 = _complete_word_basis(hyperplane_words(h_dual), [point, w1] + w23)[0]
        return (point, w1, w23, w4)

    def transport(h_dual, point) -> np.ndarray:
        iso = _flag_iso(model_flag_basis, target_flag(h_dual, point))
        ptmap = [0] * 32
        for p in range(1, 32):
            ptmap[p] = _vec_times_rows(p, iso, 5)
        lmap = np.empty(len(tab5.lines), dtype=np.int32)
        for i, (a, b, _) in enumerate(tab5.lines):
            lmap[i] = tab6.id_of_words(ptmap[a], ptmap[b])
        return np.sort(lmap[bucket], axis=1)

    t_points = sorted(sigma_set - set(r_pts6))
    through6 = {p: tab6.through[p] for p in t_points}
    idx_of = {p: {i: j for j, i in enumerate(through6[p])} for p in t_points}

    def through_vectors(cands: np.ndarray) -> np.ndarray:
        out = np.empty((len(cands), len(t_points)), dtype=np.int16)
        for ti, p in enumerate(t_points):
            onmask = np.zeros(len(tab6.lines), dtype=bool)
            for i in through6[p]:
                onmask[i] = True
            sel = onmask[cands]
            if not (sel.sum(axis=1) == 1).all():
                raise InvariantViolationError(
                    "candidate section must have exactly one line through each solid point"
                )
            ids = cands[np.arange(len(cands)), np.argmax(sel, axis=1)]
            out[:, ti] = [idx_of[p][int(i)] for i in ids]
        return out

    base_arr = np.array([base_lines], dtype=np.int32)
    base_vec = through_vectors(base_arr)[0]

    def coplanar_table(ti, p):
        nline = through6[p][base_vec[ti]]
        base_pts = set(tab6.lines[nline])
        tabs = np.zeros((len(through6[p]), len(through6[p])), dtype=bool)
        for i2, l2 in enumerate(through6[p]):
            for i3, l3 in enumerate(through6[p]):
                pts = base_pts | set(tab6.lines[l2]) | set(tab6.lines[l3])
                tabs[i2, i3] = len(_span_words(pts)) == 3
        return tabs

    cop = [coplanar_table(ti, p) for ti, p in enumerate(t_points)]
    pA, pB = [p for p in r_pts6 if p != R_pt]
    retained = []
    per_assignment = []
    pool = 0
    for ptA, ptB in ((pA, pB), (pB, pA)):
        candA = transport(h1_dual, ptA)
        candB = transport(h2_dual, ptB)
        pool += len(candA) * len(candB)
        vecA = through_vectors(candA)
        vecB = through_vectors(candB)
        ok = np.ones((len(candA), len(candB)), dtype=bool)
        for ti in range(len(t_points)):
            ok &= cop[ti][vecA[:, ti]][:, vecB[:, ti]]
        ii, jj = np.nonzero(ok)
        per_assignment.append(len(ii))
        for i, j in zip(ii.tolist(), jj.tolist()):
            retained.append(
                CoupleConfig(
                    sigma,
                    r_line,
                    tuple(base_lines),
                    tuple(int(x) for x in candA[i]),
                    tuple(int(x) for x in candB[j]),
                )
            )
        if progress is not None:
            progress(f"couples: assignment ({ptA},{ptB}) retained {len(ii)}")
    return CouplesResult(pool, tuple(retained), tuple(per_assignment))


def couple_union_degrees_ok(c: CoupleConfig) -> bool:
    """The 43-line union must give every point of X three coplanar lines
    and every other point exactly one."""
    tab = line_table(6)
    union = c.union_ids()
    if len(union) != 43:
        return False
    x_set = c.x_points()
    deg = {p: 0 for p in range(1, 64)}
    for i in union:
        for p in tab.lines[i]:
            deg[p] += 1
    for p in range(1, 64):
        want = 3 if p in x_set else 1
        if deg[p] != want:
            return False
    for p in x_set:
        pts = set()
        for i in union:
            if p in tab.lines[i]:
                pts.update(tab.lines[i])
        if len(_span_words(pts)) != 3:
            return False
    return True


def good_lines(c: CoupleConfig) -> tuple[tuple, int]:
    """Lines disjoint from X whose three planar pencils (against the
    unique section line meeting them) close up outside X."""
    tab = line_table(6)
    x_mask = 0
    for p in c.x_points():
        x_mask |= 1 << (p - 1)
    union = set(c.union_ids())
    sections = (set(c.lines_h), set(c.lines_h1), set(c.lines_h2))
    out = []
    for mi in range(len(tab.lines)):
        if tab.point_mask[mi] & x_mask or mi in union:
            continue
        good = True
        for sec in sections:
            meets = [s for s in sec if tab.point_mask[s] & tab.point_mask[mi]]
            if len(meets) != 1:
                good = False
                break
            nline = meets[0]
            plane = _span_words(set(tab.lines[mi]) | set(tab.lines[nline]))
            plane_pts = {0}
            for b in plane:
                plane_pts |= {x ^ b for x in plane_pts}
            third = plane_pts - {0} - set(tab.lines[mi]) - set(tab.lines[nline])
            if any(x_mask >> (p - 1) & 1 for p in third):
                good = False
                break
        if good:
            out.append(mi)
    return tuple(out), len(out)


def extend_and_identify(c: CoupleConfig) -> tuple[QaryGraph, str]:
    """Union a 20-good-line couple with its good lines; the 63-line set
    must classify as (6,2,1,0;2), and the generalized-hexagon test
    separates hexagon-type from singer-type."""
    lines, count = good_lines(c)
    if count != 20:
        raise QdezaError(f"couple has {count} good lines, expected exactly 20")
    ids = sorted(set(c.union_ids()) | set(lines))
    if len(ids) != 63:
        raise InvariantViolationError(f"extension has {len(ids)} lines, expected 63")
    g = lines_to_graph(6, ids)
    params, _ = classify_deza(g)
    if (params.v, params.k, params.b, params.a, params.q) != (6, 2, 1, 0, 2):
        raise InvariantViolationError(f"extension classified as {params}")
    tag = "hexagon-type" if is_generalized_hexagon(g) else "singer-type"
    return g, tag
