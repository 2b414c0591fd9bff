"""q-ary graphs: vertices are the 1-subspaces of F_q^v, edges a chosen
set of 2-subspaces.  Vertices are implicit (never stored); a graph is its
edge set plus the ambient.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from . import gf
from .errors import AmbientMismatchError, FormatError, NotRegularError, QdezaError
from .gf import Subspace, gaussian_bracket


@dataclass(frozen=True)
class QaryGraph:
    v: int
    q: int
    edges: frozenset  # frozenset[Subspace], each of dimension 2

    def __post_init__(self):
        for e in self.edges:
            if e.ambient != (self.v, self.q):
                raise AmbientMismatchError(f"edge ambient {e.ambient} != ({self.v},{self.q})")
            if e.dim != 2:
                raise QdezaError(f"edge of dimension {e.dim}; edges must be 2-subspaces")

    @classmethod
    def from_subspaces(cls, v: int, q: int, edges) -> "QaryGraph":
        return cls(v, q, frozenset(edges))

    @classmethod
    def from_edge_ids(cls, v: int, q: int, ids) -> "QaryGraph":
        return cls(v, q, frozenset(gf.subspace_from_id(v, 2, q, i) for i in ids))

    @property
    def n_vertices(self) -> int:
        return gaussian_bracket(self.v, self.q)

    def edge_ids(self) -> tuple[int, ...]:
        """Sorted SubspaceIds of the edges (needs the (v,2,q) enumeration
        to be within budget)."""
        return tuple(sorted(gf.subspace_id(e) for e in self.edges))

    def sorted_edges(self) -> tuple[Subspace, ...]:
        return tuple(sorted(self.edges, key=lambda s: s.rows))

    @cached_property
    def _inc(self) -> "_Incidence":
        return _Incidence(self)

    def has_edge(self, x: Subspace, y: Subspace) -> bool:
        return gf.subspace_sum(x, y) in self.edges


class _Incidence:
    """Point/edge incidence tables; point index = SubspaceId of the
    1-subspace in the canonical enumeration."""

    def __init__(self, g: QaryGraph):
        v, q = g.v, g.q
        self.points = gf.enumerate_subspaces(v, 1, q)
        self.pindex = {s: i for i, s in enumerate(self.points)}
        self.n = len(self.points)
        self.edge_list = g.sorted_edges()
        self.edge_points = []
        for e in self.edge_list:
            ids = tuple(sorted(self.pindex[p] for p in e.points()))
            self.edge_points.append(ids)
        self.point_edges = [[] for _ in range(self.n)]
        for ei, pts in enumerate(self.edge_points):
            for p in pts:
                self.point_edges[p].append(ei)
        # neighborhood masks (self included)
        self.nbr_mask = []
        for i in range(self.n):
            m = 1 << i
            for ei in self.point_edges[i]:
                for p in self.edge_points[ei]:
                    m |= 1 << p
            self.nbr_mask.append(m)

    def point_words(self, ids):
        # q = 2 helper: representative word of each listed point
        return [self.points[i].rows[0] for i in ids]


@dataclass(frozen=True)
class Neighborhood:
    center: Subspace
    members: frozenset  # frozenset[Subspace] of 1-subspaces, center included
    closure: Subspace | None  # the spanned subspace when members fill it


@dataclass(frozen=True)
class RegularityReport:
    is_regular: bool
    k: int | None
    witness: Subspace | None


@dataclass(frozen=True)
class ClassicalGraph:
    """Simple graph on the [v]_q 1-subspaces; vertex labels are the
    SubspaceIds of the point enumeration."""

    n: int
    adj: tuple  # tuple[int]: adjacency bitmask per vertex

    def degree(self, i: int) -> int:
        return self.adj[i].bit_count()

    def degrees(self) -> tuple[int, ...]:
        return tuple(m.bit_count() for m in self.adj)

    def edge_count(self) -> int:
        return sum(self.degrees()) // 2

    def has_edge(self, i: int, j: int) -> bool:
        return bool((self.adj[i] >> j) & 1)

    def common_neighbors(self, i: int, j: int) -> int:
        return (self.adj[i] & self.adj[j]).bit_count()

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        seen = 1
        frontier = 1
        while frontier:
            nxt = 0
            m = frontier
            while m:
                i = m.bit_length() - 1
                m ^= 1 << i
                nxt |= self.adj[i]
            frontier = nxt & ~seen
            seen |= frontier
        return seen == (1 << self.n) - 1


def _members_closure(g: QaryGraph, member_ids) -> Subspace | None:
    inc = g._inc
    if g.q == 2:
        words = inc.point_words(member_ids)
        s = gf.subspace_from_words(words, g.v)
    else:
        rows = [inc.points[i].rows[0] for i in member_ids]
        s = gf.subspace_from_rows(rows, g.v, g.q)
    if len(member_ids) == gaussian_bracket(s.dim, g.q):
        return s
    return None


def _member_ids(g: QaryGraph, pid: int):
    inc = g._inc
    ids = {pid}
    for ei in inc.point_edges[pid]:
        ids.update(inc.edge_points[ei])
    return sorted(ids)


def neighborhood(g: QaryGraph, x: Subspace) -> Neighborhood:
    """All vertices adjacent to x, plus x; the closure is present iff the
    member set is exactly the point set of a subspace."""
    if x.dim != 1:
        raise QdezaError(f"neighborhood center must be a 1-subspace, got dim {x.dim}")
    if x.ambient != (g.v, g.q):
        raise AmbientMismatchError("vertex outside the graph's ambient")
    inc = g._inc
    pid = inc.pindex[x]
    ids = _member_ids(g, pid)
    members = frozenset(inc.points[i] for i in ids)
    return Neighborhood(x, members, _members_closure(g, ids))


def regularity(g: QaryGraph) -> RegularityReport:
    """k-regularity: every neighborhood is the point set of one common
    (k+1)-dimensional subspace.  A failing vertex is reported."""
    inc = g._inc
    k = None
    for pid in range(inc.n):
        ids = _member_ids(g, pid)
        closure = _members_closure(g, ids)
        if closure is None:
            return RegularityReport(False, None, inc.points[pid])
        if k is None:
            k = closure.dim - 1
        elif closure.dim - 1 != k:
            return RegularityReport(False, None, inc.points[pid])
    if k is None:  # v = 0 has no points; vacuously 0-regular
        k = 0
    return RegularityReport(True, k, None)


def edge_count_identity(g: QaryGraph, k: int) -> bool:
    """|E| = [v]_q [k]_q / [2]_q for a k-regular graph."""
    rep = regularity(g)
    if not (rep.is_regular and rep.k == k):
        raise NotRegularError(f"graph is not {k}-regular", witness=rep.witness)
    q = g.q
    num = gaussian_bracket(g.v, q) * gaussian_bracket(k, q)
    den = gaussian_bracket(2, q)
    return len(g.edges) * den == num


def common_neighbors(g: QaryGraph, x: Subspace, y: Subspace) -> int:
    """|(N(x) ∩ N(y)) \\ {x, y}| for distinct vertices."""
    if x == y:
        raise QdezaError("common_neighbors needs two distinct vertices")
    inc = g._inc
    xi, yi = inc.pindex[x], inc.pindex[y]
    m = inc.nbr_mask[xi] & inc.nbr_mask[yi]
    count = m.bit_count()
    if (m >> xi) & 1:
        count -= 1
    if (m >> yi) & 1:
        count -= 1
    return count


def collapse(g: QaryGraph) -> ClassicalGraph:
    """The classical simple graph: u ~ w iff their joint span is an edge."""
    inc = g._inc
    adj = [0] * inc.n
    for pts in inc.edge_points:
        for a in pts:
            for b in pts:
                if a != b:
                    adj[a] |= 1 << b
    return ClassicalGraph(inc.n, tuple(adj))


def is_connected(g: QaryGraph) -> bool:
    return collapse(g).is_connected()


def complete_graph(v: int, q: int) -> QaryGraph:
    return QaryGraph(v, q, frozenset(gf.enumerate_subspaces(v, 2, q)))


def empty_graph(v: int, q: int) -> QaryGraph:
    return QaryGraph(v, q, frozenset())


# ---------------------------------------------------------------------------
# line-set text format: header "qgraph v=<v> q=<q>", then one edge per
# line as two comma-separated coordinate vectors, e.g. "100000,011000".


def format_lineset(g: QaryGraph) -> str:
    lines = [f"qgraph v={g.v} q={g.q}"]
    for e in g.sorted_edges():
        r0, r1 = e.row_coords()[0], e.row_coords()[1]
        lines.append(
            "".join(str(c) for c in r0) + "," + "".join(str(c) for c in r1)
        )
    return "\n".join(lines) + "\n"


def parse_lineset(text: str) -> QaryGraph:
    rows = [ln.strip() for ln in text.splitlines()]
    rows = [ln for ln in rows if ln and not ln.startswith("#")]
    if not rows:
        raise FormatError("empty line-set file")
    head = rows[0].split()
    if len(head) != 3 or head[0] != "qgraph":
        raise FormatError(f"bad header: {rows[0]!r}")
    try:
        v = int(head[1].removeprefix("v="))
        q = int(head[2].removeprefix("q="))
    except ValueError as exc:
        raise FormatError(f"bad header: {rows[0]!r}") from exc
    edges = set()
    for ln in rows[1:]:
        parts = ln.split(",")
        if len(parts) != 2:
            raise FormatError(f"edge line needs two vectors: {ln!r}")
        vecs = []
        for part in parts:
            if len(part) != v or not all(ch.isdigit() for ch in part):
                raise FormatError(f"bad coordinate vector {part!r} for v={v}")
            coords = tuple(int(ch) for ch in part)
            if any(c >= q for c in coords):
                raise FormatError(f"coordinate out of range for q={q}: {part!r}")
            vecs.append(coords)
        s = gf.subspace_from_rows(vecs, v, q)
        if s.dim != 2:
            raise FormatError(f"rank-deficient edge: {ln!r}")
        edges.add(s)
    return QaryGraph(v, q, frozenset(edges))
