"""Finite-field scalars, vectors and subspaces of F_q^v.

Vectors over F_2 are packed into machine words: coordinate j of a
v-dimensional vector sits at bit (v-1-j), so the numeric order of words
coincides with lexicographic order on coordinate tuples and the pivot of
a row is its highest set bit.  Over other small fields vectors are plain
coordinate tuples with table-driven arithmetic.

Subspaces are canonicalized to their reduced row-echelon basis, which
makes set-equality a tuple comparison and subspaces hashable.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from itertools import combinations, product

from .errors import AmbientMismatchError, BudgetExceededError, QdezaError

# Largest subspace enumeration materialized by default (covers k <= 2,
# v <= 10 at q = 2; anything bigger must be requested explicitly).
DEFAULT_ENUM_BUDGET = 500_000


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def factor_prime_power(q: int) -> tuple[int, int]:
    """Return (p, e) with q = p^e, p prime; raise otherwise."""
    if q < 2:
        raise QdezaError(f"q = {q} is not a prime power")
    for p in range(2, q + 1):
        if not _is_prime(p):
            continue
        if q % p == 0:
            e = 0
            m = q
            while m % p == 0:
                m //= p
                e += 1
            if m != 1:
                raise QdezaError(f"q = {q} is not a prime power")
            return p, e
    raise QdezaError(f"q = {q} is not a prime power")


# ---------------------------------------------------------------------------
# polynomial helpers over F_p (coefficient tuples, index = degree)


def _poly_trim(c):
    while c and c[-1] == 0:
        c = c[:-1]
    return c


def _poly_mod(a, m, p):
    a = list(a)
    dm = len(m) - 1
    while len(a) - 1 >= dm and any(a):
        if a[-1] == 0:
            a.pop()
            continue
        shift = len(a) - 1 - dm
        factor = a[-1]
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - factor * mi) % p
        a = list(_poly_trim(tuple(a)))
    return tuple(_poly_trim(tuple(a)))


def _poly_mul(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return tuple(_poly_trim(tuple(out)))


def _monic_polys(p: int, deg: int):
    for tail in product(range(p), repeat=deg):
        yield tail + (1,)


def poly_is_irreducible(coeffs: tuple[int, ...], p: int) -> bool:
    """Trial division by every monic polynomial of lower degree >= 1."""
    coeffs = tuple(_poly_trim(tuple(c % p for c in coeffs)))
    deg = len(coeffs) - 1
    if deg < 1:
        return False
    if coeffs[0] == 0 and deg > 1:
        return False  # divisible by x
    for d in range(1, deg // 2 + 1):
        for g in _monic_polys(p, d):
            if not _poly_mod(coeffs, g, p):
                return False
    return True


@functools.lru_cache(maxsize=None)
def default_modulus(p: int, e: int) -> tuple[int, ...]:
    """Lowest monic irreducible of degree e over F_p, by lexicographic
    order on the coefficient tuple (c_0, ..., c_{e-1})."""
    if e == 1:
        return (0, 1)
    for f in _monic_polys(p, e):
        if poly_is_irreducible(f, p):
            return f
    raise QdezaError("no irreducible polynomial found")  # unreachable


class GF:
    """The field F_q, q = p^e, with table-driven arithmetic.

    Elements are integers 0..q-1; for e > 1 the base-p digits of an
    element are the polynomial coefficients (constant digit first).
    """

    def __init__(self, q: int, modulus: tuple[int, ...] | None = None):
        p, e = factor_prime_power(q)
        self.q, self.p, self.e = q, p, e
        if e == 1:
            self.modulus = (0, 1)
        else:
            if modulus is None:
                modulus = default_modulus(p, e)
            modulus = tuple(c % p for c in modulus)
            if len(modulus) != e + 1 or modulus[-1] != 1:
                raise QdezaError(f"modulus must be monic of degree {e}")
            if not poly_is_irreducible(modulus, p):
                raise QdezaError(f"modulus {modulus} is reducible over F_{p}")
            self.modulus = modulus
        self._build_tables()

    def _encode(self, coeffs) -> int:
        x = 0
        for c in reversed(coeffs):
            x = x * self.p + c
        return x

    def _decode(self, x: int):
        out = []
        for _ in range(self.e):
            out.append(x % self.p)
            x //= self.p
        return tuple(out)

    def _build_tables(self):
        q, p = self.q, self.p
        self._add = [[0] * q for _ in range(q)]
        self._mul = [[0] * q for _ in range(q)]
        for a in range(q):
            ca = self._decode(a)
            for b in range(q):
                cb = self._decode(b)
                self._add[a][b] = self._encode(
                    tuple((x + y) % p for x, y in zip(ca, cb))
                )
                prod = _poly_mul(_poly_trim(ca), _poly_trim(cb), p)
                prod = _poly_mod(prod, self.modulus, p)
                self._mul[a][b] = self._encode(prod + (0,) * (self.e - len(prod)))
        self._neg = [self._encode(tuple((-x) % p for x in self._decode(a))) for a in range(q)]
        self._inv = [0] * q
        for a in range(1, q):
            for b in range(1, q):
                if self._mul[a][b] == 1:
                    self._inv[a] = b
                    break
            else:
                raise QdezaError("field table construction failed")

    def add(self, a, b):
        return self._add[a][b]

    def sub(self, a, b):
        return self._add[a][self._neg[b]]

    def mul(self, a, b):
        return self._mul[a][b]

    def neg(self, a):
        return self._neg[a]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return self._inv[a]

    def __eq__(self, other):
        return isinstance(other, GF) and (self.q, self.modulus) == (other.q, other.modulus)

    def __hash__(self):
        return hash((self.q, self.modulus))

    def __repr__(self):
        return f"GF({self.q})"


@functools.lru_cache(maxsize=None)
def field(q: int) -> GF:
    """F_q with the default (lowest lexicographic) modulus."""
    return GF(q)


# ---------------------------------------------------------------------------
# counting


def gaussian_bracket(i: int, q: int) -> int:
    """[i]_q = (q^i - 1)/(q - 1), the number of vector lines of F_q^i."""
    if i < 0:
        raise QdezaError("negative dimension")
    return (q**i - 1) // (q - 1)


def gaussian_binomial(v: int, k: int, q: int) -> int:
    """Number of k-dimensional subspaces of F_q^v."""
    if not 0 <= k <= v:
        raise QdezaError(f"need 0 <= k <= v, got k={k}, v={v}")
    num, den = 1, 1
    for i in range(k):
        num *= q ** (v - i) - 1
        den *= q ** (k - i) - 1
    assert num % den == 0
    return num // den


# ---------------------------------------------------------------------------
# word packing (q = 2)


def word_from_coords(coords) -> int:
    w = 0
    v = len(coords)
    for j, c in enumerate(coords):
        if c:
            w |= 1 << (v - 1 - j)
    return w


def coords_from_word(w: int, v: int) -> tuple[int, ...]:
    return tuple((w >> (v - 1 - j)) & 1 for j in range(v))


@dataclass(frozen=True)
class Vector:
    """A vector of F_q^v held as a coordinate tuple."""

    q: int
    coords: tuple[int, ...]

    def __post_init__(self):
        if any(not 0 <= c < self.q for c in self.coords):
            raise QdezaError(f"coordinates out of range for q={self.q}")

    @property
    def v(self) -> int:
        return len(self.coords)

    @property
    def word(self) -> int:
        """Bit-packed form; q = 2 only."""
        if self.q != 2:
            raise QdezaError("word packing is defined for q = 2 only")
        return word_from_coords(self.coords)

    def __add__(self, other: "Vector") -> "Vector":
        if self.q != other.q or self.v != other.v:
            raise AmbientMismatchError("vector addition across ambients")
        gf = field(self.q)
        return Vector(self.q, tuple(gf.add(a, b) for a, b in zip(self.coords, other.coords)))

    def scale(self, c: int) -> "Vector":
        gf = field(self.q)
        return Vector(self.q, tuple(gf.mul(c, x) for x in self.coords))

    def is_zero(self) -> bool:
        return not any(self.coords)


def unit_vector(q: int, v: int, j: int) -> Vector:
    return Vector(q, tuple(1 if i == j else 0 for i in range(v)))


# ---------------------------------------------------------------------------
# row reduction


def rref_words(words, v: int) -> tuple[int, ...]:
    """Reduced row-echelon basis of the span of bit-packed GF(2) rows,
    ordered by pivot coordinate (numerically descending)."""
    piv = {}
    for w in words:
        while w:
            p = w.bit_length() - 1
            if p in piv:
                w ^= piv[p]
            else:
                piv[p] = w
                break
    for p in sorted(piv):
        row = piv[p]
        for p2 in piv:
            if p2 > p and (piv[p2] >> p) & 1:
                piv[p2] ^= row
    return tuple(piv[p] for p in sorted(piv, reverse=True))


def rref_rows(rows, q: int) -> tuple[tuple[int, ...], ...]:
    """Reduced row-echelon basis over F_q for coordinate-tuple rows."""
    gf = field(q)
    mat = [list(r) for r in rows]
    m = len(mat)
    if m == 0:
        return ()
    n = len(mat[0])
    pivots = []
    r = 0
    for col in range(n):
        sel = None
        for i in range(r, m):
            if mat[i][col]:
                sel = i
                break
        if sel is None:
            continue
        mat[r], mat[sel] = mat[sel], mat[r]
        inv = gf.inv(mat[r][col])
        mat[r] = [gf.mul(inv, x) for x in mat[r]]
        for i in range(m):
            if i != r and mat[i][col]:
                c = mat[i][col]
                mat[i] = [gf.sub(x, gf.mul(c, y)) for x, y in zip(mat[i], mat[r])]
        pivots.append(col)
        r += 1
        if r == m:
            break
    return tuple(tuple(mat[i]) for i in range(r))


@dataclass(frozen=True)
class Subspace:
    """A subspace of F_q^v in canonical (reduced row-echelon) form.

    ``rows`` holds bit-packed words when q = 2 and coordinate tuples
    otherwise; two subspaces are equal as vector sets iff the dataclass
    fields compare equal.
    """

    v: int
    q: int
    rows: tuple

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def ambient(self) -> tuple[int, int]:
        return (self.v, self.q)

    def row_coords(self) -> tuple[tuple[int, ...], ...]:
        if self.q == 2:
            return tuple(coords_from_word(w, self.v) for w in self.rows)
        return self.rows

    def basis_vectors(self) -> tuple[Vector, ...]:
        return tuple(Vector(self.q, c) for c in self.row_coords())

    def vectors(self):
        """Iterate all q^dim vectors of the subspace (zero included)."""
        if self.q == 2:
            for mask in range(1 << self.dim):
                w = 0
                for i in range(self.dim):
                    if (mask >> i) & 1:
                        w ^= self.rows[i]
                yield Vector(2, coords_from_word(w, self.v))
        else:
            gf = field(self.q)
            for cs in product(range(self.q), repeat=self.dim):
                acc = [0] * self.v
                for c, row in zip(cs, self.rows):
                    if c:
                        acc = [gf.add(x, gf.mul(c, y)) for x, y in zip(acc, row)]
                yield Vector(self.q, tuple(acc))

    def nonzero_words(self) -> tuple[int, ...]:
        """All nonzero vectors as packed words (q = 2 only)."""
        if self.q != 2:
            raise QdezaError("words are defined for q = 2 only")
        out = [0]
        for r in self.rows:
            out += [x ^ r for x in out]
        return tuple(sorted(out[1:]))

    def points(self) -> tuple["Subspace", ...]:
        """The 1-subspaces contained in this subspace."""
        if self.q == 2:
            return tuple(
                Subspace(self.v, 2, (w,)) for w in self.nonzero_words()
            )
        seen = set()
        out = []
        for vec in self.vectors():
            if vec.is_zero():
                continue
            s = span([vec])
            if s not in seen:
                seen.add(s)
                out.append(s)
        return tuple(sorted(out, key=lambda s: s.rows))

    def sort_key(self):
        return self.rows

    def __le__(self, other: "Subspace") -> bool:
        return contains(other, self)


def subspace_from_words(words, v: int) -> Subspace:
    return Subspace(v, 2, rref_words(words, v))


def subspace_from_rows(rows, v: int, q: int) -> Subspace:
    if q == 2:
        return subspace_from_words([word_from_coords(r) for r in rows], v)
    for r in rows:
        if len(r) != v:
            raise AmbientMismatchError("row length differs from ambient dimension")
    return Subspace(v, q, rref_rows(rows, q))


def zero_subspace(v: int, q: int) -> Subspace:
    return Subspace(v, q, ())


def full_space(v: int, q: int) -> Subspace:
    return subspace_from_rows([tuple(1 if i == j else 0 for i in range(v)) for j in range(v)], v, q)


def span(vectors, v: int | None = None, q: int | None = None) -> Subspace:
    """Canonical subspace spanned by Vectors sharing an ambient.  The
    ambient is inferred from the vectors; spanning an empty list needs
    it passed explicitly (the result is the zero subspace)."""
    vectors = list(vectors)
    if not vectors:
        if v is None or q is None:
            raise QdezaError("span([]) needs an explicit ambient (v, q)")
        return zero_subspace(v, q)
    if q is None:
        q = vectors[0].q
    if v is None:
        v = vectors[0].v
    for vec in vectors:
        if vec.q != q or vec.v != v:
            raise AmbientMismatchError("span over mixed ambients")
    return subspace_from_rows([vec.coords for vec in vectors], v, q)


def _check_ambient(a: Subspace, b) -> None:
    if a.ambient != b.ambient:
        raise AmbientMismatchError(f"{a.ambient} vs {b.ambient}")


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    """span(a ∪ b)."""
    _check_ambient(a, b)
    if a.q == 2:
        return subspace_from_words(a.rows + b.rows, a.v)
    return Subspace(a.v, a.q, rref_rows(a.rows + b.rows, a.q))


def intersect(a: Subspace, b: Subspace) -> Subspace:
    """Intersection via the Zassenhaus block trick."""
    _check_ambient(a, b)
    v = a.v
    if a.q == 2:
        stacked = [(r << v) | r for r in a.rows] + [r << v for r in b.rows]
        reduced = rref_words(stacked, 2 * v)
        rows = [r & ((1 << v) - 1) for r in reduced if r < (1 << v) and r]
        return subspace_from_words(rows, v)
    stacked = [tuple(r) + tuple(r) for r in a.rows] + [tuple(r) + (0,) * v for r in b.rows]
    reduced = rref_rows(stacked, a.q)
    rows = [r[v:] for r in reduced if not any(r[:v]) and any(r[v:])]
    return subspace_from_rows(rows, v, a.q)


def contains(outer: Subspace, inner) -> bool:
    """True iff every vector of ``inner`` (Subspace or Vector) is in ``outer``."""
    if isinstance(inner, Vector):
        if (outer.v, outer.q) != (inner.v, inner.q):
            raise AmbientMismatchError("contains across ambients")
        if inner.is_zero():
            return True
        inner = span([inner])
    _check_ambient(outer, inner)
    if outer.q == 2:
        piv = {r.bit_length() - 1: r for r in outer.rows}
        for w in inner.rows:
            while w:
                p = w.bit_length() - 1
                if p not in piv:
                    return False
                w ^= piv[p]
        return True
    return subspace_sum(outer, inner) == outer


# ---------------------------------------------------------------------------
# enumeration


@functools.lru_cache(maxsize=64)
def _enumeration(v: int, k: int, q: int, budget: int) -> tuple[Subspace, ...]:
    count = gaussian_binomial(v, k, q)
    if count > budget:
        raise BudgetExceededError(
            f"enumerating {count} {k}-subspaces of F_{q}^{v} exceeds budget {budget}"
        )
    out = []
    if k == 0:
        return (zero_subspace(v, q),)
    for pivots in combinations(range(v), k):
        free_cells = []
        for i, pi in enumerate(pivots):
            for j in range(pi + 1, v):
                if j not in pivots:
                    free_cells.append((i, j))
        base = [[0] * v for _ in range(k)]
        for i, pi in enumerate(pivots):
            base[i][pi] = 1
        for assignment in product(range(q), repeat=len(free_cells)):
            rows = [r[:] for r in base]
            for (i, j), val in zip(free_cells, assignment):
                rows[i][j] = val
            if q == 2:
                words = tuple(word_from_coords(r) for r in rows)
                out.append(Subspace(v, 2, words))
            else:
                out.append(Subspace(v, q, tuple(tuple(r) for r in rows)))
    out.sort(key=lambda s: s.rows)
    assert len(out) == count
    return tuple(out)


def enumerate_subspaces(v: int, k: int, q: int, budget: int | None = None):
    """All k-subspaces of F_q^v in canonical order (lexicographic on the
    echelon basis).  The emission index is the SubspaceId."""
    return _enumeration(v, k, q, budget if budget is not None else DEFAULT_ENUM_BUDGET)


def enumerate_subspaces_iter(v: int, k: int, q: int, start: int = 0):
    """Restartable stream over the canonical enumeration."""
    table = enumerate_subspaces(v, k, q)
    for i in range(start, len(table)):
        yield table[i]


# ---------------------------------------------------------------------------
# polynomials over F_q (coefficients are field elements, index = degree)


def gfpoly_mul(a, b, gf: GF):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = gf.add(out[i + j], gf.mul(ai, bj))
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def gfpoly_mod(a, m, gf: GF):
    a = list(a)
    dm = len(m) - 1
    lead_inv = gf.inv(m[-1])
    while len(a) - 1 >= dm:
        if a[-1] == 0:
            a.pop()
            continue
        factor = gf.mul(a[-1], lead_inv)
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = gf.sub(a[shift + i], gf.mul(factor, mi))
        while a and a[-1] == 0:
            a.pop()
    return tuple(a)


def gfpoly_is_irreducible(m, gf: GF) -> bool:
    """Trial division over F_q by all monic polynomials of degree 1..deg/2."""
    deg = len(m) - 1
    if deg < 1 or m[-1] == 0:
        return False
    for d in range(1, deg // 2 + 1):
        for tail in product(range(gf.q), repeat=d):
            g = tail + (1,)
            if not gfpoly_mod(m, g, gf):
                return False
    return True


@functools.lru_cache(maxsize=None)
def default_modulus_over(q: int, n: int) -> tuple[int, ...]:
    """Lowest-lex monic irreducible of degree n over F_q (field elements
    as integers, constant coefficient first)."""
    gf = field(q)
    if n == 1:
        return (0, 1)
    for tail in product(range(q), repeat=n):
        m = tail + (1,)
        if gfpoly_is_irreducible(m, gf):
            return m
    raise QdezaError("no irreducible polynomial found")  # unreachable


def companion_matrix(modulus, q: int) -> tuple[tuple[int, ...], ...]:
    """Companion matrix of a monic polynomial acting on row vectors from
    the right: row j is the image of the monomial x^j."""
    gf = field(q)
    n = len(modulus) - 1
    rows = []
    for j in range(n - 1):
        rows.append(tuple(1 if i == j + 1 else 0 for i in range(n)))
    rows.append(tuple(gf.neg(c) for c in modulus[:-1]))
    return tuple(rows)


def nullspace(rows, ncols: int, q: int) -> tuple[tuple[int, ...], ...]:
    """Basis of {x in F_q^ncols : M x = 0} for the matrix with the given
    rows (each a length-ncols coordinate tuple)."""
    gf = field(q)
    reduced = rref_rows(rows, q) if rows else ()
    pivot_cols = []
    for r in reduced:
        for c, x in enumerate(r):
            if x:
                pivot_cols.append(c)
                break
    free_cols = [c for c in range(ncols) if c not in pivot_cols]
    basis = []
    for fc in free_cols:
        vec = [0] * ncols
        vec[fc] = 1
        for r, pc in zip(reduced, pivot_cols):
            # pivot value is 1; solve pivot var = -sum(free part)
            vec[pc] = gf.neg(r[fc])
        basis.append(tuple(vec))
    return tuple(basis)


@functools.lru_cache(maxsize=64)
def _id_index(v: int, k: int, q: int) -> dict:
    return {s: i for i, s in enumerate(enumerate_subspaces(v, k, q))}


def subspace_id(s: Subspace) -> int:
    """Rank of a subspace within the canonical enumeration of its (v, k, q)."""
    try:
        return _id_index(s.v, s.dim, s.q)[s]
    except KeyError:
        raise QdezaError(f"subspace {s} not found in enumeration") from None


def subspace_from_id(v: int, k: int, q: int, rank: int) -> Subspace:
    table = enumerate_subspaces(v, k, q)
    if not 0 <= rank < len(table):
        raise QdezaError(f"rank {rank} out of range for ({v},{k},{q})")
    return table[rank]
