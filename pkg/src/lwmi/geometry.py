"""Exact rational polytope geometry: vertices, triangulation and volume.

A :class:`Polytope` is an H-representation ``{x : a_i . x <= c_i}``.  Every
polytope built by the engine includes its variable bounding box, so it is
bounded.  All arithmetic is done in :class:`fractions.Fraction`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from itertools import combinations
from math import comb, factorial
from typing import Iterable, Sequence

from .errors import BackendUnavailableError, CapacityError

VERTEX_SUBSET_CAP = 10**6
TRIANGULATION_DIM_CAP = 3

Point = tuple[Fraction, ...]


@dataclass(frozen=True)
class Halfspace:
    """``a . x <= c``."""

    a: tuple[Fraction, ...]
    c: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(Fraction(v) for v in self.a))
        object.__setattr__(self, "c", Fraction(self.c))

    def slack(self, x: Sequence) -> Fraction:
        return self.c - sum((ai * xi for ai, xi in zip(self.a, x)), Fraction(0))

    def complement(self) -> Halfspace:
        """Closed complement ``a . x >= c`` written as ``-a . x <= -c``."""
        return Halfspace(tuple(-v for v in self.a), -self.c)


# -- exact linear algebra ---------------------------------------------------


def _solve(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> Point | None:
    """Solve a square system exactly; ``None`` if singular."""
    n = len(rows)
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return None
        m[col], m[pivot] = m[pivot], m[col]
        inv = 1 / m[col][col]
        prow = [v * inv for v in m[col]]
        m[col] = prow
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], prow)]
    return tuple(m[r][n] for r in range(n))


def determinant(matrix: Sequence[Sequence]) -> Fraction:
    m = [[Fraction(v) for v in row] for row in matrix]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        det *= m[col][col]
        for r in range(col + 1, n):
            if m[r][col] != 0:
                f = m[r][col] / m[col][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[col])]
    return det


def rank(vectors: Sequence[Sequence]) -> int:
    m = [[Fraction(v) for v in row] for row in vectors]
    if not m:
        return 0
    ncols = len(m[0])
    r = 0
    for col in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                f = m[i][col] / m[r][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r


def affine_rank(points: Sequence[Point]) -> int:
    """Dimension of the affine hull; -1 for no points."""
    if not points:
        return -1
    base = points[0]
    return rank([[a - b for a, b in zip(p, base)] for p in points[1:]])


# -- simplices --------------------------------------------------------------


@dataclass(frozen=True)
class Simplex:
    vertices: tuple[Point, ...]

    def __post_init__(self):
        verts = tuple(tuple(Fraction(v) for v in p) for p in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if len(verts) != len(verts[0]) + 1:
            raise ValueError("an N-simplex needs exactly N+1 vertices")

    @property
    def dim(self) -> int:
        return len(self.vertices[0])

    def edge_determinant(self) -> Fraction:
        v0 = self.vertices[0]
        return determinant([[a - b for a, b in zip(v, v0)] for v in self.vertices[1:]])

    def volume(self) -> Fraction:
        return abs(self.edge_determinant()) / factorial(self.dim)


# -- polytopes --------------------------------------------------------------


@dataclass
class Polytope:
    dim: int
    halfspaces: tuple[Halfspace, ...]
    _vertices: list[Point] | None = field(default=None, repr=False, compare=False)
    _simplices: list[Simplex] | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.halfspaces = tuple(self.halfspaces)
        for h in self.halfspaces:
            if len(h.a) != self.dim:
                raise ValueError(f"halfspace {h} does not have dimension {self.dim}")

    @classmethod
    def box(cls, bounds: Sequence[tuple]) -> Polytope:
        n = len(bounds)
        hs = []
        for i, (lo, hi) in enumerate(bounds):
            e = [0] * n
            e[i] = 1
            hs.append(Halfspace(tuple(e), hi))
            e[i] = -1
            hs.append(Halfspace(tuple(e), -Fraction(lo)))
        return cls(n, tuple(hs))

    def intersect(self, extra: Iterable[Halfspace]) -> Polytope:
        return Polytope(self.dim, self.halfspaces + tuple(extra))

    def contains(self, x: Sequence) -> bool:
        return all(h.slack(x) >= 0 for h in self.halfspaces)

    @property
    def vertices(self) -> list[Point]:
        if self._vertices is None:
            self._vertices = vertex_enumeration(self)
        return self._vertices

    def is_empty(self) -> bool:
        return not self.vertices


def vertex_enumeration(p: Polytope, *, subset_cap: int = VERTEX_SUBSET_CAP) -> list[Point]:
    """All vertices of ``p`` by exhaustive basic-solution enumeration.

    Returned in lexicographic order, deduplicated by exact equality.
    """
    n, hs = p.dim, p.halfspaces
    if comb(len(hs), n) > subset_cap:
        raise CapacityError(
            f"C({len(hs)}, {n}) constraint subsets exceeds the cap of {subset_cap}"
        )
    found: set[Point] = set()
    for subset in combinations(hs, n):
        x = _solve([h.a for h in subset], [h.c for h in subset])
        if x is None or x in found:
            continue
        if all(h.slack(x) >= 0 for h in hs):
            found.add(x)
    return sorted(found)


def _incidence(p: Polytope) -> list[frozenset[int]]:
    """For each halfspace, the indices of the vertices lying on its boundary."""
    verts = p.vertices
    return [
        frozenset(i for i, v in enumerate(verts) if h.slack(v) == 0) for h in p.halfspaces
    ]


def _facets_of_face(face: frozenset[int], k: int, tight: list[frozenset[int]],
                    verts: list[Point]) -> list[frozenset[int]]:
    out = []
    seen = set()
    for t in tight:
        sub = face & t
        if sub == face or len(sub) < k or sub in seen:
            continue
        seen.add(sub)
        if affine_rank([verts[i] for i in sorted(sub)]) == k - 1:
            out.append(sub)
    return out


def triangulate(p: Polytope, *, dimension_cap: int = TRIANGULATION_DIM_CAP) -> list[Simplex]:
    """Pulling triangulation from the lexicographically smallest vertex.

    Each face is coned from its smallest vertex over those of its facets
    that do not contain it, recursively.  Lower-dimensional (null) polytopes
    yield an empty list.
    """
    if p.dim > dimension_cap:
        raise BackendUnavailableError(
            f"exact triangulation is limited to dimension {dimension_cap}, got {p.dim}"
        )
    if p._simplices is not None:
        return p._simplices
    verts = p.vertices
    if not verts or affine_rank(verts) < p.dim:
        p._simplices = []
        return p._simplices
    tight = _incidence(p)

    def fan(face: frozenset[int], k: int) -> list[tuple[int, ...]]:
        if k == 0:
            return [(min(face),)]
        apex = min(face)  # vertices are sorted, so the index order is lexicographic
        out = []
        for facet in _facets_of_face(face, k, tight, verts):
            if apex in facet:
                continue
            out.extend((apex,) + s for s in fan(facet, k - 1))
        return out

    p._simplices = [
        Simplex(tuple(verts[i] for i in idx)) for idx in fan(frozenset(range(len(verts))), p.dim)
    ]
    return p._simplices


def volume(p: Polytope, **kwargs) -> Fraction:
    """Lebesgue measure of ``p`` as the sum of its simplex volumes."""
    return sum((s.volume() for s in triangulate(p, **kwargs)), Fraction(0))


def split(p: Polytope, a: Sequence, c) -> tuple[Polytope, Polytope]:
    """Cut ``p`` by the hyperplane ``a . x = c`` into its two closed halves."""
    h = Halfspace(tuple(a), c)
    return p.intersect([h]), p.intersect([h.complement()])


# -- independent volume via facets ------------------------------------------


def _angular_order(points: list[tuple[Fraction, Fraction]]) -> list[tuple[Fraction, Fraction]]:
    cx = sum(x for x, _ in points) / len(points)
    cy = sum(y for _, y in points) / len(points)

    def half(d):
        return 0 if d[1] > 0 or (d[1] == 0 and d[0] > 0) else 1

    def cmp(p, q):
        dp = (p[0] - cx, p[1] - cy)
        dq = (q[0] - cx, q[1] - cy)
        hp, hq = half(dp), half(dq)
        if hp != hq:
            return hp - hq
        cross = dp[0] * dq[1] - dp[1] * dq[0]
        return -1 if cross > 0 else (1 if cross < 0 else 0)

    return sorted(points, key=cmp_to_key(cmp))


def _shoelace(points: list[tuple[Fraction, Fraction]]) -> Fraction:
    if len(points) < 3:
        return Fraction(0)
    ring = _angular_order(points)
    acc = Fraction(0)
    for (x1, y1), (x2, y2) in zip(ring, ring[1:] + ring[:1]):
        acc += x1 * y2 - x2 * y1
    return abs(acc) / 2


def direct_volume(p: Polytope) -> Fraction:
    """Volume computed without triangulating, for dimension <= 3.

    Uses interval length in 1D, the shoelace formula in 2D, and in 3D the
    pyramid decomposition ``V = 1/3 * sum_F h_F * area(F)`` with each facet
    area obtained from its axis projection.  Serves as a cross-check for
    :func:`volume`.
    """
    verts = p.vertices
    if not verts:
        return Fraction(0)
    if p.dim == 0:
        return Fraction(1)
    if affine_rank(verts) < p.dim:
        return Fraction(0)
    if p.dim == 1:
        return verts[-1][0] - verts[0][0]
    if p.dim == 2:
        return _shoelace(list(verts))
    if p.dim != 3:
        raise BackendUnavailableError("direct volume is implemented for dimension <= 3 only")
    centre = tuple(sum(v[i] for v in verts) / len(verts) for i in range(3))
    total = Fraction(0)
    seen = set()
    for h, t in zip(p.halfspaces, _incidence(p)):
        if len(t) < 3 or t in seen:
            continue
        face = [verts[i] for i in sorted(t)]
        if affine_rank(face) != 2:
            continue
        seen.add(t)
        k = max(range(3), key=lambda i: abs(h.a[i]))
        keep = [i for i in range(3) if i != k]
        projected = _shoelace([(v[keep[0]], v[keep[1]]) for v in face])
        total += h.slack(centre) * projected / abs(h.a[k])
    return total / 3
