"""Lattice polytopes given by vertices, with an exact facet description."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import NotFullDimensional
from .linalg import (
    INFINITE,
    LatticeQuotient,
    Vector,
    determinant,
    dot,
    integer_kernel,
    lattice_index,
    primitive,
    rank,
)

Inequality = tuple[Vector, int]


def hyperplane_normal(rows: Sequence[Sequence[int]]) -> Vector | None:
    """Primitive normal of the span of ``n-1`` vectors in ``Z^n``.

    Computed from signed maximal minors; ``None`` if the rows are dependent.
    """
    n = len(rows) + 1
    normal = []
    for j in range(n):
        minor = [[r[c] for c in range(n) if c != j] for r in rows]
        normal.append((-1) ** j * determinant(minor))
    if not any(normal):
        return None
    return primitive(normal)


@dataclass(frozen=True, eq=False)
class LatticePolytope:
    """Convex hull of lattice points, ``{x : a.x <= b for facets, a.x == b for equations}``.

    ``facets`` carry primitive integer normals.  For lower-dimensional
    polytopes the facets are taken inside the affine hull, which is cut out by
    ``equations``.
    """

    ambient_dim: int
    vertices: tuple[Vector, ...]
    facets: tuple[Inequality, ...]
    equations: tuple[Inequality, ...] = ()
    dim: int = field(default=-1)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LatticePolytope):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self.vertices == other.vertices

    def __hash__(self) -> int:
        return hash((self.ambient_dim, self.vertices))

    @property
    def is_full_dimensional(self) -> bool:
        return self.dim == self.ambient_dim

    def contains(self, x: Sequence[int]) -> bool:
        return all(dot(a, x) <= b for a, b in self.facets) and all(
            dot(a, x) == b for a, b in self.equations
        )

    @cached_property
    def lattice_points(self) -> tuple[Vector, ...]:
        return tuple(_enumerate(self, 1, strict=False))

    @cached_property
    def _projections(self) -> tuple[LatticePolytope, ...]:
        # conv of projected vertices onto the first j coordinates, j < d
        return tuple(
            from_vertices([v[:j] for v in self.vertices])
            for j in range(1, self.ambient_dim)
        )

    def to_json(self) -> dict:
        return {"dim": self.ambient_dim, "vertices": [list(v) for v in self.vertices]}

    def __repr__(self) -> str:
        return f"LatticePolytope(dim={self.dim}, vertices={list(map(list, self.vertices))})"


def from_vertices(points: Iterable[Sequence[int]]) -> LatticePolytope:
    """Irredundant vertices and facets of ``conv(points)``.

    Facets are found by scanning every subset of ``dim`` points that spans an
    affine hyperplane of the hull and keeping the supporting ones.
    """
    pts = sorted({tuple(int(x) for x in p) for p in points})
    if not pts:
        raise ValueError("need at least one point")
    d = len(pts[0])
    if any(len(p) != d for p in pts):
        raise ValueError("points have mixed dimensions")
    p0 = pts[0]
    diffs = [tuple(a - b for a, b in zip(p, p0)) for p in pts[1:]]
    r = rank(diffs) if diffs else 0
    eq_normals = integer_kernel(diffs, d) if diffs else [
        tuple(int(i == j) for j in range(d)) for i in range(d)
    ]
    if r == d:
        eq_normals = []
    equations = tuple((n, dot(n, p0)) for n in eq_normals)

    facets: dict[Inequality, None] = {}
    if r >= 1:
        seen: set[Inequality] = set()
        for subset in combinations(pts, r):
            q0 = subset[0]
            rows = [tuple(a - b for a, b in zip(q, q0)) for q in subset[1:]]
            a = hyperplane_normal(rows + list(eq_normals))
            if a is None:
                continue
            b = dot(a, q0)
            if (a, b) in seen:
                continue
            seen.add((a, b))
            seen.add((tuple(-x for x in a), -b))
            vals = [dot(a, p) for p in pts]
            if all(v <= b for v in vals):
                facets[(a, b)] = None
            elif all(v >= b for v in vals):
                facets[(tuple(-x for x in a), -b)] = None
    facet_list = tuple(sorted(facets))

    if r == 0:
        vertices = tuple(pts)
    else:
        vertices = []
        for p in pts:
            tight = [a for a, b in facet_list if dot(a, p) == b]
            if rank(tight + list(eq_normals)) == d:
                vertices.append(p)
        vertices = tuple(vertices)
    return LatticePolytope(d, vertices, facet_list, equations, r)


def from_json(data: Union[str, dict]) -> LatticePolytope:
    """Parse ``{"dim": int, "vertices": [[int, ...], ...]}``."""
    if isinstance(data, str):
        data = json.loads(data)
    if not isinstance(data, dict) or "vertices" not in data or "dim" not in data:
        raise ValueError("polytope JSON needs 'dim' and 'vertices'")
    d = data["dim"]
    verts = data["vertices"]
    if not isinstance(d, int) or not isinstance(verts, list) or not verts:
        raise ValueError("malformed polytope JSON")
    for v in verts:
        if not isinstance(v, list) or len(v) != d or not all(
            isinstance(x, int) and not isinstance(x, bool) for x in v
        ):
            raise ValueError(f"vertex {v!r} is not a list of {d} integers")
    return from_vertices(verts)


# lattice point enumeration -------------------------------------------------

def _constraint_rows(Q: LatticePolytope, k: int, strict: bool) -> list[tuple[Vector, int]]:
    rows = [(a, k * b - (1 if strict else 0)) for a, b in Q.facets]
    for a, b in Q.equations:
        rows.append((a, k * b))
        rows.append((tuple(-x for x in a), -k * b))
    return rows


def _enumerate(P: LatticePolytope, k: int, strict: bool) -> list[Vector]:
    """Lattice points of ``kP`` (or its interior), coordinate by coordinate.

    The range of coordinate ``j`` is cut out by the facets of the projection
    of ``P`` to the first ``j`` coordinates, so only lattice points of
    projections are ever visited.  Output is in lexicographic order.
    """
    d = P.ambient_dim
    levels = list(P._projections) + [P]
    lo_box = [k * min(v[j] for v in P.vertices) for j in range(d)]
    hi_box = [k * max(v[j] for v in P.vertices) for j in range(d)]
    coeff = max([1] + [abs(x) for Q in levels for a, _ in Q.facets + Q.equations for x in a])
    bound = max([1] + [abs(x) for x in lo_box + hi_box])
    dtype = np.int64 if coeff * bound * (d + 2) * 4 < 2**62 else object

    X = np.zeros((1, 0), dtype=dtype)
    for j, Q in enumerate(levels):
        n = X.shape[0]
        lo = np.full(n, lo_box[j], dtype=dtype)
        hi = np.full(n, hi_box[j], dtype=dtype)
        ok = np.ones(n, dtype=bool)
        for a, b in _constraint_rows(Q, k, strict and j == d - 1):
            s = np.full(n, b, dtype=dtype)
            for c in range(j):
                if a[c]:
                    s = s - a[c] * X[:, c]
            aj = a[j]
            if aj > 0:
                hi = np.minimum(hi, s // aj)
            elif aj < 0:
                lo = np.maximum(lo, -(s // (-aj)))
            else:
                ok &= s >= 0
        cnt = np.where(ok, hi - lo + 1, 0).astype(np.int64)
        cnt = np.maximum(cnt, 0)
        total = int(cnt.sum())
        rep = np.repeat(np.arange(n), cnt)
        starts = np.cumsum(cnt) - cnt
        offs = np.arange(total, dtype=np.int64) - np.repeat(starts, cnt)
        col = lo[rep] + offs.astype(dtype)
        X = np.hstack([X[rep], col.reshape(-1, 1).astype(dtype)])
        if total == 0:
            return []
    return [tuple(int(x) for x in row) for row in X]


def lattice_points(P: LatticePolytope) -> list[Vector]:
    """All points of ``P`` in ``Z^d``, sorted lexicographically."""
    return list(P.lattice_points)


def dilate_lattice_points(P: LatticePolytope, k: int) -> list[Vector]:
    """Lattice points of ``kP`` from the scaled facet data (no vertex scaling)."""
    if k == 0:
        return [tuple(0 for _ in range(P.ambient_dim))]
    return _enumerate(P, k, strict=False)


def interior_lattice_points(P: LatticePolytope, k: int = 1) -> list[Vector]:
    if not P.is_full_dimensional:
        raise NotFullDimensional("interior points need a full-dimensional polytope")
    if k < 1:
        raise ValueError("k must be positive")
    return _enumerate(P, k, strict=True)


def normalized_volume(P: LatticePolytope) -> int:
    """``d!`` times the Euclidean volume, summed over a pulling triangulation."""
    if not P.is_full_dimensional:
        raise NotFullDimensional("normalized volume needs a full-dimensional polytope")
    from .triangulation import homogenize, pulling_triangulation

    A = homogenize(P, vertices_only=True)
    T = pulling_triangulation(A)
    return sum(abs(determinant([A.vectors[i] for i in cell])) for cell in T.max_cells)


# affine lattices -------------------------------------------------------------

@dataclass(frozen=True)
class AffineLattice:
    """``base_point + span_Z(basis)`` inside ``Z^d``."""

    base_point: Vector
    basis: tuple[Vector, ...]
    index_in_ambient: Union[int, float]
    _quotient: LatticeQuotient | None = field(default=None, compare=False, repr=False)

    def contains(self, x: Sequence[int]) -> bool:
        return self.coordinates(x) is not None

    def coordinates(self, x: Sequence[int]) -> tuple[int, ...] | None:
        """Integer coordinates of ``x - base_point`` in ``basis`` (``None`` if outside)."""
        diff = tuple(a - b for a, b in zip(x, self.base_point))
        if self._quotient is None:
            return () if not any(diff) else None
        return self._quotient.coordinates(diff)


def affine_span_lattice(points: Sequence[Sequence[int]]) -> AffineLattice:
    pts = sorted({tuple(int(x) for x in p) for p in points})
    if not pts:
        raise ValueError("need at least one point")
    p0 = pts[0]
    diffs = [tuple(a - b for a, b in zip(p, p0)) for p in pts[1:]]
    index = lattice_index([(1,) + p for p in pts])
    if not diffs:
        return AffineLattice(p0, (), index, None)
    quotient = LatticeQuotient(diffs)
    return AffineLattice(p0, quotient.basis, index, quotient)


def is_spanning(P: LatticePolytope) -> bool:
    """Whether the lattice points of ``{1} x P`` generate ``Z^(d+1)``."""
    return lattice_index([(1,) + p for p in P.lattice_points]) == 1


def spanning_polytope(P: LatticePolytope) -> LatticePolytope:
    """``P`` in coordinates of a basis of its affine lattice-point lattice."""
    if not P.is_full_dimensional:
        raise NotFullDimensional("spanning polytope needs a full-dimensional polytope")
    L = affine_span_lattice(P.lattice_points)
    return from_vertices([L.coordinates(v) for v in P.vertices])


def lattice_pyramid(P: LatticePolytope) -> LatticePolytope:
    """``conv({0}, {1} x P)`` one dimension up."""
    return from_vertices([(0,) * (P.ambient_dim + 1)] + [(1,) + v for v in P.vertices])


# integer decomposition -----------------------------------------------------

def k_sums(P: LatticePolytope, k: int) -> set[Vector]:
    """All sums of ``k`` lattice points of ``P``.

    Built level by level; each level is the memo of the previous depth, so
    no sum is explored twice.
    """
    base = P.lattice_points
    level = {tuple(0 for _ in range(P.ambient_dim))}
    for _ in range(k):
        level = {tuple(a + b for a, b in zip(s, p)) for s in level for p in base}
    return level


def idp_failures(P: LatticePolytope, k: int) -> list[Vector]:
    """Lattice points of ``kP`` that are not a sum of ``k`` lattice points of ``P``."""
    if k < 1:
        raise ValueError("k must be positive")
    reachable = k_sums(P, k)
    return [m for m in dilate_lattice_points(P, k) if m not in reachable]


def is_k_idp(P: LatticePolytope, k: int) -> bool:
    return not idp_failures(P, k)
