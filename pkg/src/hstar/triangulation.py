"""Cones over lattice polytopes, pulling triangulations and half-open cells.

Everything lives in ``R^(d+1)`` after homogenization ``m -> (1, m)``; the
height of a point is its first coordinate.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations, product
from math import lcm
from typing import Collection, Iterator, Sequence

from .errors import (
    DegenerateInput,
    InternalError,
    NonGeneric,
    NotFullDimensional,
    OutsideCone,
)
from .linalg import Vector, adjugate, dot, inverse_unimodular, matvec, rank, smith_normal_form
from .polytope import LatticePolytope, from_vertices, hyperplane_normal

MAX_GENERIC_TRIES = 10_000


@dataclass(frozen=True)
class VectorSet:
    """Distinct integer vectors with first coordinate 1."""

    vectors: tuple[Vector, ...]
    vertex_flags: tuple[bool, ...] = ()

    def __post_init__(self) -> None:
        if not self.vectors:
            raise DegenerateInput("empty vector set")
        if any(v[0] != 1 for v in self.vectors):
            raise DegenerateInput("every vector must have first coordinate 1")
        if len(set(self.vectors)) != len(self.vectors):
            raise DegenerateInput("vector set contains duplicate points")

    def __len__(self) -> int:
        return len(self.vectors)

    @property
    def dim(self) -> int:
        """Ambient dimension ``d + 1``."""
        return len(self.vectors[0])

    @cached_property
    def hull(self) -> LatticePolytope:
        return from_vertices([v[1:] for v in self.vectors])

    @cached_property
    def rank(self) -> int:
        return rank(self.vectors)

    @property
    def corank(self) -> int:
        return len(self.vectors) - self.rank

    @cached_property
    def cone_inequalities(self) -> tuple[Vector, ...]:
        """Normals ``n`` with ``cone(A) = {x : n.x >= 0}`` (plus equations when degenerate)."""
        rows = [(b,) + tuple(-x for x in a) for a, b in self.hull.facets]
        for a, b in self.hull.equations:
            rows.append((b,) + tuple(-x for x in a))
            rows.append((-b,) + tuple(a))
        return tuple(rows)

    @cached_property
    def facet_supports(self) -> tuple[frozenset[int], ...]:
        """Index sets of the vectors lying on each facet of ``cone(A)``."""
        out = []
        for a, b in self.hull.facets:
            out.append(frozenset(i for i, v in enumerate(self.vectors) if dot(a, v[1:]) == b))
        return tuple(out)

    @cached_property
    def spanned_hyperplanes(self) -> tuple[Vector, ...]:
        """Normals of all hyperplanes spanned by ``dim - 1`` independent vectors."""
        normals = set()
        for subset in combinations(self.vectors, self.dim - 1):
            n = hyperplane_normal(subset)
            if n is not None:
                if next(x for x in n if x) < 0:
                    n = tuple(-x for x in n)
                normals.add(n)
        return tuple(sorted(normals))

    def in_cone(self, x: Sequence) -> bool:
        return all(dot(n, x) >= 0 for n in self.cone_inequalities)


def homogenize(P: LatticePolytope, vertices_only: bool = False) -> VectorSet:
    """``{(1, m)}`` for the lattice points (or just the vertices) of ``P``."""
    if not P.is_full_dimensional:
        raise NotFullDimensional("homogenize needs a full-dimensional polytope")
    pts = P.vertices if vertices_only else P.lattice_points
    verts = set(P.vertices)
    return VectorSet(tuple((1,) + p for p in pts), tuple(p in verts for p in pts))


def subset(A: VectorSet, indices: Sequence[int]) -> VectorSet:
    return VectorSet(
        tuple(A.vectors[i] for i in indices),
        tuple(A.vertex_flags[i] for i in indices) if A.vertex_flags else (),
    )


@dataclass(frozen=True)
class Cell:
    """A simplicial maximal cell: ray matrix data for exact coordinates."""

    indices: tuple[int, ...]
    rays: tuple[Vector, ...]
    adj: tuple[tuple[int, ...], ...] = field(repr=False)
    det: int

    @classmethod
    def build(cls, A: VectorSet, indices: Sequence[int]) -> Cell:
        idx = tuple(sorted(indices))
        rays = tuple(A.vectors[i] for i in idx)
        columns = tuple(zip(*rays))
        adj, det = adjugate(columns)
        if det < 0:
            adj = tuple(tuple(-x for x in row) for row in adj)
            det = -det
        return cls(idx, rays, adj, det)

    def numerators(self, x: Sequence) -> tuple:
        """``det * lambda`` where ``x = sum(lambda_i * ray_i)``."""
        return matvec(self.adj, x)

    def coefficients(self, x: Sequence) -> tuple[Fraction, ...]:
        return tuple(Fraction(n, self.det) if isinstance(n, int) else n / self.det
                     for n in self.numerators(x))


@dataclass(frozen=True)
class Triangulation:
    """Maximal cells of a triangulation of ``cone(base)``, as sorted index tuples."""

    base: VectorSet
    max_cells: tuple[tuple[int, ...], ...]

    @cached_property
    def cells(self) -> tuple[Cell, ...]:
        return tuple(Cell.build(self.base, c) for c in self.max_cells)

    def volume(self) -> int:
        return sum(c.det for c in self.cells)


def pulling_order(A: VectorSet, seed: int | None) -> list[int]:
    """A seeded permutation of ``range(len(A))``; identity for ``None``."""
    order = list(range(len(A)))
    if seed is not None:
        random.Random(seed).shuffle(order)
    return order


def pulling_triangulation(A: VectorSet, order: Sequence[int] | None = None) -> Triangulation:
    """Pulling triangulation of ``cone(A)``.

    The last vector of ``order`` inside the current face is coned over the
    recursively triangulated facets of that face which do not contain it.
    Faces are identified by the set of vectors they contain, and their
    facets are intersections with the facets of ``cone(A)``.
    """
    if A.rank != A.dim:
        raise DegenerateInput("cone(A) is not full-dimensional")
    if order is None:
        order = range(len(A))
    order = list(order)
    if sorted(order) != list(range(len(A))):
        raise ValueError("order must be a permutation of the vector indices")
    position = {i: k for k, i in enumerate(order)}
    supports = A.facet_supports
    rank_memo: dict[frozenset[int], int] = {}
    memo: dict[frozenset[int], list[frozenset[int]]] = {}

    def face_rank(S: frozenset[int]) -> int:
        if S not in rank_memo:
            rank_memo[S] = rank([A.vectors[i] for i in S])
        return rank_memo[S]

    def triangulate(S: frozenset[int]) -> list[frozenset[int]]:
        if S in memo:
            return memo[S]
        r = face_rank(S)
        if len(S) == r:
            memo[S] = [S]
            return memo[S]
        apex = max(S, key=position.__getitem__)
        facets = set()
        for F in supports:
            T = S & F
            if T != S and len(T) >= r - 1 and apex not in T and face_rank(T) == r - 1:
                facets.add(T)
        cells = []
        for T in sorted(facets, key=sorted):
            cells.extend(C | {apex} for C in triangulate(T))
        memo[S] = cells
        return cells

    cells = triangulate(frozenset(range(len(A))))
    return Triangulation(A, tuple(sorted(tuple(sorted(c)) for c in cells)))


# generic points ------------------------------------------------------------

@dataclass(frozen=True)
class GenericPoint:
    """A point of ``cone(A)`` off every hyperplane spanned by vectors of ``A``."""

    xi: tuple[Fraction, ...]

    @cached_property
    def scaled(self) -> Vector:
        """Positive integer multiple of ``xi`` (same signs everywhere)."""
        den = lcm(*(x.denominator for x in self.xi))
        return tuple(int(x * den) for x in self.xi)

    def to_json(self) -> list[str]:
        return [format_fraction(x) for x in self.xi]


def format_fraction(x: Fraction | int) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def is_generic(A: VectorSet, xi: Sequence) -> bool:
    return A.in_cone(xi) and all(dot(n, xi) != 0 for n in A.spanned_hyperplanes)


def make_generic_point(A: VectorSet, xi: Sequence) -> GenericPoint:
    """Validate ``xi`` against ``A`` and wrap it; raises :class:`NonGeneric`."""
    xi = tuple(Fraction(x) for x in xi)
    if not A.in_cone(xi):
        raise OutsideCone("generic point must lie in cone(A)")
    if not is_generic(A, xi):
        raise NonGeneric("point lies on a hyperplane spanned by vectors of A")
    return GenericPoint(xi)


def sample_generic_point(
    A: VectorSet, seed: int | None = 0, within: Sequence[Vector] | None = None
) -> GenericPoint:
    """Seeded random positive combination, resampled until generic.

    With ``within`` the combination uses only those rays, so the point lies in
    the interior of their cone.
    """
    rng = random.Random(seed)
    gens = list(within) if within is not None else list(A.vectors)
    for _ in range(MAX_GENERIC_TRIES):
        w = [rng.randint(1, 10**6) for _ in gens]
        xi = tuple(sum(c * g[i] for c, g in zip(w, gens)) for i in range(A.dim))
        if is_generic(A, xi):
            return GenericPoint(tuple(Fraction(x) for x in xi))
    raise InternalError("no generic point found")


# half-open cells -------------------------------------------------------------

@dataclass(frozen=True)
class HalfOpenCell:
    cell: tuple[int, ...]
    index_set: frozenset[int]


def half_open_index_set(T: Triangulation, xi: GenericPoint, cell: int | Sequence[int]) -> HalfOpenCell:
    """``I_xi(sigma)``: rays with negative coefficient in the expansion of ``xi``."""
    c = _cell(T, cell)
    nums = c.numerators(xi.scaled)
    if any(n == 0 for n in nums):
        raise NonGeneric(f"xi lies on a facet hyperplane of cell {c.indices}")
    return HalfOpenCell(c.indices, frozenset(i for i, n in zip(c.indices, nums) if n < 0))


def _cell(T: Triangulation, cell: int | Sequence[int]) -> Cell:
    if isinstance(cell, int):
        return T.cells[cell]
    key = tuple(sorted(cell))
    for c in T.cells:
        if c.indices == key:
            return c
    raise ValueError(f"{key} is not a maximal cell")


class HalfOpenTriangulation:
    """A triangulation together with a generic point and all index sets."""

    def __init__(self, T: Triangulation, xi: GenericPoint):
        self.T = T
        self.xi = xi
        self.half_open = tuple(half_open_index_set(T, xi, k) for k in range(len(T.cells)))
        # positions within each cell's ray list that are flipped to (0, 1]
        self.flipped = tuple(
            frozenset(p for p, i in enumerate(c.indices) if i in h.index_set)
            for c, h in zip(T.cells, self.half_open)
        )

    def locate(self, v: Sequence[int]) -> int:
        """Index of the unique maximal cell whose half-open cell contains ``v``."""
        if not self.T.base.in_cone(v):
            raise OutsideCone(f"{tuple(v)} is not in the cone")
        hits = [
            k for k, (c, flip) in enumerate(zip(self.T.cells, self.flipped))
            if _in_half_open(c.numerators(v), flip)
        ]
        if len(hits) != 1:
            raise InternalError(f"{tuple(v)} lies in {len(hits)} half-open cells")
        return hits[0]

    def reduce_point(self, v: Sequence[int]) -> tuple[int, Vector, int]:
        """``(cell, box point, height)`` with ``v - box point`` in the cell's ray monoid."""
        k = self.locate(v)
        c, flip = self.T.cells[k], self.flipped[k]
        red = _reduce_numerators(c.numerators(v), flip, c.det)
        box = tuple(
            sum(r * ray[i] for r, ray in zip(red, c.rays)) // c.det for i in range(len(v))
        )
        return k, box, sum(red) // c.det

    def height(self, v: Sequence[int]) -> int:
        return self.reduce_point(v)[2]

    def contains(self, cell: int, v: Sequence) -> bool:
        c = self.T.cells[cell]
        return _in_half_open(c.numerators(v), self.flipped[cell])


def _in_half_open(nums: Sequence, flipped: Collection[int]) -> bool:
    return all(n > 0 if p in flipped else n >= 0 for p, n in enumerate(nums))


def _reduce_numerators(nums: Sequence[int], flipped: Collection[int], q: int) -> list[int]:
    # [0, q) for ordinary rays, (0, q] for flipped rays
    return [((n - 1) % q) + 1 if p in flipped else n % q for p, n in enumerate(nums)]


def reduce_point(T: Triangulation, xi: GenericPoint, v: Sequence[int]) -> tuple[tuple[int, ...], Vector, int]:
    H = HalfOpenTriangulation(T, xi)
    k, box, h = H.reduce_point(v)
    return T.max_cells[k], box, h


# half-open parallelepipeds ---------------------------------------------------

class BoxEnumerator:
    """Lattice points of the half-open parallelepipeds of one simplicial cone.

    ``Z^n / (ray lattice)`` is enumerated through the Smith form of the ray
    matrix; each representative is moved into the box by reducing its
    coefficients modulo 1 into ``[0, 1)`` or ``(0, 1]``.
    """

    def __init__(self, cell: Cell):
        self.cell = cell
        columns = tuple(zip(*cell.rays))
        snf = smith_normal_form(columns)
        Uinv = inverse_unimodular(snf.U)
        n = len(cell.rays)
        self.generators: list[Vector] = []
        self.orders: list[int] = []
        for i, d in enumerate(snf.divisors):
            if d > 1:
                self.generators.append(tuple(Uinv[r][i] for r in range(n)))
                self.orders.append(d)
        self.gen_numerators = [cell.numerators(g) for g in self.generators]

    def representatives(self) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
        """``(y, numerators)`` for each coset ``sum(y_i * g_i)``, unreduced."""
        n = len(self.cell.rays)
        q = self.cell.det
        if not self.orders:
            yield (), (0,) * n
            return
        if len(self.orders) == 1:
            (g,) = self.gen_numerators
            for k in range(self.orders[0]):
                yield (k,), tuple((k * a) % q for a in g)
            return
        for y in product(*(range(d) for d in self.orders)):
            nums = [0] * n
            for yi, g in zip(y, self.gen_numerators):
                if yi:
                    for j in range(n):
                        nums[j] += yi * g[j]
            yield y, tuple(x % q for x in nums)

    def heights(self, flipped: Collection[int]) -> Iterator[tuple[tuple[int, ...], int]]:
        q = self.cell.det
        for y, nums in self.representatives():
            yield y, sum(_reduce_numerators(nums, flipped, q)) // q

    def points(self, flipped: Collection[int]) -> Iterator[tuple[Vector, int]]:
        q = self.cell.det
        rays = self.cell.rays
        dim = len(rays[0])
        for _, nums in self.representatives():
            red = _reduce_numerators(nums, flipped, q)
            vec = tuple(sum(r * ray[i] for r, ray in zip(red, rays)) // q for i in range(dim))
            yield vec, sum(red) // q


def box_points(rays: Sequence[Sequence[int]], flipped: Collection[int] = ()) -> list[tuple[Vector, int]]:
    """Lattice points of the half-open parallelepiped with their heights.

    ``flipped`` lists positions (into ``rays``) whose coefficient ranges over
    ``(0, 1]`` instead of ``[0, 1)``.
    """
    rays = tuple(tuple(int(x) for x in r) for r in rays)
    columns = tuple(zip(*rays))
    adj, det = adjugate(columns)
    if det < 0:
        adj = tuple(tuple(-x for x in row) for row in adj)
        det = -det
    cell = Cell(tuple(range(len(rays))), rays, adj, det)
    return list(BoxEnumerator(cell).points(frozenset(flipped)))
