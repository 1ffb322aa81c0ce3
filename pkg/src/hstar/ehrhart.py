"""h*-vectors: box-point enumeration, Ehrhart interpolation, and per-coset splits."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Sequence

from .errors import InternalError, NotFullDimensional
from .linalg import LatticeQuotient, Vector
from .polytope import (
    LatticePolytope,
    dilate_lattice_points,
    interior_lattice_points,
    lattice_points,
    normalized_volume,
)
from .triangulation import (
    BoxEnumerator,
    HalfOpenTriangulation,
    homogenize,
    pulling_order,
    pulling_triangulation,
    sample_generic_point,
)


@dataclass(frozen=True)
class HStarVector:
    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(c < 0 for c in self.coeffs):
            raise InternalError(f"negative h* coefficient in {self.coeffs}")

    @property
    def degree(self) -> int:
        nz = [i for i, c in enumerate(self.coeffs) if c]
        return nz[-1] if nz else -1

    @property
    def volume(self) -> int:
        return sum(self.coeffs)

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __len__(self) -> int:
        return len(self.coeffs)

    def to_json(self) -> dict:
        return {"hstar": list(self.coeffs), "degree": self.degree}


@dataclass(frozen=True)
class CosetHStar:
    """Coefficient lists keyed by canonical coset representatives of the span lattice."""

    dim: int
    cosets: tuple[tuple[Vector, tuple[int, ...]], ...]

    def total(self) -> HStarVector:
        out = [0] * (self.dim + 1)
        for _, coeffs in self.cosets:
            for i, c in enumerate(coeffs):
                out[i] += c
        return HStarVector(tuple(out))

    def supports(self) -> dict[Vector, tuple[int, ...]]:
        return {rep: tuple(i for i, c in enumerate(co) if c) for rep, co in self.cosets}

    def to_json(self) -> list[dict]:
        return [{"rep": list(rep), "coeffs": list(co)} for rep, co in self.cosets]


def _require_full(P: LatticePolytope) -> None:
    if not P.is_full_dimensional:
        raise NotFullDimensional("h* needs a full-dimensional polytope")


def half_open_triangulation(
    P: LatticePolytope, order_seed: int | None = None, xi_seed: int | None = 0,
    use_all_points: bool = False,
) -> HalfOpenTriangulation:
    _require_full(P)
    A = homogenize(P, vertices_only=not use_all_points)
    T = pulling_triangulation(A, pulling_order(A, order_seed))
    return HalfOpenTriangulation(T, sample_generic_point(A, xi_seed))


def hstar_via_boxes(
    P: LatticePolytope, order_seed: int | None = None, xi_seed: int | None = 0,
    use_all_points: bool = False,
) -> HStarVector:
    """Count box points of a half-open pulling triangulation by height."""
    H = half_open_triangulation(P, order_seed, xi_seed, use_all_points)
    out = [0] * (P.ambient_dim + 1)
    for cell, flipped in zip(H.T.cells, H.flipped):
        for _, h in BoxEnumerator(cell).heights(flipped):
            out[h] += 1
    return HStarVector(tuple(out))


def ehrhart_counts(P: LatticePolytope, upto: int) -> list[int]:
    return [len(dilate_lattice_points(P, k)) for k in range(upto + 1)]


def hstar_via_interpolation(P: LatticePolytope) -> HStarVector:
    """h* from exact lattice-point counts of ``0P, ..., dP``."""
    _require_full(P)
    d = P.ambient_dim
    ehr = ehrhart_counts(P, d)
    return HStarVector(tuple(
        sum((-1) ** j * comb(d + 1, j) * ehr[i - j] for j in range(i + 1)) for i in range(d + 1)
    ))


def span_quotient(P: LatticePolytope) -> LatticeQuotient:
    """``Z^(d+1)`` modulo the lattice generated by ``{1} x (P cap Z^d)``."""
    return LatticeQuotient([(1,) + p for p in P.lattice_points])


def coset_hstar(
    P: LatticePolytope, order_seed: int | None = None, xi_seed: int | None = 0,
    use_all_points: bool = False,
) -> CosetHStar:
    """Split the box points by their coset modulo the homogenized span lattice."""
    H = half_open_triangulation(P, order_seed, xi_seed, use_all_points)
    Q = span_quotient(P)
    d = P.ambient_dim
    table: dict[Vector, list[int]] = {}
    for cell, flipped in zip(H.T.cells, H.flipped):
        for vec, h in BoxEnumerator(cell).points(flipped):
            rep = Q.representative(vec) if Q.index > 1 else (0,) * (d + 1)
            table.setdefault(rep, [0] * (d + 1))[h] += 1
    if len(table) != Q.index:
        raise InternalError(f"found {len(table)} cosets, expected {Q.index}")
    return CosetHStar(d, tuple(sorted((rep, tuple(co)) for rep, co in table.items())))


def min_interior_multiple(P: LatticePolytope) -> int:
    """Smallest ``k >= 1`` with an interior lattice point in ``kP``."""
    _require_full(P)
    for k in range(1, P.ambient_dim + 2):
        if interior_lattice_points(P, k):
            return k
    raise InternalError("no interior lattice point up to (d+1)P")


def check_basic_identities(P: LatticePolytope, h: HStarVector | None = None) -> dict[str, bool]:
    """Evaluate the five elementary identities linking h* to counts and volume."""
    _require_full(P)
    d = P.ambient_dim
    if h is None:
        h = hstar_via_boxes(P)
    return {
        "h0_is_one": h[0] == 1,
        "h1_counts_points": h[1] == len(lattice_points(P)) - d - 1,
        "hd_counts_interior": h[d] == len(interior_lattice_points(P, 1)),
        "degree_vs_codegree": d + 1 - h.degree == min_interior_multiple(P),
        "sum_is_volume": h.volume == normalized_volume(P),
    }


def is_interval(support: Sequence[int]) -> bool:
    s = sorted(support)
    return bool(s) and s == list(range(s[0], s[-1] + 1))
