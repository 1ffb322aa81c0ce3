"""Corank-1 vector sets: the dependence relation, both triangulations, and step functions.

For a circuit ``sum(lam_v v : A+) = sum(mu_v v : A-)`` a point ``x`` slides
along the relation as ``x = sum((x_v - t lam_v) v) + sum(x_v v : A0) +
sum((x_v + t mu_v) v : A-)``; the sum of fractional parts of the coefficients
is a periodic step function whose jumps explain how heights change between
the two triangulations.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor, gcd
from typing import Sequence

from .errors import GenericSearchFailed, OutsideCone, WrongCorank
from .linalg import LatticeQuotient, Vector, integer_kernel
from .triangulation import (
    Cell,
    GenericPoint,
    HalfOpenTriangulation,
    Triangulation,
    VectorSet,
    is_generic,
    sample_generic_point,
)

MAX_TWEAKS = 200


def frac(q: Fraction) -> Fraction:
    return q - floor(q)


@dataclass(frozen=True)
class CircuitData:
    """``sum(lam[i] * A[plus[i]]) == sum(mu[j] * A[minus[j]])``, all coefficients positive."""

    base: VectorSet
    plus: tuple[int, ...]
    lam: tuple[int, ...]
    minus: tuple[int, ...]
    mu: tuple[int, ...]
    zero: tuple[int, ...]

    def relation(self) -> tuple[int, ...]:
        """Dependence coefficients indexed like ``base`` (positive on ``plus``)."""
        rel = [0] * len(self.base)
        for i, c in zip(self.plus, self.lam):
            rel[i] = c
        for j, c in zip(self.minus, self.mu):
            rel[j] = -c
        return tuple(rel)

    def cells(self, side: str) -> tuple[tuple[int, ...], ...]:
        drop = self.plus if side == "+" else self.minus
        n = len(self.base)
        return tuple(sorted(tuple(k for k in range(n) if k != a) for a in drop))

    def to_json(self) -> dict:
        return {
            "vectors": [list(v) for v in self.base.vectors],
            "plus": [{"index": i, "coeff": c} for i, c in zip(self.plus, self.lam)],
            "minus": [{"index": j, "coeff": c} for j, c in zip(self.minus, self.mu)],
            "zero": list(self.zero),
            "T_plus": [list(c) for c in self.cells("+")],
            "T_minus": [list(c) for c in self.cells("-")],
        }


def circuit_decomposition(A: VectorSet) -> CircuitData:
    """The primitive dependence of a corank-1 vector set, with normalized orientation.

    Orientation puts the larger side in ``A+``; on a tie, the side holding the
    lexicographically smallest vector.
    """
    if A.corank != 1:
        raise WrongCorank(f"vector set has corank {A.corank}, expected 1")
    columns = tuple(zip(*A.vectors))
    (rel,) = integer_kernel(columns, len(A))
    pos = [i for i, c in enumerate(rel) if c > 0]
    neg = [i for i, c in enumerate(rel) if c < 0]
    flip = len(pos) < len(neg)
    if len(pos) == len(neg):
        flip = min(A.vectors[i] for i in neg) < min(A.vectors[i] for i in pos)
    if flip:
        rel = tuple(-c for c in rel)
        pos, neg = neg, pos
    return CircuitData(
        A,
        tuple(pos), tuple(rel[i] for i in pos),
        tuple(neg), tuple(-rel[i] for i in neg),
        tuple(i for i, c in enumerate(rel) if c == 0),
    )


def corank1_triangulations(A: VectorSet | CircuitData) -> tuple[Triangulation, Triangulation]:
    """``(T_plus, T_minus)``: cells dropping one element of ``A+`` resp. ``A-``."""
    C = A if isinstance(A, CircuitData) else circuit_decomposition(A)
    return Triangulation(C.base, C.cells("+")), Triangulation(C.base, C.cells("-"))


# step functions ----------------------------------------------------------------

@dataclass(frozen=True)
class StepFunction:
    """``f(t) = sum{x_i - lam_i t} + sum{x_k} + sum{x_j + mu_j t}``."""

    plus: tuple[tuple[Fraction, int], ...]
    minus: tuple[tuple[Fraction, int], ...]
    constant: tuple[Fraction, ...] = ()
    t_max: Fraction = Fraction(0)
    # vector indices of the terms, for rebuilding points from a parameter
    plus_index: tuple[int, ...] = ()
    minus_index: tuple[int, ...] = ()
    zero_index: tuple[int, ...] = ()
    v_prime: int = -1
    v_second: int = -1

    def __post_init__(self) -> None:
        if sum(l for _, l in self.plus) != sum(m for _, m in self.minus):
            raise ValueError("slopes must balance")
        if any(l <= 0 for _, l in self.plus) or any(m <= 0 for _, m in self.minus):
            raise ValueError("slopes must be positive integers")

    def __call__(self, t) -> Fraction:
        return step_eval(self, t)

    def coefficients(self, t) -> dict[int, Fraction]:
        """Coefficient of each vector index in the representation at parameter ``t``."""
        t = Fraction(t)
        out = {i: x - l * t for i, (x, l) in zip(self.plus_index, self.plus)}
        out.update({k: x for k, x in zip(self.zero_index, self.constant)})
        out.update({j: x + m * t for j, (x, m) in zip(self.minus_index, self.minus)})
        return out

    def potential_jumps(self, lo, hi) -> list[Fraction]:
        """Sorted ``t`` in ``[lo, hi]`` where some term crosses an integer."""
        lo, hi = Fraction(lo), Fraction(hi)
        out = set()
        for x, s in [(x, -l) for x, l in self.plus] + list(self.minus):
            # x + s t = n  <=>  t = (n - x) / s
            a, b = sorted((x + s * lo, x + s * hi))
            for n in range(ceil(a), floor(b) + 1):
                out.add((n - x) / s)
        return sorted(out)

    def to_json(self) -> dict:
        fmt = _fmt
        return {
            "plus": [{"index": i, "x": fmt(x), "lambda": l}
                     for i, (x, l) in zip(self.plus_index, self.plus)],
            "zero": [{"index": k, "x": fmt(x)} for k, x in zip(self.zero_index, self.constant)],
            "minus": [{"index": j, "x": fmt(x), "mu": m}
                      for j, (x, m) in zip(self.minus_index, self.minus)],
            "t_max": fmt(self.t_max),
            "v_prime": self.v_prime,
            "v_second": self.v_second,
        }


def _fmt(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def step_eval(f: StepFunction, t) -> Fraction:
    t = Fraction(t)
    return (
        sum((frac(x - l * t) for x, l in f.plus), Fraction(0))
        + sum((frac(x) for x in f.constant), Fraction(0))
        + sum((frac(x + m * t) for x, m in f.minus), Fraction(0))
    )


@dataclass(frozen=True)
class JumpData:
    t: Fraction
    value: Fraction
    l: int
    r: int

    @property
    def left_limit(self) -> Fraction:
        return self.value + self.l

    @property
    def right_limit(self) -> Fraction:
        return self.value + self.r

    def as_tuple(self) -> tuple:
        return self.value, self.l, self.r, self.left_limit, self.right_limit


def jump_data(f: StepFunction, t0) -> JumpData:
    """Value at ``t0`` and the counts of terms hitting an integer from each side."""
    t0 = Fraction(t0)
    l = sum(1 for x, m in f.minus if (x + m * t0).denominator == 1)
    r = sum(1 for x, lam in f.plus if (x - lam * t0).denominator == 1)
    return JumpData(t0, step_eval(f, t0), l, r)


def step_table(f: StepFunction) -> list[dict]:
    """One period ``[0, 1)`` as alternating point rows and open-interval rows."""
    jumps = [t for t in f.potential_jumps(0, 1) if t < 1]
    if not jumps or jumps[0] != 0:
        jumps.insert(0, Fraction(0))
    rows = []
    for k, t in enumerate(jumps):
        j = jump_data(f, t)
        rows.append({"from": _fmt(t), "to": _fmt(t), "value": _fmt(j.value), "l": j.l, "r": j.r})
        nxt = jumps[k + 1] if k + 1 < len(jumps) else Fraction(1)
        mid = (t + nxt) / 2
        rows.append({"from": _fmt(t), "to": _fmt(nxt), "value": _fmt(step_eval(f, mid)),
                     "l": 0, "r": 0})
    return rows


def _cell_coefficients(C: CircuitData, cell: Sequence[int], x: Sequence[int]) -> dict[int, Fraction]:
    c = Cell.build(C.base, cell)
    return dict(zip(c.indices, c.coefficients(x)))


def build_step_function(
    C: CircuitData, x: Sequence[int], xi_cell: Sequence[int] | None = None
) -> StepFunction:
    """Step function of ``x`` relative to a cell of ``T_minus`` containing it.

    ``xi_cell`` omits one element ``v'`` of ``A-``; by default the first cell
    of ``T_minus`` in which ``x`` has nonnegative coefficients.
    """
    A = C.base
    if A.corank != 1:
        raise WrongCorank("need a corank-1 vector set")
    x = tuple(int(a) for a in x)
    if not A.in_cone(x):
        raise OutsideCone(f"{x} is not in the cone")
    if xi_cell is None:
        for cell in C.cells("-"):
            co = _cell_coefficients(C, cell, x)
            if all(c >= 0 for c in co.values()):
                xi_cell = cell
                break
    xi_cell = tuple(sorted(xi_cell))
    missing = [j for j in C.minus if j not in xi_cell]
    if len(xi_cell) != len(A) - 1 or len(missing) != 1:
        raise ValueError("reference cell must omit exactly one element of A-")
    (v_prime,) = missing
    co = _cell_coefficients(C, xi_cell, x)
    if any(c < 0 for c in co.values()):
        raise ValueError(f"{x} is not in the reference cell {xi_cell}")
    co[v_prime] = Fraction(0)
    ratios = [(co[i] / l, i) for i, l in zip(C.plus, C.lam)]
    t_max, v_second = min(ratios)
    return StepFunction(
        plus=tuple((co[i], l) for i, l in zip(C.plus, C.lam)),
        minus=tuple((co[j], m) for j, m in zip(C.minus, C.mu)),
        constant=tuple(co[k] for k in C.zero),
        t_max=t_max,
        plus_index=C.plus, minus_index=C.minus, zero_index=C.zero,
        v_prime=v_prime, v_second=v_second,
    )


# gap traces --------------------------------------------------------------------

@dataclass(frozen=True)
class TraceStep:
    side: str  # "T_plus" or "T_minus"
    xi: GenericPoint
    y: Vector
    height: int
    t: Fraction | None = None

    def to_json(self) -> dict:
        return {
            "side": self.side,
            "xi": self.xi.to_json(),
            "y": list(self.y),
            "height": self.height,
            "t": None if self.t is None else _fmt(self.t),
        }


@dataclass(frozen=True)
class GapTrace:
    x: Vector
    xi: GenericPoint
    height_minus: int
    height_plus: int
    steps: tuple[TraceStep, ...]

    def heights(self) -> set[int]:
        return {self.height_minus, self.height_plus} | {s.height for s in self.steps}

    def to_json(self) -> dict:
        return {
            "x": list(self.x),
            "xi": self.xi.to_json(),
            "height_T_minus": self.height_minus,
            "height_T_plus": self.height_plus,
            "steps": [s.to_json() for s in self.steps],
        }


def _tweak(
    A: VectorSet, cell: Cell, base: Sequence[Fraction], negative: frozenset[int],
    rng: random.Random,
) -> GenericPoint:
    """Generic point near ``base`` whose negative coefficients in ``cell`` are exactly ``negative``.

    ``base`` must be a nonnegative combination of ``A`` whose nonzero cell
    coefficients already carry the wanted signs; the perturbation adds a small
    positive combination of the cell's rays, so the point stays in the cone.
    """
    base = tuple(Fraction(b) for b in base)
    co = cell.coefficients(base)
    want = [p in negative for p in range(len(co))]
    if any((c < 0) != w for c, w in zip(co, want) if c != 0) or any(
        w for c, w in zip(co, want) if c == 0
    ):
        raise GenericSearchFailed("base point has the wrong sign pattern")
    nz = [abs(c) for c in co if c != 0]
    scale = min(nz) if nz else Fraction(1)
    for _ in range(MAX_TWEAKS):
        w = [rng.randint(1, 1000) for _ in cell.rays]
        eps = scale / (2 * 1000)
        xi = tuple(
            b + eps * sum(wp * ray[i] for wp, ray in zip(w, cell.rays)) for i, b in enumerate(base)
        )
        new = cell.coefficients(xi)
        if all((c < 0) == wnt and c != 0 for c, wnt in zip(new, want)) and is_generic(A, xi):
            return GenericPoint(xi)
        scale /= 2
    raise GenericSearchFailed("no generic point with the requested index set")


def _walk(
    A: VectorSet, T: Triangulation, side: str, xi: GenericPoint, x: Vector, rng: random.Random
) -> list[TraceStep]:
    """Drop integral rays from the index set of ``x``'s cell one at a time."""
    H = HalfOpenTriangulation(T, xi)
    k = H.locate(x)
    cell = T.cells[k]
    co = cell.coefficients(x)
    xi_co = cell.coefficients(xi.xi)
    flipped = sorted(p for p in H.flipped[k] if co[p].denominator == 1)
    steps = []
    for n in range(1, len(flipped) + 1):
        # move xi along the flipped rays until their coefficients vanish
        base = list(xi.xi)
        for p in flipped[:n]:
            for i in range(len(base)):
                base[i] -= xi_co[p] * cell.rays[p][i]
        negative = frozenset(H.flipped[k]) - frozenset(flipped[:n])
        xi_n = _tweak(A, cell, base, negative, rng)
        h = HalfOpenTriangulation(T, xi_n).height(x)
        steps.append(TraceStep(side, xi_n, x, h))
    return steps


def _jump_witnesses(
    C: CircuitData, f: StepFunction, t: Fraction, side: str, count: int, x: Vector,
    rng: random.Random,
) -> list[TraceStep]:
    """Points realizing ``f(t), ..., f(t) + count - 1`` on one triangulation."""
    A = C.base
    co = f.coefficients(t)
    if side == "T_plus":
        group, slopes = C.plus, C.lam
    else:
        group, slopes = C.minus, C.mu
    integral = [v for v in group if co[v].denominator == 1]
    v0 = integral[0]
    others = [v for v in group if v != v0]
    cell_idx = tuple(k for k in range(len(A)) if k != v0)
    cell = Cell.build(A, cell_idx)
    T = Triangulation(A, C.cells("+" if side == "T_plus" else "-"))
    c0 = int(co[v0])
    dimn = A.dim
    out = []
    interior = sample_generic_point(A, rng.randrange(2**32), within=cell.rays)
    y0 = tuple(x[i] - c0 * A.vectors[v0][i] for i in range(dimn))
    out.append(TraceStep(side, interior, y0, HalfOpenTriangulation(T, interior).height(y0), t))
    if count > 1:
        y = tuple(y0[i] + sum(A.vectors[v][i] for v in others) for i in range(dimn))
        # v0 has negative coefficients exactly on the rest of its group inside the cell
        K = max(slopes) + 1
        pos = {p: v for p, v in enumerate(cell.indices)}
        int_others = [v for v in integral if v != v0]
        for k in range(1, count):
            chosen = set(int_others[:k])
            keep_neg = frozenset(p for p, v in pos.items() if v in chosen)
            base = list(A.vectors[v0])
            for v in others:
                if v not in chosen:
                    for i in range(dimn):
                        base[i] += K * A.vectors[v][i]
            xi_k = _tweak(A, cell, base, keep_neg, rng)
            out.append(TraceStep(side, xi_k, y, HalfOpenTriangulation(T, xi_k).height(y), t))
    return out


def full_trace(C: CircuitData, x: Sequence[int], xi_seed: int | None = 0) -> GapTrace:
    """Every witness produced by the construction, without pruning."""
    A = C.base
    if A.corank != 1:
        raise WrongCorank("need a corank-1 vector set")
    x = tuple(int(a) for a in x)
    if not A.in_cone(x):
        raise OutsideCone(f"{x} is not in the cone")
    rng = random.Random(xi_seed)
    xi = sample_generic_point(A, xi_seed)
    T_plus, T_minus = corank1_triangulations(C)
    H_minus = HalfOpenTriangulation(T_minus, xi)
    H_plus = HalfOpenTriangulation(T_plus, xi)
    h_minus, h_plus = H_minus.height(x), H_plus.height(x)

    steps: list[TraceStep] = []
    cell_minus = T_minus.max_cells[H_minus.locate(x)]
    f = build_step_function(C, x, cell_minus)
    for t in f.potential_jumps(0, f.t_max):
        j = jump_data(f, t)
        if t != f.t_max and j.r > 0:
            steps.extend(_jump_witnesses(C, f, t, "T_plus", j.r, x, rng))
        if t != 0 and j.l > 0:
            steps.extend(_jump_witnesses(C, f, t, "T_minus", j.l, x, rng))
    steps.extend(_walk(A, T_minus, "T_minus", xi, x, rng))
    steps.extend(_walk(A, T_plus, "T_plus", xi, x, rng))
    return GapTrace(x, xi, h_minus, h_plus, tuple(steps))


def fill_gap_trace(C: CircuitData, x: Sequence[int], xi_seed: int | None = 0) -> GapTrace:
    """Witnesses for each height strictly between the two triangulations' heights of ``x``.

    Only the first witness found for each missing height is kept, so equal
    endpoint heights give an empty trace.
    """
    full = full_trace(C, x, xi_seed)
    lo, hi = sorted((full.height_minus, full.height_plus))
    kept: dict[int, TraceStep] = {}
    for s in full.steps:
        if lo < s.height < hi and s.height not in kept:
            kept[s.height] = s
    return GapTrace(full.x, full.xi, full.height_minus, full.height_plus,
                    tuple(kept[h] for h in sorted(kept)))


def in_span_coset(C: CircuitData, x: Sequence[int], y: Sequence[int]) -> bool:
    """Whether ``y - x`` lies in the lattice generated by the vector set."""
    Q = LatticeQuotient(C.base.vectors)
    return Q.contains(tuple(a - b for a, b in zip(y, x)))


def relation_gcd(C: CircuitData) -> int:
    return gcd(*C.lam, *C.mu)
