"""Theorem-level checks on single polytopes and a seeded random sweep.

A failed check is data: it carries a witness and never raises.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .ehrhart import (
    CosetHStar,
    HStarVector,
    check_basic_identities,
    coset_hstar,
    half_open_triangulation,
    hstar_via_boxes,
    is_interval,
    min_interior_multiple,
)
from .errors import ExhaustedRetries
from .linalg import rank
from .polytope import (
    LatticePolytope,
    from_vertices,
    is_k_idp,
    is_spanning,
    lattice_points,
    spanning_polytope,
)
from .triangulation import BoxEnumerator

SeedPair = tuple[int | None, int | None]
DEFAULT_SEED_PAIRS: tuple[SeedPair, ...] = ((None, 0), (1, 1), (2, 2))
MAX_RANDOM_ATTEMPTS = 1000


@dataclass
class CheckResult:
    name: str
    passed: bool
    witness: dict | None = None
    note: str = ""
    data: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "check": self.name,
            "pass": self.passed,
            "witness": self.witness,
            "note": self.note,
            "data": self.data,
        }


@dataclass
class VerificationReport:
    instance: str
    checks: list[CheckResult] = field(default_factory=list)
    seeds: tuple[SeedPair, ...] = ()
    vertices: tuple = ()

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def json_lines(self) -> list[dict]:
        base = {
            "instance": self.instance,
            "seeds": [list(s) for s in self.seeds],
            "vertices": [list(v) for v in self.vertices],
        }
        return [{**base, **c.to_json()} for c in self.checks]


def _report(name: str, P: LatticePolytope, result: CheckResult, seeds=()) -> VerificationReport:
    return VerificationReport(name, [result], tuple(seeds), P.vertices)


def no_internal_zeros(h: HStarVector | Sequence[int]) -> bool:
    coeffs = h.coeffs if isinstance(h, HStarVector) else tuple(h)
    nz = [i for i, c in enumerate(coeffs) if c]
    return bool(nz) and nz == list(range(nz[-1] + 1))


def _first_internal_zero(h: HStarVector) -> int | None:
    for i in range(h.degree + 1):
        if h[i] == 0:
            return i
    return None


# individual checks -------------------------------------------------------------

def check_spanning_nog(P: LatticePolytope, h: HStarVector, spanning: bool) -> CheckResult:
    gap_free = no_internal_zeros(h)
    data = {"hstar": list(h.coeffs), "spanning": spanning, "gap_free": gap_free}
    if not spanning:
        note = "non-spanning and gap-free" if gap_free else "non-spanning with internal zero"
        return CheckResult("spanning_nog", True, note=note, data=data)
    if gap_free:
        return CheckResult("spanning_nog", True, data=data)
    zero = _first_internal_zero(h)
    return CheckResult(
        "spanning_nog", False,
        witness={"internal_zero": zero, "hstar": list(h.coeffs), "vertices": [list(v) for v in P.vertices]},
        data=data,
    )


def verify_spanning_nog(P: LatticePolytope, instance: str = "P") -> VerificationReport:
    return _report(instance, P, check_spanning_nog(P, hstar_via_boxes(P), is_spanning(P)))


def check_interval_per_coset(
    P: LatticePolytope, seeds: Sequence[SeedPair] = DEFAULT_SEED_PAIRS,
    splits: Sequence[CosetHStar] | None = None,
) -> CheckResult:
    if splits is None:
        splits = [coset_hstar(P, o, x) for o, x in seeds]
    first = splits[0].supports()
    data = {"cosets": len(first),
            "supports": [[list(rep), list(sup)] for rep, sup in sorted(first.items())]}
    for (o, x), split in zip(seeds, splits):
        sup = split.supports()
        for rep, s in sorted(sup.items()):
            if not is_interval(s):
                return CheckResult("interval_per_coset", False, witness={
                    "coset": list(rep), "support": list(s), "seeds": [o, x]}, data=data)
        if sup != first:
            diff = sorted(r for r in set(sup) | set(first) if sup.get(r) != first.get(r))
            rep = diff[0]
            return CheckResult("interval_per_coset", False, witness={
                "coset": list(rep), "support": list(sup.get(rep, ())),
                "reference_support": list(first.get(rep, ())), "seeds": [o, x]}, data=data)
    total = splits[0].total()
    for (o, x), split in zip(seeds, splits):
        if split.total() != total:
            return CheckResult("interval_per_coset", False, witness={
                "hstar": list(split.total().coeffs), "reference": list(total.coeffs),
                "seeds": [o, x]}, data=data)
    return CheckResult("interval_per_coset", True, data=data)


def verify_interval_per_coset(
    P: LatticePolytope, seeds: Sequence[SeedPair] = DEFAULT_SEED_PAIRS, instance: str = "P"
) -> VerificationReport:
    return _report(instance, P, check_interval_per_coset(P, seeds), seeds)


def check_polyhedral_eg(P: LatticePolytope, h: HStarVector, spanning: bool) -> CheckResult:
    vol = h.volume
    lhs, rhs = h[1] + h.degree, vol
    points = len(lattice_points(P))
    codeg = min_interior_multiple(P)
    data = {"h1_plus_degree": lhs, "volume": vol, "points": points,
            "min_interior_multiple": codeg, "equality": lhs == rhs}
    holds = lhs <= rhs
    holds_counts = points <= vol + codeg
    if not spanning:
        note = "skipped: non-spanning"
        if not holds:
            note += " (inequality fails here)"
        return CheckResult("polyhedral_eg", True, note=note, data=data)
    if holds and holds_counts:
        return CheckResult("polyhedral_eg", True, data=data)
    return CheckResult("polyhedral_eg", False, witness={
        "hstar": list(h.coeffs), "h1_plus_degree": lhs, "volume": vol,
        "points": points, "min_interior_multiple": codeg}, data=data)


def verify_polyhedral_eg(P: LatticePolytope, instance: str = "P") -> VerificationReport:
    return _report(instance, P, check_polyhedral_eg(P, hstar_via_boxes(P), is_spanning(P)))


def check_basic(P: LatticePolytope, h: HStarVector) -> CheckResult:
    flags = check_basic_identities(P, h)
    bad = [k for k, v in flags.items() if not v]
    if bad:
        return CheckResult("basic_identities", False,
                           witness={"failed": bad, "hstar": list(h.coeffs)}, data=flags)
    return CheckResult("basic_identities", True, data=flags)


def check_degree_bound(P: LatticePolytope, h: HStarVector) -> CheckResult:
    d = P.ambient_dim
    i = next(k for k in range(d + 2) if h[k] == 0)
    spanning_deg = hstar_via_boxes(spanning_polytope(P)).degree
    data = {"first_zero": i, "spanning_degree": spanning_deg}
    ok = spanning_deg <= i - 1
    equiv = (h[1] == 0) == (spanning_deg == 0)
    if ok and equiv:
        return CheckResult("degree_bound", True, data=data)
    return CheckResult("degree_bound", False, witness={
        "first_zero": i, "spanning_degree": spanning_deg, "hstar": list(h.coeffs),
        "h1_equivalence": equiv}, data=data)


def verify_degree_bound(P: LatticePolytope, instance: str = "P") -> VerificationReport:
    return _report(instance, P, check_degree_bound(P, hstar_via_boxes(P)))


def check_idp_vanishing(P: LatticePolytope, i: int, h: HStarVector | None = None) -> CheckResult:
    if h is None:
        h = hstar_via_boxes(P)
    spanning_deg = hstar_via_boxes(spanning_polytope(P)).degree
    data = {"i": i, "spanning_degree": spanning_deg}
    if spanning_deg > i - 1:
        return CheckResult("idp_vanishing", True, note="vacuous: degree hypothesis fails", data=data)
    idp = is_k_idp(P, i)
    data["idp"] = idp
    if not idp:
        return CheckResult("idp_vanishing", True, note=f"vacuous: not {i}-IDP", data=data)
    if h[i] == 0:
        return CheckResult("idp_vanishing", True, data=data)
    return CheckResult("idp_vanishing", False, witness={"i": i, "h_i": h[i]}, data=data)


def verify_idp_vanishing(P: LatticePolytope, i: int, instance: str = "P") -> VerificationReport:
    return _report(instance, P, check_idp_vanishing(P, i))


def zero_windows(h: HStarVector) -> list[tuple[int, int]]:
    """Pairs ``b < B`` with ``h_b = h_B = 0`` and nonzero entries strictly between."""
    n = len(h)
    zeros = [k for k in range(n + 1) if h[k] == 0]
    out = []
    for b, B in zip(zeros, zeros[1:]):
        if B - b >= 2:
            out.append((b, B))
    return out


def _walk_points(start: Sequence[int], steps: Sequence[Sequence[int]], depth: int) -> set[tuple]:
    seen = {tuple(start)}
    frontier = {tuple(start)}
    moves = [tuple(s) for s in steps] + [tuple(-a for a in s) for s in steps]
    for _ in range(depth):
        nxt = set()
        for p in frontier:
            for m in moves:
                q = tuple(a + b for a, b in zip(p, m))
                if q not in seen:
                    nxt.add(q)
        seen |= nxt
        frontier = nxt
    return seen


def check_reachability(
    P: LatticePolytope, v: Sequence[int] | None = None, seeds: Sequence[SeedPair] = DEFAULT_SEED_PAIRS,
    depth: int = 3, h: HStarVector | None = None,
) -> CheckResult:
    if h is None:
        h = hstar_via_boxes(P)
    windows = zero_windows(h)
    if not windows:
        return CheckResult("reachability", True, note="vacuous: no zero window",
                           data={"hstar": list(h.coeffs)})
    steps = [(1,) + p for p in P.lattice_points]
    checked = 0
    for o, x in seeds:
        H = half_open_triangulation(P, o, x)
        cone = H.T.base
        starts = []
        if v is not None:
            starts = [tuple(v)]
        else:
            for cell, flipped in zip(H.T.cells, H.flipped):
                starts.extend(p for p, _ in BoxEnumerator(cell).points(flipped))
        for s in starts:
            if not cone.in_cone(s):
                continue
            hs = H.height(s)
            window = next(((b, B) for b, B in windows if b < hs < B), None)
            if window is None:
                continue
            b, B = window
            for q in sorted(_walk_points(s, steps, depth)):
                if not cone.in_cone(q):
                    continue
                hq = H.height(q)
                checked += 1
                if not b < hq < B:
                    return CheckResult("reachability", False, witness={
                        "start": list(s), "reached": list(q), "height": hq,
                        "window": [b, B], "seeds": [o, x]})
    return CheckResult("reachability", True, data={"windows": [list(w) for w in windows],
                                                   "points_checked": checked})


def verify_reachability(
    P: LatticePolytope, v: Sequence[int] | None = None, seeds: Sequence[SeedPair] = DEFAULT_SEED_PAIRS,
    instance: str = "P",
) -> VerificationReport:
    return _report(instance, P, check_reachability(P, v, seeds), seeds)


# random instances ----------------------------------------------------------------

def random_polytope(
    dim: int, coord_bound: int = 5, n_vertices: int | None = None, seed: int = 0
) -> LatticePolytope:
    """Convex hull of seeded uniform points in ``[0, coord_bound]^dim``, resampled until full-dimensional.

    Without ``n_vertices`` the number of sampled points is itself drawn from
    ``dim + 1 .. dim + 4``.
    """
    if not 2 <= dim <= 6:
        raise ValueError("dim must be between 2 and 6")
    if not 1 <= coord_bound <= 16:
        raise ValueError("coord_bound must be between 1 and 16")
    rng = random.Random(f"{dim}:{coord_bound}:{n_vertices}:{seed}")
    n = n_vertices if n_vertices is not None else rng.randint(dim + 1, dim + 4)
    if not dim + 1 <= n <= dim + 4:
        raise ValueError("n_vertices must be between dim+1 and dim+4")
    for _ in range(MAX_RANDOM_ATTEMPTS):
        pts = [tuple(rng.randint(0, coord_bound) for _ in range(dim)) for _ in range(n)]
        diffs = [tuple(a - b for a, b in zip(p, pts[0])) for p in pts[1:]]
        if rank(diffs) == dim:
            return from_vertices(pts)
    raise ExhaustedRetries(f"no full-dimensional sample after {MAX_RANDOM_ATTEMPTS} attempts")


def analyze(
    P: LatticePolytope, instance: str = "P", seeds: Sequence[SeedPair] = DEFAULT_SEED_PAIRS,
    extended: bool = False,
) -> VerificationReport:
    """The sweep checks on one polytope: main theorem, cosets, EG inequality, identities.

    ``extended`` adds the degree bound, the IDP vanishing and the reachability checks.
    """
    splits = [coset_hstar(P, o, x) for o, x in seeds]
    h = splits[0].total()
    spanning = len(splits[0].cosets) == 1
    report = VerificationReport(instance, [], tuple(seeds), P.vertices)
    report.checks.append(check_spanning_nog(P, h, spanning))
    report.checks.append(check_interval_per_coset(P, seeds, splits))
    report.checks.append(check_polyhedral_eg(P, h, spanning))
    report.checks.append(check_basic(P, h))
    if extended:
        report.checks.append(check_degree_bound(P, h))
        i = next(k for k in range(P.ambient_dim + 2) if h[k] == 0)
        if i <= P.ambient_dim:
            report.checks.append(check_idp_vanishing(P, i, h))
        report.checks.append(check_reachability(P, None, seeds[:1], h=h))
    return report


def _sweep_one(args: tuple[int, int, int, bool]) -> VerificationReport:
    dim, seed, bound, extended = args
    P = random_polytope(dim, bound, None, seed)
    return analyze(P, f"d{dim}-b{bound}-s{seed:06d}", extended=extended)


def sweep(
    dims: Iterable[int], seeds: Iterable[int], coord_bound: int = 5, jobs: int = 1,
    extended: bool = False,
) -> Iterator[VerificationReport]:
    """Reports for every ``(dim, seed)`` pair, sorted by instance id."""
    tasks = [(d, s, coord_bound, extended) for d in dims for s in seeds]
    if jobs <= 1:
        results = [_sweep_one(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_one, tasks, chunksize=16))
    yield from sorted(results, key=lambda r: r.instance)

