"""The eleven acceptance criteria, run exactly. A summary line per criterion is printed at the end."""

from __future__ import annotations

import io
import itertools
import os
import time
from fractions import Fraction

import pytest

from conftest import corpus_names, corpus_polytope, reeve
from hstar.cli import run
from hstar.corank1 import build_step_function, circuit_decomposition, fill_gap_trace, jump_data
from hstar.ehrhart import coset_hstar, hstar_via_boxes, hstar_via_interpolation, is_interval
from hstar.polytope import dilate_lattice_points, from_vertices, is_spanning
from hstar.triangulation import (
    HalfOpenTriangulation,
    box_points,
    homogenize,
    pulling_order,
    pulling_triangulation,
    sample_generic_point,
)
from hstar.verifier import DEFAULT_SEED_PAIRS, analyze, check_interval_per_coset, random_polytope, sweep

SWEEP_DIMS = (2, 3, 4, 5)
SWEEP_SEEDS = range(2500)
X = (4, 1, 0, 0, 0, 0, 0)  # 4e0 + e1


@pytest.fixture(scope="module")
def main_sweep():
    start = time.perf_counter()
    reports = list(sweep(SWEEP_DIMS, SWEEP_SEEDS, 5, jobs=os.cpu_count() or 1))
    return reports, time.perf_counter() - start


def failures(reports, check):
    return [(r.instance, r[check].witness) for r in reports if not r[check].passed]


@pytest.mark.criterion(1, "known h*-vectors reproduced exactly")
def test_criterion_01_known_hstar():
    cases = [(reeve(k), (1, 0, k - 1, 0)) for k in (2, 3, 4, 5)]
    cases.append((from_vertices([(0, 0, 0), (1, 0, 0), (0, 0, 1), (2, 4, 1)]), (1, 1, 2, 0)))
    cases.append((corpus_polytope("nonunimodal_d5"), (1, 1, 2, 1, 2, 1)))
    for P, want in cases:
        start = time.perf_counter()
        got = hstar_via_boxes(P).coeffs
        assert time.perf_counter() - start < 1.0
        assert got == want


@pytest.mark.criterion(2, "box points agree with interpolation on corpus and 1000 random instances")
def test_criterion_02_oracle_equivalence():
    start = time.perf_counter()
    instances = [corpus_polytope(n) for n in corpus_names()]
    instances += [random_polytope(2 + s % 3, 5, None, 10**6 + s) for s in range(1000)]
    bad = [P.vertices for P in instances if hstar_via_boxes(P) != hstar_via_interpolation(P)]
    assert bad == []
    assert time.perf_counter() - start < 300


@pytest.mark.criterion(3, "spanning classification")
def test_criterion_03_spanning(main_sweep):
    reports, _ = main_sweep
    assert not any(is_spanning(reeve(k)) for k in range(2, 8))
    assert is_spanning(corpus_polytope("nonunimodal_d5"))
    dim2 = [r for r in reports if r.instance.startswith("d2-")]
    assert len(dim2) == len(SWEEP_SEEDS)
    assert [r.instance for r in dim2 if not r["spanning_nog"].data["spanning"]] == []


@pytest.mark.criterion(4, "no internal zeros on every spanning instance of the 10^4 sweep")
def test_criterion_04_main_sweep(main_sweep):
    reports, elapsed = main_sweep
    assert len(reports) == len(SWEEP_DIMS) * len(SWEEP_SEEDS) >= 10**4
    assert failures(reports, "spanning_nog") == []
    assert elapsed < 30 * 60


@pytest.mark.criterion(5, "per-coset supports are intervals and seed-independent")
def test_criterion_05_interval(main_sweep):
    reports, _ = main_sweep
    assert failures(reports, "interval_per_coset") == []
    assert all(len(r.seeds) == 3 for r in reports)
    for P in [reeve(k) for k in range(2, 8)] + [corpus_polytope("circuit6")]:
        res = check_interval_per_coset(P, DEFAULT_SEED_PAIRS)
        assert res.passed, res.witness
        assert all(is_interval(s) for s in coset_hstar(P).supports().values())


@pytest.mark.criterion(6, "step-function values")
def test_criterion_06_step_function():
    f = build_step_function(circuit_decomposition(homogenize(corpus_polytope("circuit6"))), X)
    assert f(0) == 4 and f(Fraction(1, 5)) == 2 and f(Fraction(4, 65)) == 3
    j = jump_data(f, Fraction(3, 5))
    assert (j.value, j.l, j.r) == (2, 1, 3)


@pytest.mark.criterion(7, "gap trace for x = 4e0 + e1 covers {2, 3, 4}")
def test_criterion_07_gap_trace():
    A = homogenize(corpus_polytope("circuit6"))
    C = circuit_decomposition(A)
    v7 = A.vectors[C.minus[C.mu.index(13)]]
    assert v7 == (1, 0, 0, 0, 0, 0, 0)
    tr = fill_gap_trace(C, X)
    assert {tr.height_minus, tr.height_plus} == {4, 2}
    assert tr.heights() == {2, 3, 4}
    (step,) = [s for s in tr.steps if s.height == 3]
    assert step.y == tuple(a - b for a, b in zip(X, v7))


@pytest.mark.criterion(8, "polyhedral EG inequality on the sweep, equality on cross-simplices")
def test_criterion_08_polyhedral_eg(main_sweep):
    reports, _ = main_sweep
    assert failures(reports, "polyhedral_eg") == []
    spanning = [r for r in reports if r["spanning_nog"].data["spanning"]]
    assert spanning and all(
        r["polyhedral_eg"].data["h1_plus_degree"] <= r["polyhedral_eg"].data["volume"] for r in spanning
    )
    for d in (2, 3, 4):
        P = from_vertices([tuple(int(i == j) for j in range(d)) for i in range(d)] + [(-1,) * d])
        res = analyze(P, f"cross{d}")["polyhedral_eg"]
        assert res.passed and res.data["equality"]


@pytest.mark.criterion(9, "basic identities on corpus and sweep")
def test_criterion_09_basic_identities(main_sweep):
    reports, _ = main_sweep
    assert failures(reports, "basic_identities") == []
    for name in corpus_names():
        res = analyze(corpus_polytope(name), name)["basic_identities"]
        assert res.passed, (name, res.witness)


def partition_and_tiling(P, seed: int, height: int = 3) -> list[str]:
    A = homogenize(P, vertices_only=seed % 2 == 0)
    H = HalfOpenTriangulation(pulling_triangulation(A, pulling_order(A, seed)),
                              sample_generic_point(A, seed))
    slab = [(0,) * A.dim] + [(k,) + p for k in range(1, height + 1) for p in dilate_lattice_points(P, k)]
    problems = []
    owners = {v: [k for k in range(len(H.T.cells)) if H.contains(k, v)] for v in slab}
    problems += [f"partition {v}: {o}" for v, o in owners.items() if len(o) != 1]
    for k, (cell, flipped) in enumerate(zip(H.T.cells, H.flipped)):
        inside = {v for v, o in owners.items() if k in o}
        tiles = []
        for b, hb in box_points(cell.rays, flipped):
            for combo in itertools.product(range(height + 1 - hb), repeat=len(cell.rays)):
                if hb + sum(combo) <= height:
                    tiles.append(tuple(b[i] + sum(c * r[i] for c, r in zip(combo, cell.rays))
                                       for i in range(A.dim)))
        if len(tiles) != len(set(tiles)):
            problems.append(f"tiling overlap in cell {k}")
        if set(tiles) != inside:
            problems.append(f"tiling mismatch in cell {k}")
    return problems


@pytest.mark.criterion(10, "partition and tiling up to height 3 on 100 random instances")
def test_criterion_10_partition_tiling():
    bad = {}
    for s in range(100):
        P = random_polytope(2 + s % 2, 5, None, 5 * 10**5 + s)
        problems = partition_and_tiling(P, s)
        if problems:
            bad[s] = problems
    assert bad == {}


@pytest.mark.criterion(11, "corpus output is byte-identical across runs")
def test_criterion_11_determinism():
    outs = []
    for _ in range(2):
        buf = io.StringIO()
        assert run(["corpus"], buf, io.StringIO()) == 0
        outs.append(buf.getvalue().encode())
    assert outs[0] == outs[1] and outs[0]
