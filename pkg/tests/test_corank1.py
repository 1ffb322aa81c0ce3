from __future__ import annotations

import random
from fractions import Fraction

import pytest

from conftest import corpus_polytope
from hstar.corank1 import (
    StepFunction,
    build_step_function,
    circuit_decomposition,
    corank1_triangulations,
    fill_gap_trace,
    frac,
    full_trace,
    in_span_coset,
    jump_data,
    relation_gcd,
    step_eval,
    step_table,
)
from hstar.errors import OutsideCone, WrongCorank
from hstar.linalg import integer_kernel
from hstar.polytope import dilate_lattice_points, from_vertices
from hstar.triangulation import (
    HalfOpenTriangulation,
    Triangulation,
    VectorSet,
    homogenize,
    is_generic,
    sample_generic_point,
)
from hstar.verifier import random_polytope

CIRCUIT = homogenize(corpus_polytope("circuit6"))
X = (4, 1, 0, 0, 0, 0, 0)  # 4e0 + e1
SQUARE = homogenize(from_vertices([(0, 0), (1, 0), (0, 1), (1, 1)]))


def relation_vector(C) -> list[int]:
    out = [0] * len(C.base)
    for i, l in zip(C.plus, C.lam):
        out[i] = l
    for j, m in zip(C.minus, C.mu):
        out[j] = -m
    return out


def cone_point(A, rng, hi):
    w = [rng.randint(0, hi) for _ in A.vectors]
    return tuple(sum(c * v[i] for c, v in zip(w, A.vectors)) for i in range(A.dim))


def random_circuits(count: int, seed: int = 0):
    rng = random.Random(seed)
    found = 0
    while found < count:
        dim = rng.randint(2, 3)
        P = random_polytope(dim, 4, dim + 2, rng.randrange(10**6))
        A = homogenize(P, vertices_only=True)
        if len(A) != A.dim + 1:
            continue
        found += 1
        yield A


def test_frac():
    assert frac(Fraction(-1, 3)) == Fraction(2, 3) and frac(Fraction(5)) == 0


def test_segment_relation():
    A = homogenize(from_vertices([(0,), (2,)]))
    C = circuit_decomposition(A)
    assert relation_vector(C) in ([-1, 2, -1], [1, -2, 1])
    assert len(C.plus) == 2 and len(C.minus) == 1
    T_plus, T_minus = corank1_triangulations(C)
    assert len(T_plus.max_cells) == 2 and len(T_minus.max_cells) == 1


def test_square_relation():
    C = circuit_decomposition(SQUARE)
    assert sorted(C.lam) == [1, 1] and sorted(C.mu) == [1, 1]
    # ties put the lexicographically smallest vector on the plus side
    assert 0 in C.plus


def test_circuit6_relation():
    C = circuit_decomposition(CIRCUIT)
    assert sorted(C.lam) == [1, 2, 2, 3, 3, 3] and sorted(C.mu) == [1, 13]
    assert sum(C.lam) == sum(C.mu) and relation_gcd(C) == 1
    rel = relation_vector(C)
    assert all(sum(r * v[i] for r, v in zip(rel, CIRCUIT.vectors)) == 0 for i in range(7))


def test_relation_spans_kernel():
    for A in random_circuits(30):
        C = circuit_decomposition(A)
        (k,) = integer_kernel([list(col) for col in zip(*A.vectors)])
        rel = relation_vector(C)
        ratio = {Fraction(a, b) for a, b in zip(rel, k) if b} | {0 for a, b in zip(rel, k) if not b and a}
        assert len(ratio) == 1 and relation_gcd(C) == 1
        assert len(C.plus) >= len(C.minus) and sum(C.lam) == sum(C.mu)


def test_wrong_corank_rejected():
    with pytest.raises(WrongCorank):
        circuit_decomposition(homogenize(corpus_polytope("reeve_k2"), vertices_only=True))
    with pytest.raises(WrongCorank):
        circuit_decomposition(homogenize(corpus_polytope("unit_cube")))


def test_circuit6_triangulations():
    T_plus, T_minus = corank1_triangulations(circuit_decomposition(CIRCUIT))
    assert len(T_plus.max_cells) == 6 and len(T_minus.max_cells) == 2
    assert T_plus.volume() == T_minus.volume() == 70


def test_circuit6_step_function():
    C = circuit_decomposition(CIRCUIT)
    f = build_step_function(C, X)
    assert f.t_max == Fraction(1, 5)
    assert CIRCUIT.vectors[f.v_prime] == (1, 5, -1, -1, -1, -1, -1)
    assert f.v_second in C.plus
    assert f(0) == 4 and f(Fraction(1, 5)) == 2 and f(Fraction(4, 65)) == 3
    assert f.potential_jumps(0, f.t_max) == [0, Fraction(4, 65), Fraction(9, 65), Fraction(1, 5)]
    assert jump_data(f, Fraction(3, 5)).as_tuple() == (2, 1, 3, 3, 5)


def test_step_function_periodic_and_table():
    f = build_step_function(circuit_decomposition(CIRCUIT), X)
    for k in range(60):
        t = Fraction(k, 37)
        assert f(t) == f(t + 1) == f(t - 3)
    rows = step_table(f)
    assert rows[0]["from"] == "0/1" and rows[-1]["to"] == "1/1"
    assert all(r["l"] == r["r"] == 0 for r in rows[1::2])


def test_jump_data_matches_one_sided_limits():
    N = 10**9
    for A in list(random_circuits(15, 3)) + [CIRCUIT]:
        C = circuit_decomposition(A)
        rng = random.Random(len(A))
        for _ in range(8):
            x = cone_point(A, rng, 3)
            f = build_step_function(C, x)
            for t in f.potential_jumps(0, 1):
                j = jump_data(f, t)
                assert f(t - Fraction(1, N)) == j.left_limit
                assert f(t + Fraction(1, N)) == j.right_limit


def test_step_function_endpoints_are_cell_heights():
    C = circuit_decomposition(CIRCUIT)
    for x in [X, cone_point(CIRCUIT, random.Random(1), 2), cone_point(CIRCUIT, random.Random(2), 3)]:
        f = build_step_function(C, x)
        for t, drop in ((0, f.v_prime), (f.t_max, f.v_second)):
            cell = tuple(k for k in range(len(CIRCUIT)) if k != drop)
            T = Triangulation(CIRCUIT, (cell,))
            xi = sample_generic_point(CIRCUIT, 1, within=[CIRCUIT.vectors[k] for k in cell])
            assert HalfOpenTriangulation(T, xi).height(x) == f(t)


def test_step_function_validation():
    with pytest.raises(ValueError):
        StepFunction(plus=((Fraction(0), 1),), minus=((Fraction(0), 2),))
    C = circuit_decomposition(CIRCUIT)
    with pytest.raises(OutsideCone):
        build_step_function(C, (1, -9, 0, 0, 0, 0, 0))
    with pytest.raises(ValueError):
        build_step_function(C, X, C.cells("+")[0])


def check_trace(C, x, trace):
    T_plus, T_minus = corank1_triangulations(C)
    sides = {"T_plus": T_plus, "T_minus": T_minus}
    for s in trace.steps:
        assert is_generic(C.base, s.xi.xi)
        assert in_span_coset(C, x, s.y)
        assert HalfOpenTriangulation(sides[s.side], s.xi).height(s.y) == s.height
    lo, hi = sorted((trace.height_minus, trace.height_plus))
    assert trace.heights() >= set(range(lo, hi + 1))


def test_circuit6_gap_trace():
    C = circuit_decomposition(CIRCUIT)
    for seed in range(3):
        tr = fill_gap_trace(C, X, seed)
        assert (tr.height_minus, tr.height_plus) == (4, 2)
        assert len(tr.steps) == 1
        (s,) = tr.steps
        assert s.side == "T_minus" and s.height == 3 and s.t == Fraction(4, 65)
        assert s.y == (3, 1, 0, 0, 0, 0, 0)
        check_trace(C, X, tr)


def test_equal_endpoints_give_empty_trace():
    C = circuit_decomposition(CIRCUIT)
    tr = fill_gap_trace(C, (0,) * 7)
    assert tr.height_minus == tr.height_plus == 0 and tr.steps == ()


def test_square_circuit_exhaustive():
    C = circuit_decomposition(SQUARE)
    P = from_vertices([(0, 0), (1, 0), (0, 1), (1, 1)])
    pts = [(k,) + p for k in range(1, 4) for p in dilate_lattice_points(P, k)]
    for seed in range(3):
        for x in pts:
            check_trace(C, x, fill_gap_trace(C, x, seed))


def test_random_circuits_traces():
    checked = 0
    for A in random_circuits(12, 8):
        C = circuit_decomposition(A)
        rng = random.Random(checked)
        for _ in range(6):
            x = cone_point(A, rng, 2)
            check_trace(C, x, full_trace(C, x, rng.randrange(100)))
            check_trace(C, x, fill_gap_trace(C, x, 0))
            checked += 1
    assert checked == 72
