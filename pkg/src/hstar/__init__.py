"""Exact h*-vectors of lattice polytopes via half-open triangulations."""

from .corank1 import (
    build_step_function,
    circuit_decomposition,
    corank1_triangulations,
    fill_gap_trace,
    jump_data,
    step_eval,
)
from .ehrhart import (
    CosetHStar,
    HStarVector,
    check_basic_identities,
    coset_hstar,
    hstar_via_boxes,
    hstar_via_interpolation,
)
from .linalg import IntMatrix, lattice_index, smith_normal_form, solve_unique_rational
from .polytope import (
    LatticePolytope,
    affine_span_lattice,
    from_vertices,
    interior_lattice_points,
    is_k_idp,
    is_spanning,
    lattice_points,
    normalized_volume,
    spanning_polytope,
)
from .triangulation import (
    box_points,
    half_open_index_set,
    homogenize,
    pulling_triangulation,
    reduce_point,
    sample_generic_point,
)
from .verifier import analyze, no_internal_zeros, random_polytope

__all__ = [name for name in dir() if not name.startswith("_")]
