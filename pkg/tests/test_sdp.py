import math

import numpy as np
import pytest

from dicutcut.graph import CutAssignment, DirectedGraph, dicut_value
from dicutcut.oracle import exact_dicut
from dicutcut.sdp import (
    SolverConfig,
    SolverError,
    VectorSolution,
    build_relaxation,
    check_feasibility,
    constraint_values,
    format_vectors,
    integral_solution,
    parse_vectors,
    sdp_objective,
    solve_relaxation,
)

from conftest import FOOTNOTE, SINGLE_EDGE, TRIANGLE, random_graph


def all_reference_solution(inst, dim=None):
    """Every vector equal to x_0."""
    dim = dim or inst.num_vectors
    V = np.zeros((inst.num_vectors, dim))
    V[:, 0] = 1.0
    return VectorSolution(dim=dim, vectors=V, achieved_objective=0.0)


def test_instance_shape_counts():
    for g, vectors, constraints in (
        (SINGLE_EDGE, 3, 4),
        (FOOTNOTE, 6, 12),
        (TRIANGLE, 4, 12),
    ):
        inst = build_relaxation(g)
        assert inst.num_vectors == vectors
        assert inst.num_constraints == constraints


def test_build_rejects_empty_graph():
    with pytest.raises(ValueError, match="no edges"):
        build_relaxation(DirectedGraph(2, ()))


def test_objective_all_reference_is_zero():
    inst = build_relaxation(FOOTNOTE)
    assert sdp_objective(inst, all_reference_solution(inst)) == 0.0


def test_objective_antipodal_edge_is_one():
    inst = build_relaxation(SINGLE_EDGE)
    sol = integral_solution(inst, (-1, 1))
    assert sdp_objective(inst, sol) == 1.0
    assert sol.achieved_objective == 1.0


def test_objective_symmetric_three_cycle():
    # vertex vectors pairwise at inner product -1/2, orthogonal to x_0
    inst = build_relaxation(TRIANGLE)
    V = np.zeros((4, 4))
    V[0, 0] = 1.0
    for k in range(3):
        ang = 2.0 * math.pi * k / 3.0
        V[k + 1, 1] = math.cos(ang)
        V[k + 1, 2] = math.sin(ang)
    sol = VectorSolution(dim=4, vectors=V, achieved_objective=0.0)
    assert sdp_objective(inst, sol) == pytest.approx(0.375, abs=1e-15)


def test_objective_dimension_mismatch():
    inst = build_relaxation(TRIANGLE)
    sol = all_reference_solution(build_relaxation(SINGLE_EDGE))
    with pytest.raises(ValueError, match="shape"):
        sdp_objective(inst, sol)


def test_objective_never_exceeds_one():
    rng = np.random.default_rng(0)
    for _ in range(20):
        g = random_graph(rng)
        inst = build_relaxation(g)
        V = rng.standard_normal((g.n + 1, 5))
        V /= np.linalg.norm(V, axis=1, keepdims=True)
        sol = VectorSolution(dim=5, vectors=V, achieved_objective=0.0)
        assert sdp_objective(inst, sol) <= 1.0


def test_feasibility_all_reference():
    inst = build_relaxation(FOOTNOTE)
    rep = check_feasibility(inst, all_reference_solution(inst), 1e-7)
    assert rep.worst_violation == 0.0
    assert rep.feasible


def test_feasibility_antipodal_edge():
    inst = build_relaxation(SINGLE_EDGE)
    rep = check_feasibility(inst, integral_solution(inst, (-1, 1)), 1e-7)
    assert rep.worst_violation == 0.0


def test_feasibility_flags_norm_deviation():
    inst = build_relaxation(SINGLE_EDGE)
    sol = all_reference_solution(inst)
    sol.vectors[1] *= 0.9
    rep = check_feasibility(inst, sol, 1e-7)
    assert rep.worst_norm_dev == pytest.approx(0.19, abs=1e-12)
    assert not rep.feasible


def test_feasibility_reports_witness():
    inst = build_relaxation(SINGLE_EDGE)
    V = np.zeros((3, 3))
    V[0, 0] = 1.0
    V[1, 0] = 1.0
    V[2, 0] = -1.0  # x_u = x_0, x_v = -x_0 violates nothing? (1-1)(1-(-1)) = 0
    V[1, 0] = 0.6
    V[1, 1] = 0.8
    sol = VectorSolution(dim=3, vectors=V, achieved_objective=0.0)
    g = constraint_values(inst, sol)
    rep = check_feasibility(inst, sol, 1e-7)
    assert rep.worst_violation == pytest.approx(max(0.0, -g.min()), abs=1e-15)
    if rep.worst_violation > 0:
        assert rep.violating_edge == (1, 2)
        assert rep.violating_pattern in ("++", "+-", "-+", "--")


def test_integral_solutions_feasible_with_dicut_objective():
    rng = np.random.default_rng(1)
    for _ in range(20):
        g = random_graph(rng)
        inst = build_relaxation(g)
        signs = tuple(int(s) for s in rng.choice((-1, 1), size=g.n))
        sol = integral_solution(inst, signs)
        rep = check_feasibility(inst, sol, 1e-9)
        assert rep.feasible
        expected = float(dicut_value(g, CutAssignment(signs)))
        assert sol.achieved_objective == pytest.approx(expected, abs=1e-12)


def test_solve_single_edge_reaches_one():
    inst = build_relaxation(SINGLE_EDGE)
    sol = solve_relaxation(inst, SolverConfig(seed=3, restarts=2))
    assert sol.achieved_objective >= 1.0 - 1e-6
    assert sol.achieved_objective <= 1.0


def test_solve_footnote_dominates_dicut():
    inst = build_relaxation(FOOTNOTE)
    sol = solve_relaxation(inst, SolverConfig(seed=4, restarts=3))
    assert sol.achieved_objective >= 2.0 / 3.0 - 1e-6
    rep = check_feasibility(inst, sol, 1e-7)
    assert rep.feasible


def test_solve_three_cycle():
    inst = build_relaxation(TRIANGLE)
    sol = solve_relaxation(inst, SolverConfig(seed=5, restarts=3))
    dicut, _ = exact_dicut(TRIANGLE)
    assert sol.achieved_objective >= float(dicut) - 1e-6
    # the symmetric configuration at inner product -1/2 is feasible: optimum >= 3/8
    assert sol.achieved_objective >= 0.375 - 1e-6


def test_solution_invariants():
    inst = build_relaxation(FOOTNOTE)
    sol = solve_relaxation(inst, SolverConfig(seed=6, restarts=2))
    norms = np.linalg.norm(sol.vectors, axis=1)
    assert np.max(np.abs(norms**2 - 1.0)) <= 1e-7
    assert constraint_values(inst, sol).min() >= -1e-7
    assert sol.achieved_objective == pytest.approx(
        sdp_objective(inst, sol), abs=1e-12
    )


def test_solver_deterministic_given_config():
    inst = build_relaxation(TRIANGLE)
    cfg = SolverConfig(seed=7, restarts=2)
    a = solve_relaxation(inst, cfg)
    b = solve_relaxation(inst, cfg)
    assert a.achieved_objective == b.achieved_objective
    assert np.array_equal(a.vectors, b.vectors)


def test_solver_failure_is_loud():
    inst = build_relaxation(FOOTNOTE)
    cfg = SolverConfig(
        seed=8, restarts=1, max_outer=1, max_inner=1, feas_tol=1e-16, norm_tol=1e-16
    )
    with pytest.raises(SolverError) as err:
        solve_relaxation(inst, cfg)
    assert err.value.best_violation > 0.0


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(rank=1)
    with pytest.raises(ValueError):
        SolverConfig(feas_tol=0.0)
    with pytest.raises(ValueError):
        SolverConfig(restarts=0)


def test_vector_dump_round_trip():
    inst = build_relaxation(TRIANGLE)
    sol = solve_relaxation(inst, SolverConfig(seed=9, restarts=1))
    text = format_vectors(sol.vectors)
    back = parse_vectors(text)
    assert np.array_equal(back, sol.vectors)


def test_parse_vectors_rejects_garbage():
    with pytest.raises(ValueError, match="empty"):
        parse_vectors("\n")
    with pytest.raises(ValueError, match="ragged"):
        parse_vectors("1 2\n3\n")
