import math
from fractions import Fraction

import numpy as np
import pytest

from dicutcut.analysis import ConfigTriple, rho, triple_to_solution, sample_box_triples
from dicutcut.graph import DirectedGraph, cut_value
from dicutcut.oracle import exact_dicut
from dicutcut.rounding import (
    DEGENERACY_TOL,
    RoundingParams,
    deterministic_drive,
    edge_separation_frequencies,
    project_perp,
    randomized_round,
    rotation_function,
    sample_hyperplane,
    threshold_candidates,
    z_vectors,
)
from dicutcut.sdp import SolverConfig, VectorSolution, build_relaxation, solve_relaxation

from conftest import FOOTNOTE, SINGLE_EDGE, TRIANGLE


def solution_with_dots(ts, extra_dim=0):
    """Unit vectors achieving prescribed x_w . x_0 values."""
    n = len(ts)
    dim = n + 1 + extra_dim
    V = np.zeros((n + 1, dim))
    V[0, 0] = 1.0
    for i, t in enumerate(ts, start=1):
        V[i, 0] = t
        V[i, i] = math.sqrt(max(0.0, 1.0 - t * t))
    return VectorSolution(dim=dim, vectors=V, achieved_objective=0.0)


def random_unit_solution(rng, n, force_degenerate=()):
    dim = n + 1
    V = rng.standard_normal((n + 1, dim))
    V /= np.linalg.norm(V, axis=1, keepdims=True)
    for v, sign in force_degenerate:
        V[v] = sign * V[0]
    return VectorSolution(dim=dim, vectors=np.ascontiguousarray(V), achieved_objective=0.0)


class TestProjectPerp:
    def test_orthogonal_vector_unchanged(self):
        sol = solution_with_dots([0.0, 0.5])
        proj = project_perp(sol)
        assert np.allclose(proj.y[0, : sol.dim], sol.vectors[1])

    def test_parallel_vector_gets_fresh_axis(self):
        sol = solution_with_dots([1.0, 0.3])
        proj = project_perp(sol)
        assert proj.degenerate[0]
        assert not proj.degenerate[1]
        assert proj.dim == sol.dim + 1
        # fresh axis is orthogonal to x_0 and to every other projected vector
        assert proj.y[0] @ proj.x0 == 0.0
        assert proj.y[0] @ proj.y[1] == 0.0
        assert np.linalg.norm(proj.y[0]) == 1.0

    def test_equal_dots_uncorrelate(self):
        # x_u.x_0 = x_v.x_0 = 0.6 and x_u.x_v = 0.36 leaves nothing shared
        t = ConfigTriple(0.6, 0.6, 0.36)
        sol, _ = triple_to_solution(t)
        proj = project_perp(sol)
        assert abs(proj.y[0] @ proj.y[1]) < 1e-12

    def test_projected_inner_products_equal_rho(self):
        for t in sample_box_triples(50, seed=21):
            if abs(t.x) > 1 - DEGENERACY_TOL or abs(t.y) > 1 - DEGENERACY_TOL:
                continue
            sol, _ = triple_to_solution(t)
            proj = project_perp(sol)
            assert proj.y[0] @ proj.y[1] == pytest.approx(rho(t), abs=1e-9)

    def test_projected_rows_are_unit(self):
        rng = np.random.default_rng(22)
        sol = random_unit_solution(rng, 6, force_degenerate=[(3, 1.0), (5, -1.0)])
        proj = project_perp(sol)
        assert np.allclose(np.linalg.norm(proj.y, axis=1), 1.0, atol=1e-12)


class TestRandomizedRound:
    def test_a_zero_is_sign_rounding(self):
        rng = np.random.default_rng(30)
        sol = random_unit_solution(rng, 5)
        t = randomized_round(sol, RoundingParams(a=0.0, hyperplane_seed=1))
        dots = sol.vertex_dots()
        assert all(
            t.assignment[w] == (1 if dots[w - 1] >= 0 else -1) for w in range(1, 6)
        )
        assert t.threshold_branch.all()

    def test_a_one_is_pure_hyperplane(self):
        rng = np.random.default_rng(31)
        sol = random_unit_solution(rng, 5)
        assert np.all(np.abs(sol.vertex_dots()) < 1.0)
        t = randomized_round(sol, RoundingParams(a=1.0, hyperplane_seed=2))
        assert not t.threshold_branch.any()
        proj = project_perp(sol)
        plane = sample_hyperplane(proj, np.random.default_rng(2))
        expected = np.where(proj.y @ plane.normal >= 0, 1, -1)
        assert tuple(expected) == t.assignment.signs

    def test_antipodal_edge_always_cut(self):
        sol = solution_with_dots([-1.0, 1.0])
        for a in (0.0, 0.3, 1.0):
            for seed in range(3):
                t = randomized_round(
                    sol, RoundingParams(a=a, hyperplane_seed=seed), SINGLE_EDGE
                )
                assert t.assignment.signs == (-1, 1)
                assert t.cut_value == 1

    def test_boundary_dot_takes_threshold_branch(self):
        sol = solution_with_dots([0.4, -0.4, 0.1])
        t = randomized_round(sol, RoundingParams(a=0.4, hyperplane_seed=3))
        assert t.threshold_branch[0] and t.threshold_branch[1]
        assert not t.threshold_branch[2]
        assert t.assignment[1] == 1
        assert t.assignment[2] == -1

    def test_transcript_text(self):
        sol = solution_with_dots([1.0, -0.5])
        t = randomized_round(
            sol, RoundingParams(a=0.7, hyperplane_seed=4), DirectedGraph(2, ((1, 2),))
        )
        text = t.to_text()
        lines = text.strip().splitlines()
        assert len(lines) == 3
        assert lines[0].startswith("1 1.0 threshold")
        assert lines[1].split()[2] == "hyperplane"
        assert "a=0.7" in lines[2] and "seed=4" in lines[2]


class TestZVectors:
    def test_a_zero_snaps_everything(self):
        rng = np.random.default_rng(40)
        sol = random_unit_solution(rng, 4)
        z = z_vectors(sol, 0.0)
        proj = project_perp(sol)
        dots = sol.vertex_dots()
        for i in range(4):
            expected = (1.0 if dots[i] >= 0 else -1.0) * proj.x0
            assert np.allclose(z[i], expected)

    def test_a_one_keeps_projections(self):
        rng = np.random.default_rng(41)
        sol = random_unit_solution(rng, 4)
        assert np.all(np.abs(sol.vertex_dots()) < 1.0)
        proj = project_perp(sol)
        assert np.allclose(z_vectors(sol, 1.0), proj.y)

    @pytest.mark.parametrize("trial", range(10))
    def test_hyperplane_rounding_of_z_matches_randomized_round(self, trial):
        rng = np.random.default_rng(100 + trial)
        n = int(rng.integers(2, 7))
        degenerate = [(1, 1.0)] if trial % 3 == 0 else []
        sol = random_unit_solution(rng, n, force_degenerate=degenerate)
        a = float(rng.uniform(0, 1))
        seed = int(rng.integers(0, 1 << 32))
        transcript = randomized_round(sol, RoundingParams(a=a, hyperplane_seed=seed))
        z = z_vectors(sol, a)
        plane = sample_hyperplane(project_perp(sol), np.random.default_rng(seed))
        via_z = tuple(1 if z[i] @ plane.normal >= 0 else -1 for i in range(n))
        assert via_z == transcript.assignment.signs


class TestThresholdCandidates:
    def test_all_zero_dots(self):
        sol = solution_with_dots([0.0, 0.0, 0.0])
        assert threshold_candidates(sol) == [0.0, 0.5]

    def test_two_magnitudes(self):
        sol = solution_with_dots([0.2, -0.8])
        assert threshold_candidates(sol) == [0.0, 0.5, 0.9]

    def test_distinct_magnitudes_count(self):
        ts = [0.1, -0.25, 0.45, 0.7, -0.9]
        sol = solution_with_dots(ts)
        cands = threshold_candidates(sol)
        assert len(cands) == len(ts) + 1
        assert cands == sorted(cands)

    def test_at_most_n_plus_two(self):
        rng = np.random.default_rng(50)
        for _ in range(10):
            n = int(rng.integers(1, 8))
            sol = random_unit_solution(rng, n)
            cands = threshold_candidates(sol)
            assert len(cands) <= n + 2
            assert all(0.0 <= a <= 1.0 for a in cands)


class TestRotationFunction:
    def test_plateaus(self):
        a = 0.6
        cut = math.acos(a)
        assert rotation_function(a, cut / 2) == 0.0
        assert rotation_function(a, cut) == math.pi / 2
        assert rotation_function(a, math.pi / 2) == math.pi / 2
        assert rotation_function(a, math.pi - cut) == math.pi / 2
        assert rotation_function(a, math.pi - cut / 2) == math.pi

    def test_zero_maps_to_zero_below_one(self):
        for a in (0.0, 0.2, 0.5, 0.99):
            assert rotation_function(a, 0.0) == 0.0

    def test_middle_plateau(self):
        for a in (0.1, 0.5, 1.0):
            assert rotation_function(a, math.pi / 2) == math.pi / 2

    def test_a_one_is_constant_half_pi(self):
        for theta in np.linspace(0.0, math.pi, 7):
            assert rotation_function(1.0, float(theta)) == math.pi / 2

    def test_monotone_and_odd(self):
        for a in (0.0, 0.3, 0.7, 1.0):
            thetas = np.linspace(0.0, math.pi, 101)
            vals = [rotation_function(a, float(t)) for t in thetas]
            assert all(v2 >= v1 for v1, v2 in zip(vals, vals[1:]))
            for t in thetas:
                f = rotation_function(a, float(t))
                f_mirror = rotation_function(a, float(math.pi - t))
                assert f_mirror == pytest.approx(math.pi - f, abs=1e-12)

    def test_domain_checks(self):
        with pytest.raises(ValueError):
            rotation_function(1.2, 0.5)
        with pytest.raises(ValueError):
            rotation_function(0.5, -0.1)


class TestDrive:
    def test_single_edge_first_round(self):
        inst = build_relaxation(SINGLE_EDGE)
        sol = solve_relaxation(inst, SolverConfig(seed=60, restarts=2))
        res = deterministic_drive(SINGLE_EDGE, sol)
        assert res.success
        assert res.value == 1
        assert res.rounds_used == 1

    def test_footnote_meets_promise(self):
        inst = build_relaxation(FOOTNOTE)
        sol = solve_relaxation(inst, SolverConfig(seed=61, restarts=3))
        res = deterministic_drive(FOOTNOTE, sol)
        assert res.success
        assert res.value >= Fraction(2, 3)
        assert cut_value(FOOTNOTE, res.assignment) == res.value

    def test_shortfall_flagged_on_unreachable_target(self):
        # objective claimed to be 1 but the triangle caps cuts at 2/3
        V = np.zeros((4, 4))
        V[0, 0] = 1.0
        V[1, 1] = 1.0
        V[2, 2] = 1.0
        V[3, 3] = 1.0
        sol = VectorSolution(dim=4, vectors=V, achieved_objective=1.0)
        res = deterministic_drive(TRIANGLE, sol, budget=12)
        assert not res.success
        assert res.shortfall
        assert res.rounds_used == 12
        assert res.target_numerator == 3
        assert res.numerator == 2  # best achievable was still found

    def test_budget_monotonicity(self):
        rng = np.random.default_rng(62)
        g = DirectedGraph(5, ((1, 2), (2, 3), (3, 4), (4, 5), (5, 1), (1, 3)))
        V = rng.standard_normal((6, 6))
        V /= np.linalg.norm(V, axis=1, keepdims=True)
        inst = build_relaxation(g)
        from dicutcut.sdp import sdp_objective

        sol = VectorSolution(dim=6, vectors=V, achieved_objective=0.0)
        sol.achieved_objective = sdp_objective(inst, sol)
        nums = [
            deterministic_drive(g, sol, budget=b).numerator for b in (1, 4, 16, 64)
        ]
        assert nums == sorted(nums)

    def test_drive_beats_oracle_on_named_graphs(self):
        for seed, g in ((63, FOOTNOTE), (64, TRIANGLE), (65, SINGLE_EDGE)):
            inst = build_relaxation(g)
            sol = solve_relaxation(inst, SolverConfig(seed=seed, restarts=3))
            res = deterministic_drive(g, sol)
            assert res.success
            assert res.value >= exact_dicut(g)[0]

    def test_budget_validation(self):
        sol = solution_with_dots([0.5, -0.5])
        with pytest.raises(ValueError):
            deterministic_drive(SINGLE_EDGE, sol, budget=0)


class TestMonteCarloBound:
    def test_edge_frequencies_meet_configuration_bound(self):
        inst = build_relaxation(TRIANGLE)
        sol = solve_relaxation(inst, SolverConfig(seed=70, restarts=2))
        n_samples = 40000
        freqs = edge_separation_frequencies(sol, TRIANGLE, n_samples, seed=71)
        dots = sol.vertex_dots()
        vecs = sol.vectors
        for idx, (u, v) in enumerate(TRIANGLE.edges):
            x, y = dots[u - 1], dots[v - 1]
            z = float(vecs[u] @ vecs[v])
            bound = (1.0 - z + y - x) / 4.0
            se = math.sqrt(0.25 / n_samples)
            assert freqs[idx] >= bound - 4.0 * se

    def test_frequencies_deterministic(self):
        sol, g = triple_to_solution(ConfigTriple(0.1, 0.4, 0.2))
        f1 = edge_separation_frequencies(sol, g, 2000, seed=72)
        f2 = edge_separation_frequencies(sol, g, 2000, seed=72)
        assert np.array_equal(f1, f2)
