"""Threshold-plus-hyperplane rounding of a vector solution.

One round is parameterised by a threshold ``a`` in [0, 1] and a seeded
random hyperplane H with H(x_0) = 1.  A vertex w with t_w = x_w . x_0 gets

* +1 when t_w >= a,
* -1 when t_w <= -a,
* H(y_w) otherwise, where y_w is x_w with its x_0 component removed and
  renormalised.

Equivalently (and checked as an invariant): round the vectors z_w by the
hyperplane alone, where z_w = y_w for |t_w| < a and sgn(t_w) x_0 otherwise.

The deterministic driver exploits that undirected cut values are multiples
of 1/|E| while the expected rounded value is at least the relaxation
objective: some (a, H) outcome reaches the snapped target numerator
``ceil(|E| (objective - slack))``, and only about |V| threshold positions
are distinguishable, so the driver enumerates threshold representatives
against a stream of seeded hyperplanes until the target is hit.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from dicutcut.graph import CutAssignment, DirectedGraph, cut_numerator
from dicutcut.sdp import VectorSolution

DEGENERACY_TOL = 1e-9  # |t_w| >= 1 - tol counts as x_w parallel to x_0
HYPERPLANE_DOT_TOL = 1e-12  # redraw when any |normal . y_w| falls below
DRIVE_SLACK = 1e-6
DEFAULT_ROUNDS_PER_CANDIDATE = 64


@dataclass(frozen=True)
class RoundingParams:
    a: float
    hyperplane_seed: int

    def __post_init__(self):
        if not 0.0 <= self.a <= 1.0:
            raise ValueError(f"threshold must lie in [0, 1], got {self.a}")


@dataclass(frozen=True)
class Hyperplane:
    """Sign functional x -> sgn(normal . x); oriented so normal . x_0 > 0."""

    normal: np.ndarray

    def side(self, vec: np.ndarray) -> int:
        return 1 if float(self.normal @ vec) >= 0.0 else -1


@dataclass(frozen=True)
class PerpProjection:
    """Unit vectors y_w orthogonal to x_0, one row per vertex.

    Vertices parallel to x_0 get a fresh appended axis each (rows are padded
    with zeros accordingly), so those y_w are orthogonal to everything else.
    """

    y: np.ndarray
    x0: np.ndarray
    degenerate: np.ndarray

    @property
    def dim(self) -> int:
        return self.y.shape[1]


@dataclass(frozen=True)
class RoundingTranscript:
    params: RoundingParams
    dots: np.ndarray  # t_w per vertex
    threshold_branch: np.ndarray  # True where |t_w| >= a
    assignment: CutAssignment
    cut_numerator: int | None
    cut_value: Fraction | None

    def to_text(self) -> str:
        lines = [
            f"{w} {float(self.dots[w - 1])!r} "
            f"{'threshold' if self.threshold_branch[w - 1] else 'hyperplane'} "
            f"{self.assignment[w]:+d}"
            for w in range(1, len(self.dots) + 1)
        ]
        num = "-" if self.cut_numerator is None else str(self.cut_numerator)
        lines.append(
            f"a={self.params.a!r} seed={self.params.hyperplane_seed} numerator={num}"
        )
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class DriveResult:
    assignment: CutAssignment
    numerator: int
    value: Fraction
    target_numerator: int
    success: bool
    rounds_used: int
    params: RoundingParams

    @property
    def shortfall(self) -> bool:
        return not self.success


def project_perp(sol: VectorSolution) -> PerpProjection:
    """Normalised components of the vertex vectors orthogonal to x_0."""
    x0 = sol.vectors[0]
    dots = sol.vertex_dots()
    n = dots.shape[0]
    degenerate = np.abs(dots) >= 1.0 - DEGENERACY_TOL
    extra = int(np.count_nonzero(degenerate))
    dim = sol.dim + extra
    y = np.zeros((n, dim))
    fresh = sol.dim
    for i in range(n):
        if degenerate[i]:
            y[i, fresh] = 1.0
            fresh += 1
        else:
            comp = sol.vectors[i + 1] - dots[i] * x0
            y[i, : sol.dim] = comp / math.sqrt(1.0 - dots[i] * dots[i])
    x0_pad = np.zeros(dim)
    x0_pad[: sol.dim] = x0
    return PerpProjection(y=y, x0=x0_pad, degenerate=degenerate)


def sample_hyperplane(proj: PerpProjection, rng: np.random.Generator) -> Hyperplane:
    """Spherically symmetric normal, reflected so normal . x_0 > 0; redrawn
    while any |normal . y_w| (or |normal . x_0|) is numerically degenerate."""
    while True:
        normal = rng.standard_normal(proj.dim)
        d0 = float(normal @ proj.x0)
        if abs(d0) < HYPERPLANE_DOT_TOL:
            continue
        if d0 < 0.0:
            normal = -normal
        if np.min(np.abs(proj.y @ normal)) < HYPERPLANE_DOT_TOL:
            continue
        return Hyperplane(normal=normal)


def _round_with(proj: PerpProjection, dots: np.ndarray, a: float, plane: Hyperplane):
    threshold = np.abs(dots) >= a
    hyper_signs = np.where(proj.y @ plane.normal >= 0.0, 1, -1)
    signs = np.where(
        threshold,
        np.where(dots >= 0.0, 1, -1),  # sgn with sgn(0) = +1, only hit when a = 0
        hyper_signs,
    )
    return threshold, signs


def randomized_round(
    sol: VectorSolution,
    params: RoundingParams,
    g: DirectedGraph | None = None,
) -> RoundingTranscript:
    """One threshold-plus-hyperplane round; the transcript records every
    branch.  Pass the graph to have the cut value evaluated."""
    proj = project_perp(sol)
    dots = sol.vertex_dots()
    rng = np.random.default_rng(params.hyperplane_seed)
    plane = sample_hyperplane(proj, rng)
    threshold, signs = _round_with(proj, dots, params.a, plane)
    assignment = CutAssignment(tuple(int(s) for s in signs))
    num = cut_numerator(g, assignment) if g is not None else None
    return RoundingTranscript(
        params=params,
        dots=dots,
        threshold_branch=threshold,
        assignment=assignment,
        cut_numerator=num,
        cut_value=Fraction(num, g.m) if g is not None else None,
    )


def z_vectors(sol: VectorSolution, a: float) -> np.ndarray:
    """Rows z_w: y_w where |t_w| < a, else sgn(t_w) x_0 (sgn(0) = +1).
    Hyperplane rounding of these reproduces randomized_round exactly."""
    proj = project_perp(sol)
    dots = sol.vertex_dots()
    z = proj.y.copy()
    snapped = np.abs(dots) >= a
    z[snapped] = np.where(dots[snapped] >= 0.0, 1.0, -1.0)[:, None] * proj.x0
    return z


def threshold_candidates(sol: VectorSolution) -> list[float]:
    """One threshold per distinguishable regime.

    A round only depends on which |t_w| fall below a, so the distinct
    magnitudes split [0, 1] into intervals of identical behaviour: a = 0
    covers everything up to the smallest magnitude, then one midpoint per
    consecutive pair (with 1 as the final boundary).  At most n+1 values.
    """
    mags = sorted(set(float(np.clip(abs(t), 0.0, 1.0)) for t in sol.vertex_dots()))
    candidates = [0.0]
    boundaries = [m for m in mags if m < 1.0] + [1.0]
    for lo, hi in itertools.pairwise(boundaries):
        candidates.append((lo + hi) / 2.0)
    return candidates


def deterministic_drive(
    g: DirectedGraph,
    sol: VectorSolution,
    budget: int | None = None,
) -> DriveResult:
    """Search seeded rounds for a cut reaching the snapped target numerator
    ceil(|E| (objective - slack)); flag a shortfall when the budget runs out.

    Rounds are enumerated hyperplane-seed-major over the threshold
    candidates, so results for a given solution are reproducible and the
    best-found value is monotone in the budget.
    """
    candidates = threshold_candidates(sol)
    if budget is None:
        budget = DEFAULT_ROUNDS_PER_CANDIDATE * len(candidates)
    if budget < 1:
        raise ValueError("budget must be at least one round")
    target = math.ceil(g.m * (sol.achieved_objective - DRIVE_SLACK))
    target = max(0, min(target, g.m))

    best: RoundingTranscript | None = None
    rounds = 0
    for seed in itertools.count():
        for a in candidates:
            params = RoundingParams(a=a, hyperplane_seed=seed)
            t = randomized_round(sol, params, g)
            rounds += 1
            if best is None or t.cut_numerator > best.cut_numerator:
                best = t
            if t.cut_numerator >= target:
                return DriveResult(
                    assignment=t.assignment,
                    numerator=t.cut_numerator,
                    value=t.cut_value,
                    target_numerator=target,
                    success=True,
                    rounds_used=rounds,
                    params=params,
                )
            if rounds >= budget:
                return DriveResult(
                    assignment=best.assignment,
                    numerator=best.cut_numerator,
                    value=best.cut_value,
                    target_numerator=target,
                    success=False,
                    rounds_used=rounds,
                    params=best.params,
                )


def rotation_function(a: float, theta: float) -> float:
    """Three-plateau rotation profile: 0 below arccos(a), pi/2 on the middle
    band, pi above pi - arccos(a)."""
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"threshold must lie in [0, 1], got {a}")
    if not 0.0 <= theta <= math.pi:
        raise ValueError(f"angle must lie in [0, pi], got {theta}")
    cut = math.acos(a)
    if theta < cut:
        return 0.0
    if theta > math.pi - cut:
        return math.pi
    return math.pi / 2.0


def edge_separation_frequencies(
    sol: VectorSolution,
    g: DirectedGraph,
    n_samples: int,
    seed: int,
) -> np.ndarray:
    """Empirical per-edge probability of c(u) != c(v) over ``n_samples``
    independent (a, H) rounds, drawn exactly as in randomized_round but
    vectorised across samples."""
    proj = project_perp(sol)
    dots = sol.vertex_dots()
    rng = np.random.default_rng(seed)

    a = rng.uniform(0.0, 1.0, size=n_samples)
    normals = rng.standard_normal((n_samples, proj.dim))
    d0 = normals @ proj.x0
    # reflect to the H(x_0) = 1 side, then redraw rows with degenerate dots
    flip = np.where(d0 >= 0.0, 1.0, -1.0)
    normals *= flip[:, None]
    while True:
        ydots = normals @ proj.y.T  # (n_samples, n)
        bad = (np.abs(ydots).min(axis=1) < HYPERPLANE_DOT_TOL) | (
            np.abs(normals @ proj.x0) < HYPERPLANE_DOT_TOL
        )
        if not bad.any():
            break
        k = int(bad.sum())
        redraw = rng.standard_normal((k, proj.dim))
        d0 = redraw @ proj.x0
        redraw *= np.where(d0 >= 0.0, 1.0, -1.0)[:, None]
        normals[bad] = redraw

    threshold = np.abs(dots)[None, :] >= a[:, None]
    hyper = np.where(ydots >= 0.0, 1, -1)
    signs = np.where(threshold, np.where(dots >= 0.0, 1, -1)[None, :], hyper)

    tails = np.fromiter((u for u, _ in g.edges), dtype=np.int64, count=g.m) - 1
    heads = np.fromiter((v for _, v in g.edges), dtype=np.int64, count=g.m) - 1
    separated = signs[:, tails] != signs[:, heads]
    return separated.mean(axis=0)
