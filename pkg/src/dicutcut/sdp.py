"""Vector relaxation of the directed-cut objective, with triangle constraints.

For a graph on n vertices the program places unit vectors x_0, x_1, .., x_n
(x_0 is the reference direction standing for the scalar +1) so as to
maximise the edge average of ``(1 - x_u.x_v + x_0.x_v - x_0.x_u) / 4``
subject to, per edge, the four inequalities
``(x_0 +- x_u).(x_0 +- x_v) >= 0``.

The solver optimises the factor matrix directly at full rank n+1: an
augmented Lagrangian turns the 4m inequalities into a smooth penalty
(multiplier plus quadratic on the violated side), the inner loop is
gradient ascent with renormalisation to the unit sphere after every step,
and the outer loop updates the multipliers.  Row 0 is pinned to the first
coordinate axis, which removes the global rotation freedom.  The inner
loop lives in the kernel backend (compiled when available).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from dicutcut import _backend
from dicutcut.graph import DirectedGraph

PATTERN_LABELS = ("++", "+-", "-+", "--")


class SolverError(RuntimeError):
    """No restart reached the requested feasibility tolerances."""

    def __init__(self, message: str, best_violation: float, best_objective: float):
        super().__init__(message)
        self.best_violation = best_violation
        self.best_objective = best_objective


@dataclass(frozen=True)
class SdpInstance:
    """Relaxation of one graph: n vertex vectors plus the reference x_0,
    4 triangle inequalities per edge."""

    n: int
    edges: tuple[tuple[int, int], ...]

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def num_vectors(self) -> int:
        return self.n + 1

    @property
    def num_constraints(self) -> int:
        return 4 * self.m

    def tails(self) -> np.ndarray:
        return np.fromiter((u for u, _ in self.edges), dtype=np.int64, count=self.m)

    def heads(self) -> np.ndarray:
        return np.fromiter((v for _, v in self.edges), dtype=np.int64, count=self.m)


@dataclass
class VectorSolution:
    """Unit vectors in R^dim; row v of ``vectors`` is x_v, row 0 is x_0."""

    dim: int
    vectors: np.ndarray
    achieved_objective: float

    def vertex_dots(self) -> np.ndarray:
        """x_v . x_0 for v = 1..n."""
        return self.vectors[1:] @ self.vectors[0]


@dataclass(frozen=True)
class SolverConfig:
    rank: int | None = None  # None -> n + 1
    max_outer: int = 60
    max_inner: int = 3000
    step0: float = 0.5
    min_step: float = 1e-16
    improve_tol: float = 0.0  # inner loop runs until no step improves
    mu0: float = 1.0
    mu_growth: float = 2.0
    mu_max: float = 1e4
    outer_stall: float = 1e-10
    norm_tol: float = 1e-7
    feas_tol: float = 1e-7
    obj_tol: float = 1e-6
    restarts: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.rank is not None and self.rank < 2:
            raise ValueError("rank must be at least 2")
        for name in ("norm_tol", "feas_tol", "obj_tol", "step0", "mu0"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.restarts < 1 or self.max_outer < 1 or self.max_inner < 1:
            raise ValueError("iteration counts must be positive")


@dataclass(frozen=True)
class FeasibilityReport:
    worst_norm_dev: float
    worst_violation: float
    violating_edge: tuple[int, int] | None
    violating_pattern: str | None
    tol: float

    @property
    def feasible(self) -> bool:
        return self.worst_norm_dev <= self.tol and self.worst_violation <= self.tol


def build_relaxation(g: DirectedGraph) -> SdpInstance:
    if g.m == 0:
        raise ValueError("graph has no edges; the relaxation is undefined")
    return SdpInstance(n=g.n, edges=g.edges)


def _check_dims(inst: SdpInstance, sol: VectorSolution) -> None:
    if sol.vectors.shape != (inst.num_vectors, sol.dim):
        raise ValueError(
            f"solution has shape {sol.vectors.shape}, expected "
            f"({inst.num_vectors}, {sol.dim})"
        )


def _edge_dots(V: np.ndarray, tails: np.ndarray, heads: np.ndarray):
    x = V[tails] @ V[0]
    y = V[heads] @ V[0]
    z = np.einsum("ij,ij->i", V[tails], V[heads])
    return x, y, z


def _objective_of(V: np.ndarray, tails: np.ndarray, heads: np.ndarray) -> float:
    x, y, z = _edge_dots(V, tails, heads)
    # inner products of unit vectors lie in [-1, 1]; clip float spill so the
    # objective is bounded by 1 exactly
    x, y, z = np.clip(x, -1, 1), np.clip(y, -1, 1), np.clip(z, -1, 1)
    return float(np.mean((1.0 - z + y - x) / 4.0))


def constraint_values(inst: SdpInstance, sol: VectorSolution) -> np.ndarray:
    """Per-edge values of the four triangle forms, shape (m, 4); feasibility
    is all entries >= 0.  Column order matches PATTERN_LABELS."""
    _check_dims(inst, sol)
    x, y, z = _edge_dots(sol.vectors, inst.tails(), inst.heads())
    return np.stack(
        (1 + x + y + z, 1 + x - y - z, 1 - x + y - z, 1 - x - y + z), axis=1
    )


def sdp_objective(inst: SdpInstance, sol: VectorSolution) -> float:
    """Edge average of (1 - x_u.x_v + x_0.x_v - x_0.x_u) / 4; always <= 1."""
    _check_dims(inst, sol)
    return _objective_of(sol.vectors, inst.tails(), inst.heads())


def check_feasibility(inst: SdpInstance, sol: VectorSolution, tol: float) -> FeasibilityReport:
    """Worst unit-norm deviation and worst triangle violation, with the
    witnessing edge and sign pattern."""
    g = constraint_values(inst, sol)
    norms = np.einsum("ij,ij->i", sol.vectors, sol.vectors)
    worst_norm = float(np.max(np.abs(norms - 1.0)))
    flat = int(np.argmin(g))
    e, p = divmod(flat, 4)
    worst_violation = float(max(0.0, -g[e, p]))
    return FeasibilityReport(
        worst_norm_dev=worst_norm,
        worst_violation=worst_violation,
        violating_edge=inst.edges[e] if worst_violation > 0 else None,
        violating_pattern=PATTERN_LABELS[p] if worst_violation > 0 else None,
        tol=tol,
    )


def integral_solution(inst: SdpInstance, signs: Sequence[int]) -> VectorSolution:
    """Embed a +-1 assignment: x_v = signs[v-1] * x_0.  Feasible by
    construction, objective equals the assignment's directed cut value."""
    dim = inst.num_vectors
    V = np.zeros((inst.num_vectors, dim))
    V[0, 0] = 1.0
    for v, s in enumerate(signs, start=1):
        V[v, 0] = float(s)
    return VectorSolution(
        dim=dim,
        vectors=V,
        achieved_objective=_objective_of(V, inst.tails(), inst.heads()),
    )


def solve_relaxation(inst: SdpInstance, cfg: SolverConfig | None = None) -> VectorSolution:
    """Best feasible-within-tolerance solution over ``cfg.restarts`` seeded
    starts; deterministic given the config.  Raises SolverError when no
    restart reaches the tolerances."""
    cfg = cfg or SolverConfig()
    tails, heads = inst.tails(), inst.heads()
    rank = cfg.rank if cfg.rank is not None else inst.num_vectors

    best: np.ndarray | None = None
    best_obj = -np.inf
    best_viol = np.inf
    best_any_obj = -np.inf
    best_any_viol = np.inf

    for restart in range(cfg.restarts):
        rng = np.random.default_rng((cfg.seed, restart))
        V = rng.standard_normal((inst.num_vectors, rank))
        V /= np.linalg.norm(V, axis=1, keepdims=True)
        V[0] = 0.0
        V[0, 0] = 1.0
        V = np.ascontiguousarray(V)

        lam = np.zeros((inst.m, 4))
        mu = cfg.mu0
        prev_obj = None
        prev_viol = np.inf
        for _ in range(cfg.max_outer):
            _backend.al_inner(
                V, lam, mu, tails, heads,
                cfg.step0, cfg.max_inner, cfg.min_step, cfg.improve_tol,
            )
            x, y, z = _edge_dots(V, tails, heads)
            g = np.stack(
                (1 + x + y + z, 1 + x - y - z, 1 - x + y - z, 1 - x - y + z), axis=1
            )
            viol = float(max(0.0, -g.min()))
            obj = _objective_of(V, tails, heads)
            lam = np.maximum(0.0, lam - mu * g)
            if (
                viol <= cfg.feas_tol
                and prev_obj is not None
                and abs(obj - prev_obj) <= cfg.outer_stall
            ):
                break
            if viol > 0.25 * prev_viol:
                mu = min(mu * cfg.mu_growth, cfg.mu_max)
            prev_obj, prev_viol = obj, viol

        norm_dev = float(np.max(np.abs(np.einsum("ij,ij->i", V, V) - 1.0)))
        if obj > best_any_obj:
            best_any_obj, best_any_viol = obj, max(viol, norm_dev)
        if viol <= cfg.feas_tol and norm_dev <= cfg.norm_tol and obj > best_obj:
            best = V.copy()
            best_obj = obj
            best_viol = max(viol, norm_dev)

    if best is None:
        raise SolverError(
            f"no restart reached feasibility {cfg.feas_tol:g} "
            f"(best violation {best_any_viol:.3e}, objective {best_any_obj:.9f})",
            best_violation=best_any_viol,
            best_objective=best_any_obj,
        )
    return VectorSolution(dim=rank, vectors=best, achieved_objective=best_obj)


def format_vectors(vectors: np.ndarray) -> str:
    """Round-trippable text dump, one row per vector, row 0 first."""
    return "\n".join(" ".join(f"{v:.17g}" for v in row) for row in vectors) + "\n"


def parse_vectors(text: str) -> np.ndarray:
    rows = [
        [float(tok) for tok in line.split()]
        for line in text.splitlines()
        if line.strip()
    ]
    if not rows:
        raise ValueError("empty vector dump")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError("ragged vector dump")
    return np.array(rows, dtype=np.float64)
