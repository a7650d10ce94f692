"""Closed forms behind the rounding guarantee, and their numerical certifiers.

For an edge (u, v) the three inner products (x, y, z) =
(x_u.x_0, x_v.x_0, x_u.x_v) determine everything the rounding scheme does
to that edge.  This module implements:

* ``rho`` -- the inner product of the two projected vectors y_u . y_v,
  written directly in terms of (x, y, z);
* ``separation_probability`` -- the exact probability that a random
  threshold plus conditioned hyperplane assigns u and v opposite signs;
* the margin functions ``bigF``/``bigG`` with helpers ``delta``/``alpha``
  whose non-negativity on the triangle box underpins the per-edge bound
  P[c(u) != c(v)] >= (1 - z + y - x) / 4;
* grid certifiers that scan those inequalities on a lattice, substitution
  / stationary-point identity checks, and a Monte Carlo cross-check of the
  probability formula against actual sampled roundings.

The grid checks are numerical evidence at a chosen resolution, not proofs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from dicutcut.graph import DirectedGraph
from dicutcut.rounding import edge_separation_frequencies
from dicutcut.sdp import VectorSolution

GRAM_TOL = 1e-12  # Gram determinants above -GRAM_TOL count as realizable
RHO_CLAMP = 1e-12  # |rho| may spill past 1 by at most this before erroring


def gram_det(x: float, y: float, z: float) -> float:
    """Determinant of the 3x3 unit-diagonal Gram matrix of (x, y, z);
    non-negative exactly when the triple is realizable by unit vectors."""
    return 1.0 + 2.0 * x * y * z - x * x - y * y - z * z


@dataclass(frozen=True)
class ConfigTriple:
    """Edge configuration (x, y, z) = (x_u.x_0, x_v.x_0, x_u.x_v).

    Construction only checks the [-1, 1] range; operations that need the
    triangle box or realizability check those themselves (``bigF`` must be
    evaluable outside the box: that is what the counterexample scan of the
    unconstrained formula demonstrates).
    """

    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("x", "y", "z"):
            v = getattr(self, name)
            if not -1.0 <= v <= 1.0:
                raise ValueError(f"{name} = {v} outside [-1, 1]")

    def gram_det(self) -> float:
        return gram_det(self.x, self.y, self.z)

    def is_realizable(self, tol: float = GRAM_TOL) -> bool:
        return self.gram_det() >= -tol

    def in_triangle_box(self, tol: float = 0.0) -> bool:
        """abs(x + y) - 1 <= z <= 1 - abs(y - x), the four sign constraints."""
        return (
            abs(self.x + self.y) - 1.0 - tol <= self.z <= 1.0 - abs(self.y - self.x) + tol
        )


@dataclass(frozen=True)
class CertificationReport:
    domain: str
    step: float  # 0.0 for sample-based checks
    points: int
    min_margin: float
    witness: tuple[float, ...] | None
    tol: float

    @property
    def passed(self) -> bool:
        return self.min_margin >= -self.tol

    def summary(self) -> str:
        wit = (
            "-"
            if self.witness is None
            else "(" + ", ".join(f"{v:.12g}" for v in self.witness) + ")"
        )
        return (
            f"{'PASS' if self.passed else 'FAIL'} {self.domain}: "
            f"{self.points} points, min margin {self.min_margin:.6e} "
            f"at {wit} (tol {self.tol:g})"
        )


def rho(t: ConfigTriple) -> float:
    """y_u . y_v in terms of (x, y, z): (z - xy)/(sqrt(1-x^2) sqrt(1-y^2)),
    defined as 0 when x or y is exactly +-1.  Rejects triples no unit
    vectors realize (the formula would leave [-1, 1])."""
    if abs(t.x) == 1.0 or abs(t.y) == 1.0:
        return 0.0
    det = t.gram_det()
    if det < -GRAM_TOL:
        raise ValueError(
            f"triple ({t.x}, {t.y}, {t.z}) not realizable: Gram determinant {det:.3e}"
        )
    r = (t.z - t.x * t.y) / (math.sqrt(1.0 - t.x * t.x) * math.sqrt(1.0 - t.y * t.y))
    if abs(r) > 1.0 + RHO_CLAMP:
        raise ValueError(f"correlation {r!r} out of range for ({t.x}, {t.y}, {t.z})")
    return min(1.0, max(-1.0, r))


def bigF(t: ConfigTriple) -> float:
    """arccos(rho) - (pi/4) (1 - z + x - y)/(1 - y); the per-edge margin of
    the hyperplane phase against the required separation probability."""
    if t.y == 1.0:
        raise ValueError("undefined at y = 1 (division by zero)")
    return math.acos(rho(t)) - (math.pi / 4.0) * (1.0 - t.z + t.x - t.y) / (1.0 - t.y)


def delta(x: float, y: float) -> float:
    """Discriminant of the stationary-point quadratic of bigF in z:
    4 pi^4 (1-x^2)(1-y^2) - 64 pi^2 (1-y)^2."""
    if not (-1.0 <= x <= 1.0 and -1.0 <= y <= 1.0):
        raise ValueError("delta expects x, y in [-1, 1]")
    pi2 = math.pi * math.pi
    return 4.0 * pi2 * pi2 * (1.0 - x * x) * (1.0 - y * y) - 64.0 * pi2 * (1.0 - y) ** 2


def alpha(x: float, y: float) -> float:
    """(pi/4) sqrt(1-x^2) sqrt(1-y^2) / (1 - y); at least 1 whenever
    delta(x, y) >= 0."""
    if y == 1.0:
        raise ValueError("undefined at y = 1")
    if not (-1.0 <= x <= 1.0 and -1.0 <= y < 1.0):
        raise ValueError("alpha expects x in [-1, 1], y in [-1, 1)")
    return (
        (math.pi / 4.0)
        * math.sqrt(1.0 - x * x)
        * math.sqrt(1.0 - y * y)
        / (1.0 - y)
    )


def bigG(x: float, y: float) -> float:
    """pi - arccsc(alpha) - (pi/4)(1 + x) - sqrt(alpha^2 - 1), the value of
    bigF at its interior local minimum in z.  Requires alpha(x, y) >= 1
    (up to float noise); arccsc(a) is computed as arcsin(1/a)."""
    a = alpha(x, y)
    if a < 1.0:
        if a < 1.0 - 1e-12:
            raise ValueError(f"alpha = {a} < 1: outside the real domain")
        a = 1.0
    return (
        math.pi
        - math.asin(1.0 / a)
        - (math.pi / 4.0) * (1.0 + x)
        - math.sqrt(a * a - 1.0)
    )


def _reduce_xy(x, y):
    """Map (x, y) by vertex swap / reference negation to the member of its
    orbit with |x'| <= y'; the separation probability is invariant and z
    is untouched."""
    c_id = np.abs(x) <= y
    c_swap = (~c_id) & (np.abs(y) <= x)
    c_neg = (~c_id) & (~c_swap) & (np.abs(x) <= -y)
    xr = np.where(c_id, x, np.where(c_swap, y, np.where(c_neg, -x, -y)))
    yr = np.where(c_id, y, np.where(c_swap, x, np.where(c_neg, -y, -x)))
    return xr, yr


def _sep_prob_arrays(x, y, z):
    """Vectorised separation probability on triangle-box triples."""
    xr, yr = _reduce_xy(np.asarray(x, float), np.asarray(y, float))
    z = np.asarray(z, float)
    den2 = (1.0 - xr * xr) * (1.0 - yr * yr)
    den = np.sqrt(np.maximum(den2, 0.0))
    safe = den > 1e-15
    r = np.where(safe, (z - xr * yr) / np.where(safe, den, 1.0), 0.0)
    r = np.clip(r, -1.0, 1.0)
    arc = (1.0 - yr) / math.pi * np.arccos(r)
    p = np.where(xr <= 0.0, -xr + (xr + yr) / 2.0 + arc, (yr - xr) / 2.0 + arc)
    return np.clip(p, 0.0, 1.0)


def separation_probability(t: ConfigTriple) -> float:
    """Exact probability that the rounding scheme puts the two endpoints of
    an edge with configuration (x, y, z) on opposite sides.

    After reducing by the swap/negate symmetries to |x| <= y, the threshold
    phase contributes the piecewise-linear part and the hyperplane phase
    contributes ((1 - y)/pi) arccos(rho); at y = 1 that weight vanishes.
    """
    if not t.is_realizable():
        raise ValueError(f"triple ({t.x}, {t.y}, {t.z}) not realizable")
    if not t.in_triangle_box(1e-12):
        raise ValueError(f"triple ({t.x}, {t.y}, {t.z}) outside the triangle box")
    return float(_sep_prob_arrays(t.x, t.y, t.z)[()])


def realize_vectors(t: ConfigTriple) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Three unit vectors (x_u, x_v, x_0) in R^3 with the prescribed pairwise
    inner products, from an eigendecomposition of the Gram matrix."""
    G = np.array([[1.0, t.z, t.x], [t.z, 1.0, t.y], [t.x, t.y, 1.0]])
    w, P = np.linalg.eigh(G)
    if w[0] < -GRAM_TOL * max(1.0, w[-1]):
        raise ValueError(
            f"Gram matrix of ({t.x}, {t.y}, {t.z}) has eigenvalue {w[0]:.3e} < 0"
        )
    X = P * np.sqrt(np.maximum(w, 0.0))
    return X[0], X[1], X[2]


def triple_to_solution(t: ConfigTriple) -> tuple[VectorSolution, DirectedGraph]:
    """Embed one realized triple as a single-edge instance (u=1, v=2), for
    feeding the actual rounding code with a prescribed configuration."""
    xu, xv, x0 = realize_vectors(t)
    V = np.ascontiguousarray(np.stack((x0, xu, xv)))
    g = DirectedGraph(2, ((1, 2),))
    obj = (1.0 - t.z + t.y - t.x) / 4.0
    return VectorSolution(dim=3, vectors=V, achieved_objective=obj), g


def sample_box_triples(count: int, seed: int) -> list[ConfigTriple]:
    """Seeded triples with x, y uniform on [-1, 1] and z uniform on the
    triangle box slice, hence always realizable."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        x, y = rng.uniform(-1.0, 1.0, size=2)
        lo, hi = abs(x + y) - 1.0, 1.0 - abs(y - x)
        z = rng.uniform(lo, hi) if hi > lo else lo
        out.append(ConfigTriple(float(x), float(y), float(z)))
    return out


# --- lattice helpers ---------------------------------------------------------


def _interior_lattice(step: float) -> np.ndarray:
    """Multiples of step strictly inside (-1, 1)."""
    k = int(math.floor((1.0 - 1e-12) / step))
    return step * np.arange(-k, k + 1)


def _closed_unit_lattice(step: float) -> np.ndarray:
    """Multiples of step inside (-1, 1) plus the exact endpoints +-1."""
    inner = _interior_lattice(step)
    return np.concatenate(([-1.0], inner, [1.0]))


def _offsets(length: float, step: float) -> np.ndarray:
    """Multiples of step in [0, length] plus the exact right endpoint."""
    if length <= 0.0:
        return np.zeros(1)
    k = int(math.floor(length / step + 1e-9))
    vals = step * np.arange(k + 1)
    if vals[-1] < length - 1e-12:
        vals = np.concatenate((vals, [length]))
    else:
        vals[-1] = length
    return vals


def _check_step(step: float) -> None:
    if not 0.0 < step <= 0.1:
        raise ValueError(f"step must lie in (0, 0.1], got {step}")


@dataclass
class _RunningMin:
    margin: float = math.inf
    witness: tuple[float, ...] | None = None
    points: int = 0

    def update(self, margins: np.ndarray, coords) -> None:
        self.points += margins.size
        if margins.size == 0:
            return
        i = int(np.argmin(margins))
        if margins.flat[i] < self.margin:
            self.margin = float(margins.flat[i])
            self.witness = tuple(float(c.flat[i]) for c in coords)


def certify_F_nonneg(step: float, tol: float) -> CertificationReport:
    """Scan bigF >= 0 over x, y in (-1, 1), |x| <= y, z in the triangle box
    (realizable points only); passes when the minimum clears -tol."""
    _check_step(step)
    best = _RunningMin()
    ys = _interior_lattice(step)
    ys = ys[ys >= 0.0]
    for y in ys:
        xs = _interior_lattice(step)
        xs = xs[np.abs(xs) <= y + 1e-12]
        if xs.size == 0:
            continue
        zeta = _offsets(2.0 - 2.0 * y, step)
        X = xs[:, None] + np.zeros_like(zeta)[None, :]
        Z = xs[:, None] + (y - 1.0) + zeta[None, :]
        det = 1.0 + 2.0 * X * y * Z - X * X - y * y - Z * Z
        mask = det >= -GRAM_TOL
        Xv, Zv = X[mask], Z[mask]
        r = (Zv - Xv * y) / (np.sqrt(1.0 - Xv * Xv) * math.sqrt(1.0 - y * y))
        r = np.clip(r, -1.0, 1.0)
        margins = np.arccos(r) - (math.pi / 4.0) * (1.0 - Zv + Xv - y) / (1.0 - y)
        best.update(margins, (Xv, np.full_like(Xv, y), Zv))
    return CertificationReport(
        domain="F >= 0 on |x| <= y, x,y in (-1,1), z in triangle box",
        step=step,
        points=best.points,
        min_margin=best.margin,
        witness=best.witness,
        tol=tol,
    )


def certify_G_nonneg(step: float, tol: float) -> CertificationReport:
    """Scan bigG >= 0 over x, y in (-1, 1), |x| <= y, restricted to
    delta >= 0 with the interior stationary point inside the box."""
    _check_step(step)
    pi2 = math.pi * math.pi
    best = _RunningMin()
    ys = _interior_lattice(step)
    ys = ys[ys >= 0.0]
    for y in ys:
        xs = _interior_lattice(step)
        xs = xs[np.abs(xs) <= y + 1e-12]
        if xs.size == 0:
            continue
        d = 4.0 * pi2 * pi2 * (1.0 - xs * xs) * (1.0 - y * y) - 64.0 * pi2 * (1.0 - y) ** 2
        zmin = xs * y - np.sqrt(np.maximum(d, 0.0)) / (2.0 * pi2)
        mask = (d >= 0.0) & (zmin >= xs + y - 1.0)
        xv = xs[mask]
        if xv.size == 0:
            continue
        a2m1 = d[mask] / (64.0 * pi2 * (1.0 - y) ** 2)
        a = np.sqrt(1.0 + a2m1)
        margins = (
            math.pi
            - np.arcsin(1.0 / a)
            - (math.pi / 4.0) * (1.0 + xv)
            - np.sqrt(a2m1)
        )
        best.update(margins, (xv, np.full_like(xv, y)))
    return CertificationReport(
        domain="G >= 0 on |x| <= y, delta >= 0, stationary z above box floor",
        step=step,
        points=best.points,
        min_margin=best.margin,
        witness=best.witness,
        tol=tol,
    )


def certify_bound(step: float, tol: float) -> CertificationReport:
    """Scan ((1-y)/pi) arccos(rho) >= (1 - z + x - y)/4 over the closed
    domain x, y in [-1, 1], |x| <= y, z in the triangle box, including the
    y = 1 edge where the left side vanishes."""
    _check_step(step)
    best = _RunningMin()
    ys = _closed_unit_lattice(step)
    ys = ys[ys >= 0.0]
    all_x = _closed_unit_lattice(step)
    for y in ys:
        xs = all_x[np.abs(all_x) <= y + 1e-12]
        if xs.size == 0:
            continue
        zeta = _offsets(2.0 - 2.0 * y, step)
        X = xs[:, None] + np.zeros_like(zeta)[None, :]
        Z = xs[:, None] + (y - 1.0) + zeta[None, :]
        det = 1.0 + 2.0 * X * y * Z - X * X - y * y - Z * Z
        mask = det >= -GRAM_TOL
        Xv, Zv = X[mask], Z[mask]
        den2 = (1.0 - Xv * Xv) * (1.0 - y * y)
        den = np.sqrt(np.maximum(den2, 0.0))
        safe = den > 1e-15
        r = np.where(safe, (Zv - Xv * y) / np.where(safe, den, 1.0), 0.0)
        r = np.clip(r, -1.0, 1.0)
        margins = (1.0 - y) / math.pi * np.arccos(r) - (1.0 - Zv + Xv - y) / 4.0
        best.update(margins, (Xv, np.full_like(Xv, y), Zv))
    return CertificationReport(
        domain="(1-y)/pi arccos(rho) >= (1-z+x-y)/4 on |x| <= y, closed box",
        step=step,
        points=best.points,
        min_margin=best.margin,
        witness=best.witness,
        tol=tol,
    )


def certify_substitutions(samples: int, seed: int, tol: float = 1e-9) -> CertificationReport:
    """At seeded (x, y) with delta >= 0 and z at the interior stationary
    point xy - sqrt(delta)/(2 pi^2), check the two closed-form identities

        arccos(rho) = pi - arccsc(alpha)
        (pi/4)(1-z+x-y)/(1-y) = (pi/4)(1+x) + sqrt(alpha^2 - 1)

    and that a finite-difference scan of bigF in z finds its local minimum /
    maximum within one grid cell of xy -+ sqrt(delta)/(2 pi^2)."""
    rng = np.random.default_rng(seed)
    pi2 = math.pi * math.pi
    best = _RunningMin()
    checked = 0
    for _ in range(samples):
        x, y = rng.uniform(-1.0, 1.0, size=2)
        d = delta(x, y)
        if d < 0.0:
            continue  # no real stationary points
        checked += 1
        s = math.sqrt(d) / (2.0 * pi2)
        z_min = x * y - s
        z_max = x * y + s
        a = alpha(x, y)
        lhs1 = math.acos(rho(ConfigTriple(x, y, max(-1.0, z_min))))
        rhs1 = math.pi - math.asin(1.0 / max(a, 1.0))
        err1 = abs(lhs1 - rhs1)
        lhs2 = (math.pi / 4.0) * (1.0 - z_min + x - y) / (1.0 - y)
        rhs2 = (math.pi / 4.0) * (1.0 + x) + math.sqrt(max(a * a - 1.0, 0.0))
        err2 = abs(lhs2 - rhs2)
        best.update(np.array([-err1, -err2]), (np.array([x, x]), np.array([y, y])))

        # bracket the stationary points by a local scan of bigF
        D = math.sqrt((1.0 - x * x) * (1.0 - y * y))
        h = 0.5 * min(D - s, s)
        if h <= 1e-9:
            continue  # delta ~ 0: stationary points merge, nothing to bracket
        for z_star, kind in ((z_min, "min"), (z_max, "max")):
            grid = z_star + np.linspace(-h, h, 21)
            den = math.sqrt(1.0 - x * x) * math.sqrt(1.0 - y * y)
            r = np.clip((grid - x * y) / den, -1.0, 1.0)
            vals = np.arccos(r) - (math.pi / 4.0) * (1.0 - grid + x - y) / (1.0 - y)
            i = int(np.argmin(vals) if kind == "min" else np.argmax(vals))
            spacing = grid[1] - grid[0]
            ok = 0 < i < 20 and abs(grid[i] - z_star) <= spacing + 1e-12
            if not ok:
                best.update(np.array([-1.0]), (np.array([x]), np.array([y])))
    best.points = checked
    return CertificationReport(
        domain=f"substitution identities at z = xy - sqrt(delta)/(2 pi^2), "
        f"{samples} seeded samples",
        step=0.0,
        points=checked,
        min_margin=best.margin if checked else 0.0,
        witness=best.witness,
        tol=tol,
    )


def certify_config_bound(step: float, tol: float) -> CertificationReport:
    """Closed-form per-edge guarantee: separation_probability >=
    (1 - z + y - x)/4 on the full triangle-box lattice (both orientations
    of (x, y), realizable points only)."""
    _check_step(step)
    best = _RunningMin()
    xs_all = _closed_unit_lattice(step)
    for y in xs_all:
        xs = xs_all
        length = 2.0 - 2.0 * np.maximum(np.abs(xs), abs(y))
        # z-range offsets differ per x here, so chunk by equal lengths
        for ln in np.unique(length):
            sel = xs[length == ln]
            zeta = _offsets(float(ln), step)
            lo = np.abs(sel + y) - 1.0
            Z = lo[:, None] + zeta[None, :]
            X = np.broadcast_to(sel[:, None], Z.shape)
            det = 1.0 + 2.0 * X * y * Z - X * X - y * y - Z * Z
            mask = det >= -GRAM_TOL
            Xv, Zv = X[mask], Z[mask]
            Yv = np.full_like(Xv, y)
            p = _sep_prob_arrays(Xv, Yv, Zv)
            margins = p - (1.0 - Zv + Yv - Xv) / 4.0
            best.update(margins, (Xv, Yv, Zv))
    return CertificationReport(
        domain="separation probability >= (1-z+y-x)/4 on the triangle box",
        step=step,
        points=best.points,
        min_margin=best.margin,
        witness=best.witness,
        tol=tol,
    )


@dataclass(frozen=True)
class McTripleResult:
    triple: ConfigTriple
    probability: float
    bound: float
    frequency: float
    stderr: float

    @property
    def margins(self) -> tuple[float, float]:
        """(frequency vs bound margin, 4-sigma match margin), both >= 0 on pass."""
        slack = 4.0 * self.stderr + 1e-12
        return (
            self.frequency - (self.bound - slack),
            slack - abs(self.frequency - self.probability),
        )


def certify_config_mc(
    triples: list[ConfigTriple],
    n_samples: int,
    seed: int,
    threads: int = 1,
) -> tuple[CertificationReport, list[McTripleResult]]:
    """Monte Carlo cross-check of separation_probability: realize each
    triple, run ``n_samples`` actual rounding rounds, and require the
    empirical frequency to clear the per-edge bound and match the closed
    form, both within 4 binomial standard errors."""

    def run_one(i_t):
        i, t = i_t
        sol, g = triple_to_solution(t)
        freq = float(edge_separation_frequencies(sol, g, n_samples, (seed, i))[0])
        p = separation_probability(t)
        return McTripleResult(
            triple=t,
            probability=p,
            bound=(1.0 - t.z + t.y - t.x) / 4.0,
            frequency=freq,
            stderr=math.sqrt(max(p * (1.0 - p), 0.0) / n_samples),
        )

    items = list(enumerate(triples))
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_one, items))
    else:
        results = [run_one(it) for it in items]

    best = _RunningMin()
    for res in results:
        m1, m2 = res.margins
        coords = (
            np.array([res.triple.x] * 2),
            np.array([res.triple.y] * 2),
            np.array([res.triple.z] * 2),
        )
        best.update(np.array([m1, m2]), coords)
    best.points = len(results)
    return (
        CertificationReport(
            domain=f"MC separation frequency vs closed form, "
            f"{len(triples)} triples x {n_samples} rounds",
            step=0.0,
            points=len(results),
            min_margin=best.margin if results else 0.0,
            witness=best.witness,
            tol=0.0,
        ),
        results,
    )


def emit_F_curve(
    x: float, y: float, z_lo: float, z_hi: float, step: float
) -> tuple[list[tuple[float, float]], int]:
    """Table of (z, bigF(x, y, z)) for z from z_lo to z_hi in steps of
    ``step``; rows outside the realizable range are omitted and counted."""
    if y >= 1.0:
        raise ValueError("curve requires y < 1")
    if z_hi < z_lo:
        raise ValueError("empty z range")
    if step <= 0.0:
        raise ValueError("step must be positive")
    count = int(math.floor((z_hi - z_lo) / step + 1e-9)) + 1
    rows: list[tuple[float, float]] = []
    omitted = 0
    for k in range(count):
        z = z_lo + k * step
        try:
            t = ConfigTriple(x, y, z)
            val = bigF(t)
        except ValueError:
            omitted += 1
            continue
        rows.append((z, val))
    return rows, omitted
