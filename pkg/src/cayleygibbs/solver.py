"""Fixed points of the weakly periodic Ising field equations.

Boundary fields satisfy h_state = sum over successor states of
count * f(h_successor) with f(h) = artanh(theta * tanh h), the field one
edge passes upward at interaction strength theta in (0, 1).  This module
solves those equations three independent ways: multistart damped Newton on
the full system, exact reduction on the four-block invariant subspace of
the nine-state system (k = 2), and scalar root finding for constant
solutions; and it verifies solutions against the finite-volume definition
of the measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from cayleygibbs.cosets import SubgroupSpec
from cayleygibbs.invariance import StatePair, WeaklyPeriodicSystem, derive_system, state_of
from cayleygibbs.words import Word, enumerate_ball, parent

# coordinate spread below this means a constant (translation-invariant) vector
TI_SPREAD = 1e-8

NINE_STATES: tuple[StatePair, ...] = tuple((i, j) for i in range(3) for j in range(3))


class NotInvariantError(ValueError):
    """The equality pattern is not preserved by the recursion operator."""


@dataclass(frozen=True)
class Theta:
    """Interaction parameter theta = tanh(J beta) with J = 1, theta in (0,1)."""

    value: float

    def __post_init__(self) -> None:
        if not 0.0 < self.value < 1.0:
            raise ValueError(f"theta must lie strictly inside (0, 1), got {self.value}")

    @property
    def beta(self) -> float:
        return math.atanh(self.value)

    @property
    def a(self) -> float:
        """The Moebius parameter (1 - theta)/(1 + theta) in (0, 1)."""
        return (1.0 - self.value) / (1.0 + self.value)


def edge_field(h, theta: Theta):
    """Field transmitted along one edge: artanh(theta * tanh h)."""
    return np.arctanh(theta.value * np.tanh(h))


def count_matrix(system: WeaklyPeriodicSystem) -> np.ndarray:
    return np.array(system.counts, dtype=float)


def apply_recursion(system: WeaklyPeriodicSystem, h: Sequence[float], theta: Theta) -> np.ndarray:
    """One application of the recursion operator: counts times f(h)."""
    h = np.asarray(h, dtype=float)
    if h.shape != (len(system.states),):
        raise ValueError(f"field vector must have length {len(system.states)}")
    return count_matrix(system) @ edge_field(h, theta)


@dataclass(frozen=True)
class SolverConfig:
    # flat_merge_*: at a degenerate root (e.g. the critical k*theta = 1)
    # Newton converges to a cloud of points the residual cannot separate;
    # candidates closer than flat_merge_radius whose midpoint still solves
    # the system to flat_merge_residual count as one root.
    tol: float = 1e-12
    newton_max_iter: int = 200
    starts: int = 200
    start_box: tuple[float, float] = (-5.0, 5.0)
    dedupe_eps: float = 1e-8
    flat_merge_radius: float = 1e-2
    flat_merge_residual: float = 1e-10
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.tol <= 0 or self.dedupe_eps <= self.tol:
            raise ValueError("need 0 < tol < dedupe_eps")
        if self.flat_merge_radius < self.dedupe_eps or self.flat_merge_residual <= self.tol:
            raise ValueError(
                "need flat_merge_radius >= dedupe_eps and flat_merge_residual > tol"
            )
        if self.newton_max_iter < 1 or self.starts < 0:
            raise ValueError("newton_max_iter must be >= 1 and starts >= 0")
        if not self.start_box[0] < self.start_box[1]:
            raise ValueError("start_box must be an increasing pair")


@dataclass(frozen=True)
class Solution:
    fields: tuple[float, ...]
    residual: float
    kind: str  # "translation-invariant" or "weakly-periodic"
    invariant_sets: tuple[str, ...]


@dataclass(frozen=True)
class SolutionSet:
    theta: float
    states: tuple[StatePair, ...]
    solutions: tuple[Solution, ...]

    def translation_invariant(self) -> tuple[Solution, ...]:
        return tuple(s for s in self.solutions if s.kind == "translation-invariant")

    def weakly_periodic(self) -> tuple[Solution, ...]:
        return tuple(s for s in self.solutions if s.kind == "weakly-periodic")


# === Newton iteration ===


def _jacobian(F, u: np.ndarray, step: float = 1e-6) -> np.ndarray:
    dim = len(u)
    J = np.empty((dim, dim))
    for j in range(dim):
        e = np.zeros(dim)
        e[j] = step
        J[:, j] = (F(u + e) - F(u - e)) / (2 * step)
    return J


def _newton(F, u0: np.ndarray, tol: float, max_iter: int) -> np.ndarray | None:
    u = u0.astype(float)
    for _ in range(max_iter):
        r = F(u)
        norm = np.max(np.abs(r))
        if not np.isfinite(norm):
            return None
        if norm <= tol:
            return u
        try:
            step = np.linalg.solve(_jacobian(F, u), -r)
        except np.linalg.LinAlgError:
            return None
        lam = 1.0
        for _ in range(30):
            trial = u + lam * step
            if np.max(np.abs(F(trial))) < norm:
                u = trial
                break
            lam *= 0.5
        else:
            return None
    r = F(u)
    return u if np.max(np.abs(r)) <= tol else None


def _multistart(M: np.ndarray, theta: Theta, cfg: SolverConfig) -> list[np.ndarray]:
    """Deterministic multistart Newton on u = M f(u); deduped solutions.

    Plain distance dedupe, plus a flatness merge: when two candidates are
    within flat_merge_radius and the residual at their midpoint is still
    below flat_merge_residual, nothing separates them at working precision
    and the one with smaller residual represents both.
    """

    def F(u: np.ndarray) -> np.ndarray:
        return u - M @ edge_field(u, theta)

    def resid(u: np.ndarray) -> float:
        return float(np.max(np.abs(F(u))))

    dim = M.shape[0]
    rng = np.random.default_rng(cfg.rng_seed)
    starts = [np.zeros(dim)]
    lo, hi = cfg.start_box
    starts.extend(rng.uniform(lo, hi, size=(cfg.starts, dim)))
    candidates = [
        u
        for u0 in starts
        if (u := _newton(F, u0, cfg.tol, cfg.newton_max_iter)) is not None
    ]
    candidates.sort(key=lambda v: tuple(v))
    found: list[np.ndarray] = []
    for u in candidates:
        for i, v in enumerate(found):
            gap = float(np.max(np.abs(u - v)))
            if gap < cfg.dedupe_eps or (
                gap <= cfg.flat_merge_radius
                and resid(0.5 * (u + v)) <= cfg.flat_merge_residual
            ):
                if resid(u) < resid(v):
                    found[i] = u
                break
        else:
            found.append(u)
    found.sort(key=lambda v: tuple(v))
    return found


def _classify(fields: np.ndarray) -> str:
    spread = float(np.max(fields) - np.min(fields))
    return "translation-invariant" if spread < TI_SPREAD else "weakly-periodic"


def solve_fixed_points(
    system: WeaklyPeriodicSystem, theta: Theta, cfg: SolverConfig = SolverConfig()
) -> SolutionSet:
    """All fixed points found by seeded multistart Newton, deduplicated.

    The zero vector is always a fixed point and is always included.  Each
    solution is classified by coordinate spread and annotated with the
    equality patterns it satisfies.
    """
    M = count_matrix(system)
    solutions = []
    for u in _multistart(M, theta, cfg):
        residual = float(np.max(np.abs(u - M @ edge_field(u, theta))))
        fields = tuple(float(v) for v in u)
        solutions.append(
            Solution(
                fields=fields,
                residual=residual,
                kind=_classify(u),
                invariant_sets=invariant_sets_containing(fields, system.states),
            )
        )
    return SolutionSet(theta=theta.value, states=system.states, solutions=tuple(solutions))


def translation_invariant_fields(k: int, theta: Theta, tol: float = 1e-14) -> list[float]:
    """All real roots of h = k f(h, theta), by sign-change scan and bisection.

    Always contains 0; for k theta > 1 a symmetric nonzero pair appears.
    """
    if k < 1:
        raise ValueError("k must be >= 1")

    def g(h: float) -> float:
        return k * math.atanh(theta.value * math.tanh(h)) - h

    hi = k * math.atanh(theta.value) + 1.0
    grid = np.linspace(1e-12, hi, 4001)
    values = [g(h) for h in grid]
    roots = [0.0]
    for i in range(len(grid) - 1):
        if values[i] == 0.0 and grid[i] > 1e-9:
            roots.append(float(grid[i]))
        if values[i] * values[i + 1] < 0:
            lo_h, hi_h = float(grid[i]), float(grid[i + 1])
            for _ in range(200):
                mid = 0.5 * (lo_h + hi_h)
                if hi_h - lo_h <= tol * max(1.0, mid):
                    break
                if g(lo_h) * g(mid) <= 0:
                    hi_h = mid
                else:
                    lo_h = mid
            root = 0.5 * (lo_h + hi_h)
            if root > 1e-9:
                roots.append(root)
    unique: dict[float, float] = {}
    for r in roots:
        if r > 0:
            unique.setdefault(round(r, 13), r)
    positive = [unique[key] for key in sorted(unique)]
    return [-r for r in reversed(positive)] + [0.0] + list(positive)


# === invariant equality patterns of the nine-state system ===


@dataclass(frozen=True)
class InvariantPattern:
    """A partition of the nine states whose equality pattern W preserves."""

    id: str
    blocks: tuple[tuple[int, ...], ...]
    requires_k2: bool


INVARIANT_PATTERNS: dict[str, InvariantPattern] = {
    p.id: p
    for p in (
        InvariantPattern("I0", ((0, 1, 2, 3, 4, 5, 6, 7, 8),), False),
        InvariantPattern("I1", ((0, 1, 3, 4), (2, 5), (6, 7), (8,)), False),
        InvariantPattern("I2", ((0,), (1, 2), (3, 6), (4, 5, 7, 8)), False),
        InvariantPattern("I3", ((0, 5, 7), (1, 2, 3, 4, 6, 8)), True),
        InvariantPattern("I4", ((0, 1, 3, 5, 7, 8), (2, 4, 6)), True),
        InvariantPattern("I5", ((0, 2, 4, 5, 6, 7), (1, 3, 8)), True),
    )
}


def invariant_sets_containing(
    fields: Sequence[float], states: tuple[StatePair, ...], eps: float = TI_SPREAD
) -> tuple[str, ...]:
    """Pattern ids whose blocks the field vector satisfies within eps."""
    if tuple(states) != NINE_STATES:
        return ()
    hits = []
    for pid, pattern in INVARIANT_PATTERNS.items():
        ok = True
        for block in pattern.blocks:
            vals = [fields[i] for i in block]
            if max(vals) - min(vals) >= eps:
                ok = False
                break
        if ok:
            hits.append(pid)
    return tuple(hits)


@dataclass(frozen=True)
class ReducedSystem:
    """Block-collapsed recursion: u_B = sum over blocks of m[B][B'] f(u_B')."""

    pattern_id: str
    k: int
    blocks: tuple[tuple[int, ...], ...]
    matrix: tuple[tuple[int, ...], ...]

    def expand(self, u: Sequence[float]) -> tuple[float, ...]:
        """Lift block values back to the nine coordinates."""
        out = [0.0] * 9
        for b, block in enumerate(self.blocks):
            for i in block:
                out[i] = float(u[b])
        return tuple(out)


def restrict(system: WeaklyPeriodicSystem, pattern_id: str) -> ReducedSystem:
    """Restrict the nine-state system to an equality pattern, with certificate.

    Under the pattern, each row's coefficients collapse to per-block sums.
    The pattern is invariant iff all states inside one block collapse to the
    same row; the comparison is exact integer arithmetic, and failure raises
    NotInvariantError.
    """
    if system.states != NINE_STATES or system.s != 1:
        raise ValueError("restriction patterns are defined for the nine-state system")
    pattern = INVARIANT_PATTERNS[pattern_id]
    blocks = pattern.blocks
    reduced: list[tuple[int, ...]] = []
    for block in blocks:
        rows = []
        for i in block:
            row = tuple(
                sum(system.counts[i][j] for j in other) for other in blocks
            )
            rows.append(row)
        for i, row in zip(block[1:], rows[1:]):
            if row != rows[0]:
                raise NotInvariantError(
                    f"{pattern_id} is not invariant for k={system.k}: state index "
                    f"{block[0]} reduces to {rows[0]} but {i} reduces to {row}"
                )
        reduced.append(rows[0])
    return ReducedSystem(
        pattern_id=pattern_id, k=system.k, blocks=blocks, matrix=tuple(reduced)
    )


def solve_reduced(
    reduced: ReducedSystem, theta: Theta, cfg: SolverConfig = SolverConfig()
) -> list[tuple[tuple[float, ...], float]]:
    """Multistart Newton on a block-collapsed system: (block values, residual)."""
    M = np.array(reduced.matrix, dtype=float)
    out = []
    for u in _multistart(M, theta, cfg):
        residual = float(np.max(np.abs(u - M @ edge_field(u, theta))))
        out.append((tuple(float(v) for v in u), residual))
    return out


# === exact solution on the four-block pattern (k = 2) ===


def moebius(z, a: float):
    """g(z) = (z + a)/(a z + 1); the edge map in z = exp(2h) coordinates."""
    return (z + a) / (a * z + 1.0)


def moebius_inverse(w, a: float):
    return (w - a) / (1.0 - a * w)


def quadratic_branch(a: float) -> tuple[float, tuple[float, ...]]:
    """Roots of a x^2 + (a-1) x + a = 0: (discriminant, positive roots).

    The discriminant 1 - 2a - 3a^2 is nonnegative exactly for a <= 1/3,
    i.e. theta >= 1/2; the two roots multiply to 1.
    """
    disc = 1.0 - 2.0 * a - 3.0 * a * a
    if disc <= 0.0:
        return disc, ()
    root = math.sqrt(disc)
    x1 = (1.0 - a + root) / (2.0 * a)
    x2 = (1.0 - a - root) / (2.0 * a)
    return disc, (x1, x2)


def quartic_coefficients(a: float) -> tuple[float, float, float, float, float]:
    """Coefficients (x^4 .. x^0) of the quartic cofactor; all positive on (0,1)."""
    c4 = a**3 + a**2 - a + 1.0
    c3 = a - a**3
    c2 = 3.0 * a**3 - a**2 + a + 1.0
    return (c4, c3, c2, c3, c4)


BOUNDARY_DISC_EPS = 1e-12


@dataclass(frozen=True)
class ExactBranchResult:
    """Outcome of the exact polynomial path on the four-block pattern."""

    theta: float
    a: float
    discriminant: float
    roots: tuple[float, ...]
    boundary_degenerate: bool
    solution_set: SolutionSet


def solve_i1_exact(
    theta: Theta,
    system: WeaklyPeriodicSystem | None = None,
    residual_tol: float = 1e-10,
) -> ExactBranchResult:
    """Solve the four-block restriction of the k = 2 nine-state system exactly.

    In z = exp(2h) coordinates the restricted equations collapse to one
    polynomial in x = sqrt(z of the third coordinate).  The factor x = 1
    reconstructs the zero solution.  The quadratic factor contributes two
    reciprocal positive roots exactly when theta >= 1/2; each root is
    reconstructed through the Moebius edge map and verified against the full
    nine-state system.  The quartic cofactor never has positive roots.  At
    theta = 1/2 the quadratic degenerates to the double root x = 1 and is
    reported as boundary-degenerate with no extra branch.
    """
    if system is None:
        system = derive_system(SubgroupSpec(k=2, s=1, a1={1}, a2={2}))
    if system.k != 2 or system.states != NINE_STATES:
        raise ValueError("the exact path applies to the nine-state system at k = 2")
    restrict(system, "I1")  # certificate that the pattern is invariant
    a = theta.a
    disc, roots = quadratic_branch(a)
    boundary = abs(disc) <= BOUNDARY_DISC_EPS
    M = count_matrix(system)
    vectors: list[tuple[float, ...]] = [tuple([0.0] * 9)]  # the x = 1 branch
    kept_roots: list[float] = []
    if not boundary:
        for x in roots:
            vec = _reconstruct_from_root(x, a)
            residual = float(np.max(np.abs(np.array(vec) - M @ edge_field(np.array(vec), theta))))
            if residual > residual_tol:
                raise ArithmeticError(
                    f"reconstructed branch for x={x} misses the full system "
                    f"(residual {residual:.3e})"
                )
            vectors.append(vec)
            kept_roots.append(x)
    solutions = []
    for vec in sorted(vectors):
        arr = np.array(vec)
        residual = float(np.max(np.abs(arr - M @ edge_field(arr, theta))))
        solutions.append(
            Solution(
                fields=vec,
                residual=residual,
                kind=_classify(arr),
                invariant_sets=invariant_sets_containing(vec, NINE_STATES),
            )
        )
    return ExactBranchResult(
        theta=theta.value,
        a=a,
        discriminant=disc,
        roots=tuple(kept_roots),
        boundary_degenerate=boundary,
        solution_set=SolutionSet(
            theta=theta.value, states=NINE_STATES, solutions=tuple(solutions)
        ),
    )


def _reconstruct_from_root(x: float, a: float) -> tuple[float, ...]:
    """Lift a positive root x back to the nine-coordinate field vector."""
    if x <= 0.0:
        raise ArithmeticError(f"root {x} is not positive")
    z3 = x * x
    z1 = moebius_inverse(x, a)
    if z1 <= 0.0:
        raise ArithmeticError(f"z1 reconstruction left the positive cone for x={x}")
    z7 = moebius_inverse(z1 / x, a)
    if z7 <= 0.0:
        raise ArithmeticError(f"z7 reconstruction left the positive cone for x={x}")
    z9 = moebius(z3, a) ** 2
    h1 = 0.5 * math.log(z1)
    h3 = 0.5 * math.log(z3)
    h7 = 0.5 * math.log(z7)
    h9 = 0.5 * math.log(z9)
    # blocks {0,1,3,4}, {2,5}, {6,7}, {8}
    return (h1, h1, h3, h1, h1, h3, h7, h7, h9)


# === quartic positivity ===


@dataclass(frozen=True)
class QuarticReport:
    passed: bool
    x_max: float
    step: float
    min_values: dict[float, float]
    descartes_no_positive_roots: bool
    cell_bound_certified: bool


def check_quartic_positivity(
    a_values: Iterable[float], x_max: float = 50.0, step: float = 1e-3
) -> QuarticReport:
    """Certify the quartic cofactor is positive on (0, x_max] for each a.

    Three independent routes: minimum over the mesh, Descartes (every
    coefficient positive means no sign variation, so no positive root), and
    a per-cell derivative bound showing the mesh cannot hide a dip below 0.
    """
    xs = np.arange(0.0, x_max + step / 2, step)
    min_values: dict[float, float] = {}
    descartes = True
    certified = True
    passed = True
    for a in a_values:
        if not 0.0 < a < 1.0:
            raise ValueError(f"a must lie in (0, 1), got {a}")
        c4, c3, c2, c1, c0 = quartic_coefficients(a)
        q = (((c4 * xs + c3) * xs + c2) * xs + c1) * xs + c0
        min_values[a] = float(q[1:].min())
        if min_values[a] <= 0.0:
            passed = False
        if min(c4, c3, c2, c1, c0) <= 0.0:
            descartes = False
        # |Q'| on [x_i, x_{i+1}] is at most the absolute-coefficient
        # derivative evaluated at the right endpoint (all terms increasing).
        right = xs[1:]
        dbound = ((4 * c4 * right + 3 * c3) * right + 2 * c2) * right + c1
        if float((q[:-1] - dbound * step).min()) <= 0.0:
            certified = False
    return QuarticReport(
        passed=passed and descartes and certified,
        x_max=x_max,
        step=step,
        min_values=min_values,
        descartes_no_positive_roots=descartes,
        cell_bound_certified=certified,
    )


# === theta sweep ===


@dataclass(frozen=True)
class SweepRow:
    theta: float
    n_ti: int
    n_wp_i1: int
    n_wp_i2: int
    agreement: bool
    max_residual: float = 0.0  # not serialized to CSV


def theta_sweep(
    system: WeaklyPeriodicSystem,
    theta_values: Iterable[float],
    cfg: SolverConfig = SolverConfig(),
    match_tol: float = 1e-8,
) -> list[SweepRow]:
    """Count solution kinds per theta and cross-check the exact branch.

    n_wp_i1 / n_wp_i2 count solutions that are weakly periodic (not constant)
    and lie in the respective pattern.  Agreement means the exact-branch
    solutions and the Newton solutions match pairwise within match_tol; for
    systems without an exact path the Newton result stands alone and
    agreement is vacuously true.
    """
    rows = []
    has_exact = system.k == 2 and system.states == NINE_STATES
    for value in theta_values:
        theta = Theta(value)
        found = solve_fixed_points(system, theta, cfg)
        n_ti = len(found.translation_invariant())
        n_wp_i1 = sum(
            1 for s in found.weakly_periodic() if "I1" in s.invariant_sets
        )
        n_wp_i2 = sum(
            1 for s in found.weakly_periodic() if "I2" in s.invariant_sets
        )
        agreement = True
        if has_exact:
            exact = solve_i1_exact(theta, system).solution_set
            for sol in exact.solutions:
                if _nearest_distance(sol.fields, found.solutions) > match_tol:
                    agreement = False
            for sol in found.solutions:
                if "I1" in sol.invariant_sets:
                    if _nearest_distance(sol.fields, exact.solutions) > match_tol:
                        agreement = False
        rows.append(
            SweepRow(
                theta=value,
                n_ti=n_ti,
                n_wp_i1=n_wp_i1,
                n_wp_i2=n_wp_i2,
                agreement=agreement,
                max_residual=max((s.residual for s in found.solutions), default=0.0),
            )
        )
    return rows


def _nearest_distance(fields: tuple[float, ...], solutions: tuple[Solution, ...]) -> float:
    if not solutions:
        return math.inf
    target = np.array(fields)
    return min(float(np.max(np.abs(target - np.array(s.fields)))) for s in solutions)


def sweep_to_csv(rows: Iterable[SweepRow]) -> str:
    lines = ["theta,n_ti,n_wp_I1,n_wp_I2,agreement"]
    for row in rows:
        lines.append(
            f"{row.theta:.12g},{row.n_ti},{row.n_wp_i1},{row.n_wp_i2},"
            f"{'true' if row.agreement else 'false'}"
        )
    return "\n".join(lines) + "\n"


# === finite-volume measures and compatibility ===

MAX_CONFIG_BITS = 24


def _volume_distribution(
    k: int, n: int, theta: Theta, boundary: Mapping[Word, float]
) -> tuple[list[Word], np.ndarray]:
    """Probabilities of all spin configurations on the radius-n ball.

    Vertices are in ball enumeration order with the root as the most
    significant bit of the configuration index.  The boundary mapping must
    provide a field for every vertex of the outer sphere; fields elsewhere
    are zero.
    """
    ball = enumerate_ball(k, n)
    verts = list(ball.vertices())
    bits = len(verts)
    if bits > MAX_CONFIG_BITS:
        raise ValueError(f"{bits} spins exceed the {MAX_CONFIG_BITS}-bit config cap")
    outer = ball.spheres[-1]
    missing = [w for w in outer if w not in boundary]
    if missing:
        raise ValueError(f"boundary field missing for {len(missing)} outer vertices")
    index = {w: i for i, w in enumerate(verts)}
    codes = np.arange(1 << bits, dtype=np.int64)
    shifts = (bits - 1 - np.arange(bits)).astype(np.int64)
    spins = (((codes[:, None] >> shifts[None, :]) & 1) * 2 - 1).astype(np.int8)
    log_weight = np.zeros(len(codes))
    beta = theta.beta
    for w in verts[1:]:
        log_weight += beta * (spins[:, index[parent(w)]] * spins[:, index[w]])
    for w in outer:
        log_weight += boundary[w] * spins[:, index[w]]
    log_weight -= log_weight.max()
    weight = np.exp(log_weight)
    return verts, weight / weight.sum()


def finite_volume_probability(
    sigma: Mapping[Word, int],
    boundary: Mapping[Word, float],
    theta: Theta,
    n: int,
    k: int,
) -> float:
    """Probability of one spin configuration on the radius-n ball."""
    verts, probs = _volume_distribution(k, n, theta, boundary)
    code = 0
    for w in verts:
        if w not in sigma or sigma[w] not in (-1, 1):
            raise ValueError(f"configuration must assign +-1 to every vertex; bad at {w}")
        code = (code << 1) | (sigma[w] == 1)
    return float(probs[code])


@dataclass(frozen=True)
class CompatibilityReport:
    passed: bool
    n: int
    max_deviation: float
    configs_checked: int


def verify_compatibility(
    fields: Sequence[float],
    system: WeaklyPeriodicSystem,
    theta: Theta,
    n: int,
    tol: float = 1e-10,
) -> CompatibilityReport:
    """Check the finite-volume marginal identity between levels n and n-1.

    Summing the level-n measure over the outer sphere must reproduce the
    level-(n-1) measure exactly; boundary fields come from the state of
    each outer vertex under the system's subgroup spec.
    """
    if n not in (2, 3):
        raise ValueError("compatibility check supports n in {2, 3}")
    if system.spec is None:
        raise ValueError("system must carry its subgroup spec to place boundary fields")
    spec = system.spec
    values = {st: float(v) for st, v in zip(system.states, fields)}

    def boundary_for(m: int) -> dict[Word, float]:
        sphere = enumerate_ball(spec.k, m).spheres[-1]
        return {w: values[state_of(w, spec)] for w in sphere}

    _, dist_n = _volume_distribution(spec.k, n, theta, boundary_for(n))
    _, dist_prev = _volume_distribution(spec.k, n - 1, theta, boundary_for(n - 1))
    marginal = dist_n.reshape(len(dist_prev), -1).sum(axis=1)
    deviation = float(np.max(np.abs(marginal - dist_prev)))
    return CompatibilityReport(
        passed=deviation <= tol,
        n=n,
        max_deviation=deviation,
        configs_checked=int(dist_n.size),
    )
