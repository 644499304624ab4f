"""Generalized quantile solvers: the defining asymmetric-loss minimization.

The minimizer of

    pi(z) = alpha * E[u1((X - z)+)] + (1 - alpha) * E[u2((X - z)-)]

over a conditional distribution is found as the smallest z at which the
non-increasing map g(z) = E[v(X - z)] drops to (or below) zero, where v is
the score derived from the loss pair.  Predicate bisection on g converges
to the left endpoint of the (possibly flat) argmin interval, which is the
essential-infimum convention used throughout.

Brute-force grid oracles minimize pi directly and are kept independent of
the score route.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AlphaOutOfRange,
    BracketFailure,
    InstanceTooLarge,
    MaxIterExceeded,
    NotMeasurable,
    SpaceMismatch,
)
from .losses import LossFunction, ScoreFunction, score_from_losses
from .space import (
    Distribution,
    Partition,
    RandomVariable,
    conditional_distribution,
    is_measurable,
    same_space,
)


@dataclass(frozen=True, eq=False)
class RiskSpec:
    """Confidence level plus loss pair, with the derived score cached."""

    alpha: float
    u1: LossFunction
    u2: LossFunction
    score: ScoreFunction

    @property
    def family_tag(self) -> str:
        return f"alpha={self.alpha!r},u1={self.u1.family_tag},u2={self.u2.family_tag}"


def risk_spec(alpha: float, u1: LossFunction, u2: LossFunction) -> RiskSpec:
    if not 0.0 < alpha < 1.0:
        raise AlphaOutOfRange(f"alpha must lie in (0, 1), got {alpha}")
    return RiskSpec(alpha, u1, u2, score_from_losses(alpha, u1, u2))


@dataclass(frozen=True)
class SolveSettings:
    """Solver knobs.  tol_x is the guarantee on the reported minimizer;
    bisection actually runs down to float resolution when cheap."""

    tol_x: float = 1e-10
    tol_f: float = 1e-12
    max_iter: int = 200
    grid_step: float | None = None  # None -> 1e-4 * data range

    def __post_init__(self):
        if self.tol_x <= 0 or self.tol_f <= 0:
            raise ValueError("tolerances must be strictly positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.grid_step is not None and self.grid_step <= 0:
            raise ValueError("grid_step must be positive")

    def grid_step_for(self, lo: float, hi: float) -> float:
        if self.grid_step is not None:
            return self.grid_step
        span = hi - lo
        return 1e-4 * span if span > 0 else 1.0


DEFAULT_SETTINGS = SolveSettings()


# ---------------------------------------------------------------------------
# Pointwise objective
# ---------------------------------------------------------------------------

def phi_alpha(X: RandomVariable, Z: RandomVariable, spec: RiskSpec) -> RandomVariable:
    """Pointwise weighted loss alpha*u1((X-Z)+) + (1-alpha)*u2((X-Z)-)."""
    if not same_space(X.space, Z.space):
        raise SpaceMismatch("X and Z live on different spaces")
    d = X.values - Z.values
    vals = (spec.alpha * spec.u1(np.maximum(d, 0.0))
            + (1.0 - spec.alpha) * spec.u2(np.maximum(-d, 0.0)))
    return RandomVariable(X.space, vals)


def pi_alpha(X: RandomVariable, Z: RandomVariable, spec: RiskSpec) -> float:
    """Expected weighted loss E[phi(X, Z)]."""
    return phi_alpha(X, Z, spec).expectation()


# ---------------------------------------------------------------------------
# Static solver on a distribution
# ---------------------------------------------------------------------------

def _leftmost_crossing(g, lo: float, hi: float, settings: SolveSettings) -> float:
    """Smallest z in [lo, hi] with g(z) <= tol_f, for non-increasing g."""
    tol_f = settings.tol_f
    if g(lo) <= tol_f:
        return lo
    if g(hi) > tol_f:
        raise BracketFailure(
            "g(max support) > 0: the score is not an admissible member of V")
    it = 0
    while it < settings.max_iter:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # float resolution reached
            return hi
        if g(mid) <= tol_f:
            hi = mid
        else:
            lo = mid
        it += 1
    if hi - lo > settings.tol_x:
        raise MaxIterExceeded(f"no convergence within {settings.max_iter} bisections")
    return hi


def _solve_distribution(dist: Distribution, v: ScoreFunction,
                        settings: SolveSettings) -> float:
    if dist.is_point_mass:
        return float(dist.support[0])
    support, weights = dist.support, dist.weights

    def g(z: float) -> float:
        return float(np.dot(weights, v(support - z)))

    z = _leftmost_crossing(g, float(support[0]), float(support[-1]), settings)
    # snap to a support value when one sits at the crossing; this keeps
    # quantile-type answers exactly support-valued
    near = support[np.abs(support - z) <= settings.tol_x]
    for s in near:
        if g(float(s)) <= settings.tol_f and s <= z + settings.tol_x:
            return float(s)
    return z


def static_generalized_quantile(dist: Distribution, spec: RiskSpec,
                                settings: SolveSettings = DEFAULT_SETTINGS) -> float:
    """Leftmost minimizer of pi over the support range of the distribution."""
    return _solve_distribution(dist, spec.score, settings)


def conditional_generalized_quantile(X: RandomVariable, G: Partition,
                                     spec: RiskSpec,
                                     settings: SolveSettings = DEFAULT_SETTINGS,
                                     ) -> RandomVariable:
    """Per-atom static solve on the conditional distribution, broadcast."""
    out = np.empty(X.space.n)
    for k, atom in enumerate(G.atoms):
        dist = conditional_distribution(X, G, k)
        out[list(atom)] = static_generalized_quantile(dist, spec, settings)
    return RandomVariable(X.space, out)


# ---------------------------------------------------------------------------
# First-order condition
# ---------------------------------------------------------------------------

def foc_check(X: RandomVariable, Z: RandomVariable, G: Partition,
              spec: RiskSpec, tol: float = 1e-8) -> bool:
    """Both conditional first-order inequalities on every atom, within tol.

        alpha * E[u1'_-((X-Z)+) | atom] <= (1-alpha) * E[u2'_+((X-Z)-) | atom]
        alpha * E[u1'_+((X-Z)+) | atom] >= (1-alpha) * E[u2'_-((X-Z)-) | atom]
    """
    if not is_measurable(Z, G):
        raise NotMeasurable("Z must be measurable w.r.t. G")
    a = spec.alpha
    for k, atom in enumerate(G.atoms):
        idx = list(atom)
        w = X.space.probs[idx]
        w = w / w.sum()
        d = X.values[idx] - Z.values[idx]
        plus = np.maximum(d, 0.0)
        minus = np.maximum(-d, 0.0)
        lhs1 = a * float(np.dot(w, spec.u1.left_deriv(plus)))
        rhs1 = (1.0 - a) * float(np.dot(w, spec.u2.right_deriv(minus)))
        if lhs1 > rhs1 + tol:
            return False
        lhs2 = a * float(np.dot(w, spec.u1.right_deriv(plus)))
        rhs2 = (1.0 - a) * float(np.dot(w, spec.u2.left_deriv(minus)))
        if lhs2 < rhs2 - tol:
            return False
    return True


# ---------------------------------------------------------------------------
# Brute-force oracles (independent of the score route)
# ---------------------------------------------------------------------------

def _atom_objective(values, weights, zgrid, spec: RiskSpec):
    d = values[None, :] - zgrid[:, None]
    return (spec.alpha * spec.u1(np.maximum(d, 0.0))
            + (1.0 - spec.alpha) * spec.u2(np.maximum(-d, 0.0))) @ weights


def brute_force_quantile(X: RandomVariable, G: Partition, spec: RiskSpec,
                         grid_step: float | None = None,
                         tol_f: float = 1e-12) -> RandomVariable:
    """Per-atom exhaustive grid minimization of the conditional objective.

    Reports the leftmost grid point whose objective lies within tol_f of the
    grid minimum.
    """
    out = np.empty(X.space.n)
    for k, atom in enumerate(G.atoms):
        idx = list(atom)
        w = X.space.probs[idx]
        w = w / w.sum()
        vals = X.values[idx]
        lo, hi = float(vals.min()), float(vals.max())
        if lo == hi:
            out[idx] = lo
            continue
        step = grid_step if grid_step is not None else 1e-4 * (hi - lo)
        zgrid = np.arange(lo, hi + 0.5 * step, step)
        obj = _atom_objective(vals, w, zgrid, spec)
        best = int(np.flatnonzero(obj <= obj.min() + tol_f)[0])
        out[idx] = zgrid[best]
    return RandomVariable(X.space, out)


def joint_brute_force(X: RandomVariable, G: Partition, spec: RiskSpec,
                      grid_points_per_atom: int = 21) -> RandomVariable:
    """Exhaustive search over the product grid of G-measurable Z.

    Verifies per-atom separability of the joint objective; deliberately does
    not exploit it.  Returns the lexicographically-leftmost minimizer (ties
    broken toward smaller values atom by atom).
    """
    if G.n_atoms > 3:
        raise InstanceTooLarge("joint brute force supports at most 3 atoms")
    if grid_points_per_atom > 50:
        raise InstanceTooLarge("at most 50 grid points per atom")
    atom_grids = []
    atom_data = []
    for k, atom in enumerate(G.atoms):
        idx = list(atom)
        vals = X.values[idx]
        lo, hi = float(vals.min()), float(vals.max())
        grid = (np.array([lo]) if lo == hi
                else np.linspace(lo, hi, grid_points_per_atom))
        atom_grids.append(grid)
        atom_data.append((idx, vals, X.space.probs[idx]))
    best_obj = np.inf
    best_combo = None
    for combo in itertools.product(*atom_grids):
        total = 0.0
        for (idx, vals, probs), z in zip(atom_data, combo):
            d = vals - z
            total += float(np.dot(
                probs,
                spec.alpha * spec.u1(np.maximum(d, 0.0))
                + (1.0 - spec.alpha) * spec.u2(np.maximum(-d, 0.0))))
        if total < best_obj - 1e-15:
            best_obj = total
            best_combo = combo
    out = np.empty(X.space.n)
    for (idx, _, _), z in zip(atom_data, best_combo):
        out[idx] = z
    return RandomVariable(X.space, out)
