"""Dynamic risk measures over filtrations and property/consistency checkers.

Axiom checkers run randomized suites and report either "holds-on-suite" or
"violated" together with a replayable witness.  Characterization results
("... if and only if entropic") can only be corroborated numerically: the
"if" direction as a must-hold suite, the "only if" direction by
counterexample search, so a clean non-entropic run is reported as
holds-on-suite, never as a proof.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import MissingSecondDerivative
from .quantile import (
    DEFAULT_SETTINGS,
    RiskSpec,
    SolveSettings,
    conditional_generalized_quantile,
)
from .shortfall import ShortfallSpec, conditional_entropic, conditional_shortfall
from .space import (
    Filtration,
    Partition,
    ProbabilitySpace,
    RandomVariable,
    filtration,
    make_space,
    partition_from_atoms,
    rv,
)

PROPERTY_TOL = 1e-8
WITNESS_THRESHOLD = 1e-4


# ---------------------------------------------------------------------------
# Randomized instance generation (seeded, reproducible)
# ---------------------------------------------------------------------------

def random_space(rng, n: int | None = None) -> ProbabilitySpace:
    if n is None:
        n = int(rng.integers(2, 9))
    w = rng.uniform(0.1, 1.0, n)
    return make_space(w / w.sum())


def random_rv(rng, space: ProbabilitySpace, lo: float = -5.0, hi: float = 5.0,
              ) -> RandomVariable:
    return rv(space, rng.uniform(lo, hi, space.n))


def random_partition(rng, space: ProbabilitySpace) -> Partition:
    n = space.n
    k = int(rng.integers(1, n + 1))
    order = rng.permutation(n)
    groups = [[int(order[i])] for i in range(k)]
    for i in range(k, n):
        groups[int(rng.integers(0, k))].append(int(order[i]))
    return partition_from_atoms(space, groups)


def random_filtration(rng, space: ProbabilitySpace, n_stages: int = 3,
                      ) -> Filtration:
    """Recursive random merging of singletons, reversed into a filtration."""
    atoms = [(i,) for i in range(space.n)]
    chain = [list(atoms)]
    while len(atoms) > 1:
        i, j = sorted(rng.choice(len(atoms), size=2, replace=False))
        merged = tuple(sorted(atoms[i] + atoms[j]))
        atoms = [a for t, a in enumerate(atoms) if t not in (i, j)] + [merged]
        chain.append(list(atoms))
    chain.reverse()  # trivial first, singletons last
    n_stages = max(2, min(n_stages, len(chain)))
    if len(chain) == n_stages:
        picks = list(range(len(chain)))
    else:
        middle = sorted(rng.choice(range(1, len(chain) - 1),
                                   size=n_stages - 2, replace=False))
        picks = [0] + [int(m) for m in middle] + [len(chain) - 1]
    return filtration(partition_from_atoms(space, chain[p]) for p in picks)


# ---------------------------------------------------------------------------
# Dynamic risk measures
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DynamicRiskMeasure:
    """A per-stage conditional risk map applied along a filtration."""

    filtration: Filtration
    evaluator: callable  # (RandomVariable, Partition) -> RandomVariable
    label: str


def dynamic_quantile(filt: Filtration, spec: RiskSpec,
                     settings: SolveSettings = DEFAULT_SETTINGS,
                     ) -> DynamicRiskMeasure:
    return DynamicRiskMeasure(
        filt,
        lambda X, G: conditional_generalized_quantile(X, G, spec, settings),
        f"quantile({spec.family_tag})")


def dynamic_shortfall(filt: Filtration, spec: ShortfallSpec,
                      settings: SolveSettings = DEFAULT_SETTINGS,
                      ) -> DynamicRiskMeasure:
    return DynamicRiskMeasure(
        filt,
        lambda X, G: conditional_shortfall(X, G, spec, settings),
        f"shortfall({spec.v.family_tag})")


def dynamic_entropic(filt: Filtration, gamma: float) -> DynamicRiskMeasure:
    return DynamicRiskMeasure(
        filt,
        lambda X, G: conditional_entropic(X, G, gamma),
        f"entropic(gamma={gamma!r})")


def dynamic_eval(X: RandomVariable, drm: DynamicRiskMeasure) -> list:
    """One risk value per stage of the filtration."""
    return [drm.evaluator(X, G) for G in drm.filtration.stages]


# ---------------------------------------------------------------------------
# Property reports
# ---------------------------------------------------------------------------

@dataclass
class PropertyReport:
    property_name: str
    verdict: str  # "holds-on-suite" | "violated"
    max_violation: float
    witness: dict | None = None
    note: str = ""

    @property
    def holds(self) -> bool:
        return self.verdict == "holds-on-suite"


def _finish(name: str, worst: float, witness: dict | None, tol: float,
            note: str = "") -> PropertyReport:
    if worst > tol:
        return PropertyReport(name, "violated", worst, witness, note)
    return PropertyReport(name, "holds-on-suite", worst, None, note)


def _instance_payload(space, G, X, **extra) -> dict:
    payload = {
        "probs": [float(p) for p in space.probs],
        "atoms": [list(a) for a in G.atoms],
        "X": [float(x) for x in X.values],
    }
    payload.update(extra)
    return payload


# ---------------------------------------------------------------------------
# Axiom checkers (randomized suites)
# ---------------------------------------------------------------------------

def check_monotone_alpha(spec_lo: RiskSpec, spec_hi: RiskSpec, *,
                         trials: int = 500, seed: int = 0,
                         tol: float = PROPERTY_TOL,
                         settings: SolveSettings = DEFAULT_SETTINGS,
                         ) -> PropertyReport:
    """rho_{alpha1} <= rho_{alpha2} for alpha1 <= alpha2 and shared losses."""
    if spec_lo.alpha > spec_hi.alpha:
        raise ValueError("expected spec_lo.alpha <= spec_hi.alpha")
    rng = np.random.default_rng(seed)
    worst, witness = -np.inf, None
    for _ in range(trials):
        space = random_space(rng)
        G = random_partition(rng, space)
        X = random_rv(rng, space)
        lo = conditional_generalized_quantile(X, G, spec_lo, settings)
        hi = conditional_generalized_quantile(X, G, spec_hi, settings)
        viol = float(np.max(lo.values - hi.values))
        if viol > worst:
            worst, witness = viol, _instance_payload(space, G, X, magnitude=viol)
    return _finish("monotone_alpha", worst, witness, tol)


def check_monotonicity(spec: RiskSpec, *, trials: int = 500, seed: int = 0,
                       tol: float = PROPERTY_TOL,
                       settings: SolveSettings = DEFAULT_SETTINGS,
                       ) -> PropertyReport:
    """X <= Y implies rho(X) <= rho(Y)."""
    rng = np.random.default_rng(seed)
    worst, witness = -np.inf, None
    for _ in range(trials):
        space = random_space(rng)
        G = random_partition(rng, space)
        X = random_rv(rng, space)
        Y = X + rv(space, rng.uniform(0.0, 3.0, space.n))
        rx = conditional_generalized_quantile(X, G, spec, settings)
        ry = conditional_generalized_quantile(Y, G, spec, settings)
        viol = float(np.max(rx.values - ry.values))
        if viol > worst:
            worst, witness = viol, _instance_payload(
                space, G, X, Y=[float(y) for y in Y.values], magnitude=viol)
    return _finish("monotonicity", worst, witness, tol)


def check_translation_invariance(spec: RiskSpec, *, trials: int = 500,
                                 seed: int = 0, tol: float = PROPERTY_TOL,
                                 settings: SolveSettings = DEFAULT_SETTINGS,
                                 ) -> PropertyReport:
    """rho(X + H) = rho(X) + H for G-measurable H."""
    rng = np.random.default_rng(seed)
    worst, witness = -np.inf, None
    for _ in range(trials):
        space = random_space(rng)
        G = random_partition(rng, space)
        X = random_rv(rng, space)
        h = rng.uniform(-3.0, 3.0, G.n_atoms)
        H = rv(space, h[G.atom_of])
        shifted = conditional_generalized_quantile(X + H, G, spec, settings)
        base = conditional_generalized_quantile(X, G, spec, settings)
        viol = float(np.max(np.abs(shifted.values - base.values - H.values)))
        if viol > worst:
            worst, witness = viol, _instance_payload(
                space, G, X, H=[float(x) for x in H.values], magnitude=viol)
    return _finish("translation_invariance", worst, witness, tol)


def check_normalization(spec: RiskSpec, *, trials: int = 100, seed: int = 0,
                        tol: float = PROPERTY_TOL,
                        settings: SolveSettings = DEFAULT_SETTINGS,
                        ) -> PropertyReport:
    """rho(0) = 0 on random partitions."""
    rng = np.random.default_rng(seed)
    worst, witness = -np.inf, None
    for _ in range(trials):
        space = random_space(rng)
        G = random_partition(rng, space)
        zero = rv(space, np.zeros(space.n))
        val = conditional_generalized_quantile(zero, G, spec, settings)
        viol = float(np.max(np.abs(val.values)))
        if viol > worst:
            worst, witness = viol, _instance_payload(space, G, zero, magnitude=viol)
    return _finish("normalization", worst, witness, tol)


def check_conditional_convexity(spec: RiskSpec, *, trials: int = 500,
                                seed: int = 0, tol: float = PROPERTY_TOL,
                                settings: SolveSettings = DEFAULT_SETTINGS,
                                stop_early: float | None = None,
                                ) -> PropertyReport:
    """rho(Lam*X + (1-Lam)*Y) <= Lam*rho(X) + (1-Lam)*rho(Y)."""
    rng = np.random.default_rng(seed)
    worst, witness = -np.inf, None
    for _ in range(trials):
        space = random_space(rng)
        G = random_partition(rng, space)
        X = random_rv(rng, space)
        Y = random_rv(rng, space)
        lam = rng.uniform(0.0, 1.0, G.n_atoms)
        L = rv(space, lam[G.atom_of])
        mix = L * X + (1.0 - L) * Y
        r_mix = conditional_generalized_quantile(mix, G, spec, settings)
        rx = conditional_generalized_quantile(X, G, spec, settings)
        ry = conditional_generalized_quantile(Y, G, spec, settings)
        bound = L.values * rx.values + (1.0 - L.values) * ry.values
        viol = float(np.max(r_mix.values - bound))
        if viol > worst:
            worst, witness = viol, _instance_payload(
                space, G, X, Y=[float(y) for y in Y.values],
                lam=[float(v) for v in lam], magnitude=viol)
        if stop_early is not None and worst > stop_early:
            break
    return _finish("conditional_convexity", worst, witness, tol)


def check_positive_homogeneity(spec: RiskSpec, *, trials: int = 500,
                               seed: int = 0, tol: float = PROPERTY_TOL,
                               settings: SolveSettings = DEFAULT_SETTINGS,
                               stop_early: float | None = None,
                               ) -> PropertyReport:
    """rho(Lam*X) = Lam*rho(X) for G-measurable Lam >= 0."""
    rng = np.random.default_rng(seed)
    worst, witness = -np.inf, None
    for _ in range(trials):
        space = random_space(rng)
        G = random_partition(rng, space)
        X = random_rv(rng, space)
        lam = rng.uniform(0.0, 3.0, G.n_atoms)
        L = rv(space, lam[G.atom_of])
        scaled = conditional_generalized_quantile(L * X, G, spec, settings)
        base = conditional_generalized_quantile(X, G, spec, settings)
        viol = float(np.max(np.abs(scaled.values - L.values * base.values)))
        if viol > worst:
            worst, witness = viol, _instance_payload(
                space, G, X, lam=[float(v) for v in lam], magnitude=viol)
        if stop_early is not None and worst > stop_early:
            break
    return _finish("positive_homogeneity", worst, witness, tol)


def convexity_condition(spec: RiskSpec, grid_max: float = 5.0) -> bool:
    """Sufficient condition for conditional convexity.

    Requires the theorem's smoothness hypothesis u1'(0) = u2'(0) = 0, the
    shape conditions (u1' convex, u2' concave, falsified on a grid) and
    alpha * u1''(0) >= (1 - alpha) * u2''(0).
    """
    u1, u2 = spec.u1, spec.u2
    if u1.second_deriv_at_zero is None or u2.second_deriv_at_zero is None:
        raise MissingSecondDerivative(
            "convexity condition needs second_deriv_at_zero on both losses")
    zero = np.asarray([0.0])
    if float(u1.right_deriv(zero)[0]) > 1e-12 or float(u2.right_deriv(zero)[0]) > 1e-12:
        return False
    grid = np.linspace(grid_max / 200.0, grid_max, 201)
    mid = 0.5 * (grid[:-1] + grid[1:])
    d1, d2 = u1.left_deriv(grid), u2.left_deriv(grid)
    if np.any(u1.left_deriv(mid) > 0.5 * (d1[:-1] + d1[1:]) + 1e-9):
        return False
    if np.any(u2.left_deriv(mid) < 0.5 * (d2[:-1] + d2[1:]) - 1e-9):
        return False
    lhs = spec.alpha * u1.second_deriv_at_zero
    rhs = (1.0 - spec.alpha) * u2.second_deriv_at_zero
    if np.isinf(lhs):
        return True
    if np.isinf(rhs):
        return False
    return lhs >= rhs - 1e-12


# ---------------------------------------------------------------------------
# Time consistency
# ---------------------------------------------------------------------------

def check_sequential_consistency(drm: DynamicRiskMeasure, *, trials: int = 500,
                                 seed: int = 0, tol: float = PROPERTY_TOL,
                                 pairwise: bool = False) -> PropertyReport:
    """Sign conclusions made at a later stage persist at earlier stages.

    If rho_t(X) <= 0 in every state then rho_s(X) <= 0 for s < t, and
    symmetrically for >= 0.  Each trial shifts X by the extreme of the
    later-stage evaluation so the anchor hypothesis holds with equality
    somewhere (valid by translation invariance); the violation is how far
    the earlier stage sticks out on the wrong side.  The theory anchors
    conclusions at stage 0; pairwise=True also checks every earlier stage.
    """
    rng = np.random.default_rng(seed)
    worst, witness = -np.inf, None
    stages = drm.filtration.stages
    for _ in range(trials):
        X = random_rv(rng, drm.filtration.space)
        evals = dynamic_eval(X, drm)
        for t in range(1, len(stages)):
            later = evals[t].values
            earlier = range(t) if pairwise else [0]
            for s in earlier:
                base = evals[s].values
                # rho_t(X - max rho_t) <= 0 everywhere, so rho_s of the
                # shifted variable must be <= 0 too; same with the min.
                viol = max(float(np.max(base)) - float(np.max(later)),
                           float(np.min(later)) - float(np.min(base)))
                if viol > worst:
                    worst = viol
                    witness = _instance_payload(
                        drm.filtration.space, stages[t], X,
                        anchor_stage=t, stage=s, magnitude=viol)
    return _finish("sequential_consistency", worst, witness, tol)


def check_tower_property(drm: DynamicRiskMeasure, t: int, *, trials: int = 500,
                         seed: int = 0, tol: float = PROPERTY_TOL,
                         stop_early: float | None = None,
                         ) -> PropertyReport:
    """rho_0(rho_t(X)) = rho_0(X); characterizes the entropic family."""
    if not 0 < t < drm.filtration.n_stages:
        raise ValueError("need an intermediate stage 0 < t < T")
    rng = np.random.default_rng(seed)
    stages = drm.filtration.stages
    worst, witness = -np.inf, None
    for _ in range(trials):
        X = random_rv(rng, drm.filtration.space)
        inner = drm.evaluator(X, stages[t])
        composed = drm.evaluator(inner, stages[0])
        direct = drm.evaluator(X, stages[0])
        viol = float(np.max(np.abs(composed.values - direct.values)))
        if viol > worst:
            worst = viol
            witness = _instance_payload(drm.filtration.space, stages[t], X,
                                        stage=t, magnitude=viol)
        if stop_early is not None and worst > stop_early:
            break
    note = ("no witness found within the search budget; this does not prove "
            "the property" if worst <= tol else "")
    return _finish("tower_property", worst, witness, tol, note)


def check_supermartingale(drm: DynamicRiskMeasure, t: int, *, trials: int = 500,
                          seed: int = 0, tol: float = PROPERTY_TOL,
                          stop_early: float | None = None,
                          ) -> PropertyReport:
    """rho_0(X) >= E[rho_t(X)]; characterizes entropic with gamma >= 0."""
    if not 0 < t < drm.filtration.n_stages:
        raise ValueError("need a stage 0 < t <= T")
    rng = np.random.default_rng(seed)
    stages = drm.filtration.stages
    worst, witness = -np.inf, None
    for _ in range(trials):
        X = random_rv(rng, drm.filtration.space)
        later = drm.evaluator(X, stages[t])
        base = drm.evaluator(X, stages[0])
        viol = later.expectation() - float(base.values[0])
        if viol > worst:
            worst = viol
            witness = _instance_payload(drm.filtration.space, stages[t], X,
                                        stage=t, magnitude=viol)
        if stop_early is not None and worst > stop_early:
            break
    note = ("no witness found within the search budget; this does not prove "
            "the property" if worst <= tol else "")
    return _finish("supermartingale", worst, witness, tol, note)


def check_continuity_from_below(spec: RiskSpec, *, sequences: int = 50,
                                seed: int = 0, tol: float = 1e-6,
                                settings: SolveSettings = DEFAULT_SETTINGS,
                                ) -> PropertyReport:
    """X_n increasing to X gives rho(X_n) increasing to rho(X).

    Approximations are X - D/n^2 with a random nonnegative D, checked for
    monotonicity along n and closeness at n = 10^4.
    """
    rng = np.random.default_rng(seed)
    ns = [1, 2, 4, 10, 100, 1000, 10_000]
    worst, witness = -np.inf, None
    for _ in range(sequences):
        space = random_space(rng)
        G = random_partition(rng, space)
        X = random_rv(rng, space)
        D = rv(space, rng.uniform(0.0, 5.0, space.n))
        limit = conditional_generalized_quantile(X, G, spec, settings)
        prev = None
        viol = -np.inf
        for n in ns:
            cur = conditional_generalized_quantile(X - D * (1.0 / n ** 2), G,
                                                   spec, settings)
            if prev is not None:
                viol = max(viol, float(np.max(prev - cur.values)))
            prev = cur.values
        viol = max(viol, float(np.max(np.abs(prev - limit.values))))
        if viol > worst:
            worst = viol
            witness = _instance_payload(space, G, X,
                                        D=[float(d) for d in D.values],
                                        magnitude=viol)
    return _finish("continuity_from_below", worst, witness, tol)
