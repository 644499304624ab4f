"""Conditional shortfall risk measures and the named special cases.

The shortfall measure of a score v is the smallest G-measurable Z with
E[v(X - Z) | G] <= 0, computed per atom by the same predicate bisection as
the quantile solver but driven directly by v.  The quantile <-> shortfall
equivalence is exercised by ``equivalence_check``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AlphaOutOfRange
from .losses import ScoreFunction, validate_score
from .quantile import (
    DEFAULT_SETTINGS,
    RiskSpec,
    SolveSettings,
    _solve_distribution,
    conditional_generalized_quantile,
)
from .space import (
    Partition,
    RandomVariable,
    conditional_distribution,
    conditional_expectation,
    ess_sup_conditional,
)

ENTROPIC_INF = float("inf")  # sentinel for the esssup limit


@dataclass(frozen=True, eq=False)
class ShortfallSpec:
    v: ScoreFunction


def shortfall_spec(v: ScoreFunction, check: bool = True) -> ShortfallSpec:
    if check:
        grid = np.linspace(-10.0, 10.0, 201)
        report = validate_score(v, grid)
        if not report.passed:
            raise ValueError(f"score fails membership: {report.violations}")
    return ShortfallSpec(v)


def conditional_shortfall(X: RandomVariable, G: Partition, spec: ShortfallSpec,
                          settings: SolveSettings = DEFAULT_SETTINGS,
                          ) -> RandomVariable:
    """Per atom, the smallest z with E[v(X - z) | atom] <= tol_f."""
    out = np.empty(X.space.n)
    for k, atom in enumerate(G.atoms):
        dist = conditional_distribution(X, G, k)
        out[list(atom)] = _solve_distribution(dist, spec.v, settings)
    return RandomVariable(X.space, out)


@dataclass
class EquivalenceReport:
    max_discrepancy: float
    passed: bool
    quantile_values: np.ndarray
    shortfall_values: np.ndarray


def equivalence_check(X: RandomVariable, G: Partition, qspec: RiskSpec,
                      settings: SolveSettings = DEFAULT_SETTINGS,
                      ) -> EquivalenceReport:
    """Compare the quantile solver with the shortfall solver on the derived score."""
    rho_q = conditional_generalized_quantile(X, G, qspec, settings)
    rho_v = conditional_shortfall(X, G, ShortfallSpec(qspec.score), settings)
    disc = float(np.max(np.abs(rho_q.values - rho_v.values)))
    return EquivalenceReport(disc, disc <= 2.0 * settings.tol_x,
                             rho_q.values, rho_v.values)


# ---------------------------------------------------------------------------
# Named special cases
# ---------------------------------------------------------------------------

def conditional_var(X: RandomVariable, G: Partition, alpha: float) -> RandomVariable:
    """Left alpha-quantile per atom: smallest support z with P(X <= z | atom) >= alpha.

    This is the form the shortfall condition E[alpha - 1{X <= z} | G] <= 0
    yields; it coincides with the shortfall solve under the step score.
    """
    if not 0.0 < alpha < 1.0:
        raise AlphaOutOfRange(f"alpha must lie in (0, 1), got {alpha}")
    out = np.empty(X.space.n)
    for k, atom in enumerate(G.atoms):
        dist = conditional_distribution(X, G, k)
        cum = np.cumsum(dist.weights)
        pos = int(np.searchsorted(cum, alpha - 1e-12))
        out[list(atom)] = dist.support[min(pos, dist.support.size - 1)]
    return RandomVariable(X.space, out)


def conditional_expectile(X: RandomVariable, G: Partition, alpha: float,
                          settings: SolveSettings = DEFAULT_SETTINGS,
                          ) -> RandomVariable:
    """Unique root of alpha*E[(X-z)+ | atom] = (1-alpha)*E[(z-X)+ | atom]."""
    if not 0.0 < alpha < 1.0:
        raise AlphaOutOfRange(f"alpha must lie in (0, 1), got {alpha}")
    from scipy.optimize import brentq

    out = np.empty(X.space.n)
    for k, atom in enumerate(G.atoms):
        dist = conditional_distribution(X, G, k)
        if dist.is_point_mass:
            out[list(atom)] = dist.support[0]
            continue
        s, w = dist.support, dist.weights

        def h(z):
            d = s - z
            return (alpha * np.dot(w, np.maximum(d, 0.0))
                    - (1.0 - alpha) * np.dot(w, np.maximum(-d, 0.0)))

        lo, hi = float(s[0]), float(s[-1])
        out[list(atom)] = brentq(h, lo, hi, xtol=1e-14, rtol=8.9e-16,
                                 maxiter=settings.max_iter)
    return RandomVariable(X.space, out)


def conditional_entropic(X: RandomVariable, G: Partition, gamma: float,
                         ) -> RandomVariable:
    """Closed form (1/gamma) log E[exp(gamma X) | G], with stable limits.

    gamma = 0 gives the conditional mean, the +inf sentinel the per-atom
    maximum.  The exponential is max-shifted per atom so large gamma * range
    cannot overflow.
    """
    if gamma == 0.0:
        return conditional_expectation(X, G)
    if gamma == ENTROPIC_INF:
        return ess_sup_conditional(X, G)
    out = np.empty(X.space.n)
    for k, atom in enumerate(G.atoms):
        idx = list(atom)
        w = X.space.probs[idx]
        w = w / w.sum()
        vals = X.values[idx]
        m = float(vals.max()) if gamma > 0 else float(vals.min())
        out[idx] = m + np.log(np.dot(w, np.exp(gamma * (vals - m)))) / gamma
    return RandomVariable(X.space, out)
