"""Suite orchestration for the verification command.

Each suite produces SuiteResult rows.  A row is either a must-hold check
(fails hard when violated) or an expect-witness search (fails soft when the
search budget runs out without a counterexample).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dynamic as dyn
from .dynamic import PropertyReport
from .errors import MissingSecondDerivative
from .quantile import (
    DEFAULT_SETTINGS,
    RiskSpec,
    SolveSettings,
    brute_force_quantile,
    conditional_generalized_quantile,
    foc_check,
)
from .shortfall import equivalence_check
from .space import partition_from_atoms

MUST_HOLD = "must-hold"
EXPECT_WITNESS = "expect-witness"


@dataclass
class SuiteResult:
    suite: str
    check: str
    spec_name: str
    requirement: str
    report: PropertyReport
    fingerprint: str

    @property
    def passed(self) -> bool:
        if self.requirement == MUST_HOLD:
            return self.report.holds
        return not self.report.holds  # a found witness is the expected outcome

    @property
    def hard_failure(self) -> bool:
        return self.requirement == MUST_HOLD and not self.passed

    @property
    def soft_failure(self) -> bool:
        return self.requirement == EXPECT_WITNESS and not self.passed


@dataclass
class SpecEntry:
    """A named spec with the flags the suites need for classification."""

    name: str
    spec: RiskSpec
    entropic_gamma: float | None = None  # set when the measure is entropic

    @property
    def is_entropic(self) -> bool:
        return self.entropic_gamma is not None

    @property
    def is_power_pair(self) -> bool:
        tags = {"identity": 1.0, "quadratic": 2.0}
        betas = []
        for u in (self.spec.u1, self.spec.u2):
            if u.family_tag in tags:
                betas.append(tags[u.family_tag])
            elif u.family_tag == "power":
                betas.append(u.params["beta"])
            else:
                return False
        return betas[0] == betas[1]

    def fingerprint(self, settings: SolveSettings) -> str:
        return (f"{self.spec.family_tag};tol_x={settings.tol_x!r};"
                f"tol_f={settings.tol_f!r}")


def _three_point_filtration(space):
    return dyn.filtration([
        partition_from_atoms(space, [range(space.n)]),
        partition_from_atoms(space, [range(space.n - 1), [space.n - 1]]),
        partition_from_atoms(space, [[i] for i in range(space.n)]),
    ])


def run_axioms(entries, *, seed: int = 0, budget: int = 500,
               settings: SolveSettings = DEFAULT_SETTINGS) -> list:
    results = []
    for i, e in enumerate(entries):
        fp = e.fingerprint(settings)
        base_seed = seed + 1000 * i
        alpha = e.spec.alpha
        from .quantile import risk_spec
        lo = risk_spec(0.5 * alpha, e.spec.u1, e.spec.u2)
        checks = [
            ("monotone_alpha", MUST_HOLD,
             dyn.check_monotone_alpha(lo, e.spec, trials=budget,
                                      seed=base_seed, settings=settings)),
            ("monotonicity", MUST_HOLD,
             dyn.check_monotonicity(e.spec, trials=budget, seed=base_seed + 1,
                                    settings=settings)),
            ("translation_invariance", MUST_HOLD,
             dyn.check_translation_invariance(e.spec, trials=budget,
                                              seed=base_seed + 2,
                                              settings=settings)),
            ("normalization", MUST_HOLD,
             dyn.check_normalization(e.spec, trials=min(budget, 100),
                                     seed=base_seed + 3, settings=settings)),
        ]
        hom_req = MUST_HOLD if e.is_power_pair else EXPECT_WITNESS
        hom_stop = None if e.is_power_pair else dyn.WITNESS_THRESHOLD
        checks.append(("positive_homogeneity", hom_req,
                       dyn.check_positive_homogeneity(
                           e.spec, trials=budget, seed=base_seed + 4,
                           settings=settings, stop_early=hom_stop)))
        try:
            convex = dyn.convexity_condition(e.spec)
        except MissingSecondDerivative:
            convex = False
        cx_req = MUST_HOLD if convex else EXPECT_WITNESS
        checks.append(("conditional_convexity", cx_req,
                       dyn.check_conditional_convexity(
                           e.spec, trials=budget if convex else 2 * budget,
                           seed=base_seed + 5, settings=settings,
                           stop_early=None if convex else dyn.WITNESS_THRESHOLD)))
        for check, req, rep in checks:
            results.append(SuiteResult("axioms", check, e.name, req, rep, fp))
    return results


def run_equivalence(entries, *, seed: int = 0, budget: int = 500,
                    settings: SolveSettings = DEFAULT_SETTINGS) -> list:
    results = []
    for i, e in enumerate(entries):
        rng = np.random.default_rng(seed + 1000 * i)
        worst, witness = -np.inf, None
        for _ in range(budget):
            space = dyn.random_space(rng)
            G = dyn.random_partition(rng, space)
            X = dyn.random_rv(rng, space)
            rep = equivalence_check(X, G, e.spec, settings)
            if rep.max_discrepancy > worst:
                worst = rep.max_discrepancy
                witness = dyn._instance_payload(space, G, X, magnitude=worst)
        report = dyn._finish("quantile_shortfall_equivalence", worst, witness,
                             2.0 * settings.tol_x)
        results.append(SuiteResult("equivalence", "quantile_shortfall_equivalence",
                                   e.name, MUST_HOLD, report,
                                   e.fingerprint(settings)))
    return results


def run_foc(entries, *, seed: int = 0, budget: int = 500,
            settings: SolveSettings = DEFAULT_SETTINGS) -> list:
    results = []
    for i, e in enumerate(entries):
        rng = np.random.default_rng(seed + 1000 * i)
        worst_name, worst = None, -np.inf
        failures = 0
        for _ in range(budget):
            space = dyn.random_space(rng)
            G = dyn.random_partition(rng, space)
            X = dyn.random_rv(rng, space)
            Z = conditional_generalized_quantile(X, G, e.spec, settings)
            if not foc_check(X, Z, G, e.spec, tol=1e-8):
                failures += 1
                worst = 1.0
                worst_name = dyn._instance_payload(space, G, X, magnitude=1.0)
        report = dyn._finish("foc_at_solver_output", worst, worst_name, 0.0,
                             note=f"{failures} FOC failures in {budget} trials")
        results.append(SuiteResult("foc", "foc_at_solver_output", e.name,
                                   MUST_HOLD, report, e.fingerprint(settings)))
    return results


def run_oracle(entries, *, seed: int = 0, budget: int = 200,
               settings: SolveSettings = DEFAULT_SETTINGS) -> list:
    results = []
    for i, e in enumerate(entries):
        rng = np.random.default_rng(seed + 1000 * i)
        worst, witness = -np.inf, None
        for _ in range(budget):
            space = dyn.random_space(rng)
            G = dyn.random_partition(rng, space)
            X = dyn.random_rv(rng, space)
            span = float(X.values.max() - X.values.min())
            step = max(1e-4 * span, 1e-8)
            solver = conditional_generalized_quantile(X, G, e.spec, settings)
            oracle = brute_force_quantile(X, G, e.spec, grid_step=step)
            disc = float(np.max(np.abs(solver.values - oracle.values)))
            excess = disc - (step + 1e-9)
            if excess > worst:
                worst = excess
                witness = dyn._instance_payload(space, G, X, magnitude=excess)
        report = dyn._finish("solver_vs_brute_force", worst, witness, 0.0)
        results.append(SuiteResult("foc", "solver_vs_brute_force", e.name,
                                   MUST_HOLD, report, e.fingerprint(settings)))
    return results


def run_consistency(entries, *, seed: int = 0, budget: int = 500,
                    settings: SolveSettings = DEFAULT_SETTINGS) -> list:
    results = []
    for i, e in enumerate(entries):
        fp = e.fingerprint(settings)
        base_seed = seed + 1000 * i
        rng = np.random.default_rng(base_seed)
        # sequential consistency: must hold for every spec, random filtrations
        worst, witness = -np.inf, None
        n_filts = max(1, budget // 10)
        for _ in range(n_filts):
            space = dyn.random_space(rng)
            filt = dyn.random_filtration(rng, space)
            drm = _drm_for(e, filt, settings)
            rep = dyn.check_sequential_consistency(
                drm, trials=10, seed=int(rng.integers(0, 2**31)))
            if rep.max_violation > worst:
                worst, witness = rep.max_violation, rep.witness
        results.append(SuiteResult(
            "consistency", "sequential_consistency", e.name, MUST_HOLD,
            dyn._finish("sequential_consistency", worst, witness,
                        dyn.PROPERTY_TOL), fp))

        # tower / supermartingale: must hold for entropic, witness otherwise
        tower_req = MUST_HOLD if e.is_entropic else EXPECT_WITNESS
        tower = _stagewise_search(
            e, dyn.check_tower_property, budget=2 * budget,
            seed=base_seed + 11, settings=settings,
            tol=1e-9 if e.is_entropic else dyn.WITNESS_THRESHOLD,
            must_hold=tower_req == MUST_HOLD)
        results.append(SuiteResult("consistency", "tower_property", e.name,
                                   tower_req, tower, fp))
        super_req = (MUST_HOLD if e.is_entropic and e.entropic_gamma >= 0
                     else EXPECT_WITNESS)
        super_tol = dyn.PROPERTY_TOL if super_req == MUST_HOLD else dyn.WITNESS_THRESHOLD
        superm = _stagewise_search(
            e, dyn.check_supermartingale, budget=2 * budget,
            seed=base_seed + 13, settings=settings, tol=super_tol,
            must_hold=super_req == MUST_HOLD)
        results.append(SuiteResult("consistency", "supermartingale", e.name,
                                   super_req, superm, fp))
    return results


def _stagewise_search(entry: SpecEntry, check_fn, *, budget: int, seed: int,
                      settings: SolveSettings, tol: float, must_hold: bool,
                      inner: int = 5) -> dyn.PropertyReport:
    """Run a stagewise checker over random three-stage filtrations.

    Spends ``budget`` total trials, ``inner`` random payoffs per filtration,
    so both the intermediate information structure and the payoff vary.
    """
    rng = np.random.default_rng(seed)
    worst, witness, name = -np.inf, None, None
    for _ in range(max(1, budget // inner)):
        space = dyn.random_space(rng, int(rng.integers(3, 9)))
        filt = dyn.random_filtration(rng, space, n_stages=3)
        drm = _drm_for(entry, filt, settings)
        rep = check_fn(drm, 1, trials=inner, seed=int(rng.integers(0, 2**31)),
                       tol=tol,
                       stop_early=None if must_hold else dyn.WITNESS_THRESHOLD)
        name = rep.property_name
        if rep.max_violation > worst:
            worst, witness = rep.max_violation, rep.witness
        if not must_hold and worst > dyn.WITNESS_THRESHOLD:
            break
    note = ("no witness found within the search budget; this does not prove "
            "the property" if not must_hold and worst <= tol else "")
    return dyn._finish(name, worst, witness, tol, note)


def _drm_for(entry: SpecEntry, filt, settings) -> dyn.DynamicRiskMeasure:
    if entry.is_entropic:
        return dyn.dynamic_entropic(filt, entry.entropic_gamma)
    return dyn.dynamic_quantile(filt, entry.spec, settings)


SUITES = {
    "axioms": run_axioms,
    "equivalence": run_equivalence,
    "foc": run_foc,
    "consistency": run_consistency,
}


def run_suite(name: str, entries, *, seed: int = 0, budget: int = 500,
              settings: SolveSettings = DEFAULT_SETTINGS) -> list:
    if name == "all":
        out = []
        for key in ("axioms", "equivalence", "foc", "consistency"):
            out.extend(SUITES[key](entries, seed=seed, budget=budget,
                                   settings=settings))
        return out
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}")
    return SUITES[name](entries, seed=seed, budget=budget, settings=settings)
