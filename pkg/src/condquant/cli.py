"""Command-line surface: scenario ingestion and deterministic reports.

Commands:

    compute --scenario F --var X (--sigma G | --filtration FN) --spec S
    verify  --scenario F --suite NAME [--seed N] [--budget K]
    oracle  --scenario F --var X --sigma G --spec S [--grid-step H]

Exit codes: 0 success, 1 must-hold violation, 2 expected witness not found,
64 usage error, 65 parse/validation error.  CONDQUANT_SEED overrides the
default seed.  All numbers print at 12 significant digits.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from importlib import resources

from .errors import CondQuantError, ParseError, ValidationError
from .losses import loss_from_tag, losses_from_score, score_from_tag
from .presets import entropic_spec
from .quantile import (
    SolveSettings,
    brute_force_quantile,
    conditional_generalized_quantile,
    risk_spec,
)
from .shortfall import conditional_entropic
from .space import (
    Partition,
    RandomVariable,
    discrete_partition,
    filtration,
    make_space,
    partition_from_labels,
    rv,
    trivial_partition,
)
from .verify import SpecEntry, run_suite

EXIT_OK = 0
EXIT_HARD = 1
EXIT_SOFT = 2
EXIT_USAGE = 64
EXIT_PARSE = 65


def fmt(x: float) -> str:
    return f"{float(x):.12g}"


def bundled_scenario_path(name: str) -> str:
    """Filesystem path of a scenario shipped with the package."""
    return str(resources.files("condquant").joinpath("scenarios", name))


@dataclass
class Scenario:
    outcomes: list
    space: object
    variables: dict
    partitions: dict
    filtrations: dict
    specs: dict  # name -> SpecEntry


def _build_spec_entry(name: str, desc) -> SpecEntry:
    if not isinstance(desc, dict):
        raise ParseError(f"spec {name!r} must be an object")
    if "score" in desc:
        tag = desc["score"]
        score = score_from_tag(tag)
        if score.family_tag == "entropic":
            gamma = score.params["gamma"]
            return SpecEntry(name, entropic_spec(gamma), entropic_gamma=gamma)
        alpha = desc.get("alpha", score.params.get("alpha", 0.5))
        u1, u2 = losses_from_score(alpha, score)
        return SpecEntry(name, risk_spec(alpha, u1, u2))
    try:
        alpha = float(desc["alpha"])
        u1 = loss_from_tag(desc["u1"])
        u2 = loss_from_tag(desc["u2"])
    except KeyError as exc:
        raise ParseError(f"spec {name!r} is missing field {exc}") from exc
    return SpecEntry(name, risk_spec(alpha, u1, u2))


def parse_scenario(path: str) -> Scenario:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read scenario file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed scenario JSON: {exc}") from exc

    for required in ("outcomes", "probs"):
        if required not in raw:
            raise ParseError(f"scenario is missing the {required!r} section")
    outcomes = list(raw["outcomes"])
    if len(set(outcomes)) != len(outcomes):
        raise ParseError("outcome labels must be unique")
    if len(raw["probs"]) != len(outcomes):
        raise ParseError("probs must list one probability per outcome")
    try:
        space = make_space([float(p) for p in raw["probs"]])
    except CondQuantError as exc:
        raise ValidationError(str(exc)) from exc
    index = {lab: i for i, lab in enumerate(outcomes)}

    variables = {}
    for name, vals in raw.get("variables", {}).items():
        if len(vals) != len(outcomes):
            raise ValidationError(f"variable {name!r} has wrong length")
        variables[name] = rv(space, [float(v) for v in vals])

    partitions = {"trivial": trivial_partition(space),
                  "discrete": discrete_partition(space)}
    for name, mapping in raw.get("partitions", {}).items():
        labels = []
        for lab in outcomes:
            if lab not in mapping:
                raise ValidationError(
                    f"partition {name!r} does not cover outcome {lab!r}")
            labels.append(mapping[lab])
        for lab in mapping:
            if lab not in index:
                raise ValidationError(
                    f"partition {name!r} references unknown outcome {lab!r}")
        partitions[name] = partition_from_labels(space, labels)

    filtrations = {}
    for name, stage_names in raw.get("filtrations", {}).items():
        stages = []
        for sname in stage_names:
            if sname not in partitions:
                raise ValidationError(
                    f"filtration {name!r} references unknown partition {sname!r}")
            stages.append(partitions[sname])
        try:
            filtrations[name] = filtration(stages)
        except ValueError as exc:
            raise ValidationError(f"filtration {name!r}: {exc}") from exc

    specs = {}
    for name, desc in raw.get("specs", {}).items():
        try:
            specs[name] = _build_spec_entry(name, desc)
        except CondQuantError:
            raise
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"spec {name!r}: {exc}") from exc

    return Scenario(outcomes, space, variables, partitions, filtrations, specs)


def _resolve(mapping: dict, name: str, what: str):
    if name not in mapping:
        raise ValidationError(f"unknown {what} {name!r}")
    return mapping[name]


def _entry_measure(entry: SpecEntry, X: RandomVariable, G: Partition,
                   settings: SolveSettings) -> RandomVariable:
    if entry.is_entropic:
        return conditional_entropic(X, G, entry.entropic_gamma)
    return conditional_generalized_quantile(X, G, entry.spec, settings)


def cmd_compute(args) -> int:
    scenario = parse_scenario(args.scenario)
    X = _resolve(scenario.variables, args.var, "variable")
    entry = _resolve(scenario.specs, args.spec, "spec")
    settings = SolveSettings(tol_x=args.tol_x,
                             grid_step=args.grid_step)
    if args.filtration:
        filt = _resolve(scenario.filtrations, args.filtration, "filtration")
        stage_values = [_entry_measure(entry, X, G, settings)
                        for G in filt.stages]
        print(f"# spec {entry.fingerprint(settings)}")
        header = "outcome " + " ".join(f"stage{t}" for t in range(len(stage_values)))
        print(header)
        for i, lab in enumerate(scenario.outcomes):
            row = " ".join(fmt(sv.values[i]) for sv in stage_values)
            print(f"{lab} {row}")
    else:
        G = _resolve(scenario.partitions, args.sigma, "partition")
        value = _entry_measure(entry, X, G, settings)
        print(f"# spec {entry.fingerprint(settings)}")
        print("outcome value")
        for i, lab in enumerate(scenario.outcomes):
            print(f"{lab} {fmt(value.values[i])}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    scenario = parse_scenario(args.scenario)
    X = _resolve(scenario.variables, args.var, "variable")
    entry = _resolve(scenario.specs, args.spec, "spec")
    G = _resolve(scenario.partitions, args.sigma, "partition")
    settings = SolveSettings()
    solver = conditional_generalized_quantile(X, G, entry.spec, settings)
    oracle = brute_force_quantile(X, G, entry.spec, grid_step=args.grid_step)
    print(f"# spec {entry.fingerprint(settings)}")
    print("outcome solver oracle abs_diff")
    for i, lab in enumerate(scenario.outcomes):
        diff = abs(solver.values[i] - oracle.values[i])
        print(f"{lab} {fmt(solver.values[i])} {fmt(oracle.values[i])} {fmt(diff)}")
    return EXIT_OK


def cmd_verify(args) -> int:
    scenario = parse_scenario(args.scenario)
    if not scenario.specs:
        raise ValidationError("scenario declares no specs to verify")
    entries = list(scenario.specs.values())
    results = run_suite(args.suite, entries, seed=args.seed, budget=args.budget)
    rows = []
    print("suite check spec requirement verdict max_violation note")
    for r in results:
        ok = "pass" if r.passed else "FAIL"
        note = r.report.note.replace(" ", "_") if r.report.note else "-"
        print(f"{r.suite} {r.check} {r.spec_name} {r.requirement} "
              f"{r.report.verdict}:{ok} {fmt(r.report.max_violation)} {note}")
        rows.append({
            "suite": r.suite,
            "check": r.check,
            "spec": r.spec_name,
            "requirement": r.requirement,
            "verdict": r.report.verdict,
            "passed": r.passed,
            "max_violation": r.report.max_violation,
            "fingerprint": r.fingerprint,
            "witness": r.report.witness,
            "note": r.report.note,
        })
    hard = any(r.hard_failure for r in results)
    soft = any(r.soft_failure for r in results)
    code = EXIT_HARD if hard else (EXIT_SOFT if soft else EXIT_OK)
    report = {"suite": args.suite, "seed": args.seed, "budget": args.budget,
              "exit_code": code, "results": rows}
    print("JSON-REPORT " + json.dumps(report, sort_keys=True))
    return code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    default_seed = int(os.environ.get("CONDQUANT_SEED", "0"))
    p = _Parser(prog="condquant",
                description="conditional generalized quantile toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", help="evaluate a conditional risk measure")
    c.add_argument("--scenario", required=True)
    c.add_argument("--var", required=True)
    g = c.add_mutually_exclusive_group(required=True)
    g.add_argument("--sigma", help="partition name")
    g.add_argument("--filtration", help="filtration name")
    c.add_argument("--spec", required=True)
    c.add_argument("--tol-x", type=float, default=1e-10, dest="tol_x")
    c.add_argument("--grid-step", type=float, default=None, dest="grid_step")
    c.set_defaults(fn=cmd_compute)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--scenario", required=True)
    v.add_argument("--suite", required=True,
                   choices=["axioms", "equivalence", "foc", "consistency", "all"])
    v.add_argument("--seed", type=int, default=default_seed)
    v.add_argument("--budget", type=int, default=200)
    v.set_defaults(fn=cmd_verify)

    o = sub.add_parser("oracle", help="solver vs brute-force side by side")
    o.add_argument("--scenario", required=True)
    o.add_argument("--var", required=True)
    o.add_argument("--sigma", required=True)
    o.add_argument("--spec", required=True)
    o.add_argument("--grid-step", type=float, default=None, dest="grid_step")
    o.set_defaults(fn=cmd_oracle)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except (ParseError, ValidationError, CondQuantError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
