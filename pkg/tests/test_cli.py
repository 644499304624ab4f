import json
import os
import subprocess
import sys

import pytest

from condquant.cli import bundled_scenario_path, main

SCENARIO = bundled_scenario_path("discrete_three_state.json")


def run_main(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_compute_three_state(capsys):
    code, out, _ = run_main(
        ["compute", "--scenario", SCENARIO, "--var", "X",
         "--sigma", "G", "--spec", "base"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[1] == "outcome value"
    assert lines[2:] == ["w1 1", "w2 1", "w3 3"]


def test_compute_trivial_root(capsys):
    code, out, _ = run_main(
        ["compute", "--scenario", SCENARIO, "--var", "X",
         "--sigma", "trivial", "--spec", "base"], capsys)
    assert code == 0
    value = float(out.strip().splitlines()[-1].split()[1])
    assert value == pytest.approx(1.594, abs=1e-3)


def test_compute_filtration_stages(capsys):
    code, out, _ = run_main(
        ["compute", "--scenario", SCENARIO, "--var", "X",
         "--filtration", "F", "--spec", "base"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[1].split() == ["outcome", "stage0", "stage1", "stage2"]
    w3 = lines[4].split()
    assert w3[0] == "w3" and w3[2] == "3" and w3[3] == "3"


def test_oracle_agrees(capsys):
    code, out, _ = run_main(
        ["oracle", "--scenario", SCENARIO, "--var", "X",
         "--sigma", "G", "--spec", "base"], capsys)
    assert code == 0
    for line in out.strip().splitlines()[2:]:
        assert float(line.split()[3]) <= 1e-4


def test_verify_exit_zero_and_json(capsys):
    code, out, _ = run_main(
        ["verify", "--scenario", SCENARIO, "--suite", "equivalence",
         "--seed", "1", "--budget", "20"], capsys)
    assert code == 0
    json_line = [l for l in out.splitlines() if l.startswith("JSON-REPORT ")][0]
    report = json.loads(json_line[len("JSON-REPORT "):])
    assert report["exit_code"] == 0
    assert all(r["passed"] for r in report["results"])
    assert all("fingerprint" in r for r in report["results"])


def test_verify_soft_failure_exit_two(capsys):
    # a one-trial budget cannot find the expected counterexamples
    code, _, _ = run_main(
        ["verify", "--scenario", SCENARIO, "--suite", "axioms",
         "--seed", "0", "--budget", "1"], capsys)
    assert code == 2


def test_verify_deterministic_output(capsys):
    argv = ["verify", "--scenario", SCENARIO, "--suite", "axioms",
            "--seed", "3", "--budget", "25"]
    _, first, _ = run_main(argv, capsys)
    _, second, _ = run_main(argv, capsys)
    assert first == second


def test_usage_error_exit_64(capsys):
    code, _, _ = run_main(["bogus"], capsys)
    assert code == 64
    code, _, _ = run_main(["compute", "--scenario", SCENARIO], capsys)
    assert code == 64


def test_parse_errors_exit_65(tmp_path, capsys):
    code, _, err = run_main(
        ["compute", "--scenario", "/nonexistent.json", "--var", "X",
         "--sigma", "G", "--spec", "base"], capsys)
    assert code == 65
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, _ = run_main(
        ["compute", "--scenario", str(bad), "--var", "X",
         "--sigma", "G", "--spec", "base"], capsys)
    assert code == 65
    negative = tmp_path / "neg.json"
    negative.write_text(json.dumps({
        "outcomes": ["a", "b"], "probs": [1.5, -0.5],
        "variables": {"X": [0, 1]}}))
    code, _, _ = run_main(
        ["compute", "--scenario", str(negative), "--var", "X",
         "--sigma", "trivial", "--spec", "base"], capsys)
    assert code == 65


def test_unknown_names_exit_65(capsys):
    for args in (["--var", "NOPE", "--sigma", "G", "--spec", "base"],
                 ["--var", "X", "--sigma", "NOPE", "--spec", "base"],
                 ["--var", "X", "--sigma", "G", "--spec", "NOPE"]):
        code, _, _ = run_main(["compute", "--scenario", SCENARIO] + args, capsys)
        assert code == 65


def test_console_script_and_seed_env():
    env = dict(os.environ, CONDQUANT_SEED="17")
    cmd = [sys.executable, "-m", "condquant.cli", "verify", "--scenario",
           SCENARIO, "--suite", "equivalence", "--budget", "10"]
    a = subprocess.run(cmd, env=env, capture_output=True, text=True)
    assert a.returncode == 0
    report = json.loads(a.stdout.splitlines()[-1][len("JSON-REPORT "):])
    assert report["seed"] == 17
    # explicit --seed wins over the environment
    b = subprocess.run(cmd + ["--seed", "4"], env=env,
                       capture_output=True, text=True)
    report_b = json.loads(b.stdout.splitlines()[-1][len("JSON-REPORT "):])
    assert report_b["seed"] == 4
    # byte-identical reruns under a fixed seed
    a2 = subprocess.run(cmd, env=env, capture_output=True, text=True)
    assert a.stdout == a2.stdout
