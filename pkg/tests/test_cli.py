import json

import pytest
from click.testing import CliRunner

from abeltauber import runner
from abeltauber.cli import main

GAMMA = {"command": "gamma", "L": "1", "eps": "4", "gap": {"kind": "constant", "c": 0}}
ZERO_ABEL = {
    "command": "check-abel",
    "sequence": {"kind": "zero"},
    "L": "1",
    "eps": "1",
    "gap": {"kind": "constant", "c": 2},
    "N1": "1",
    "N2": "8",
    "p": "10",
}
OSCILLATING = {
    "command": "search-n",
    "sequence": {"kind": "alternating_harmonic"},
    "eps": "1/100",
    "gap": {"kind": "constant", "c": 1},
    "cap": "5",
}


def invoke(*args, env=None):
    return CliRunner().invoke(main, list(args), env=env)


def test_gamma_scenario_prints_two(scenario_file):
    res = invoke("run", "--scenario", str(scenario_file(GAMMA)), "--format", "csv")
    assert res.exit_code == 0
    lines = res.output.splitlines()
    assert lines[0] == ",".join(runner.Certificate.CSV_COLUMNS)
    assert lines[1].split(",")[-2:] == ["2", "pass"]


def test_check_abel_on_zero_sequence(scenario_file):
    res = invoke("run", "--scenario", str(scenario_file(ZERO_ABEL)))
    assert res.exit_code == 0
    cert = json.loads(res.output)["certificates"][0]
    assert cert["verdict"] == "pass" and cert["found_N"] == "8"


def test_cap_exhaustion_exit_two(scenario_file):
    res = invoke("run", "--scenario", str(scenario_file(OSCILLATING)))
    assert res.exit_code == 2
    assert json.loads(res.output)["certificates"][0]["verdict"] == "exhausted"


def test_cap_override_by_flag_and_env(scenario_file):
    path = str(scenario_file(OSCILLATING))
    assert invoke("run", "--scenario", path, "--cap", "1000").exit_code == 0
    assert invoke("run", "--scenario", path, env={"ABELTAUBER_RUN_CAP": "1000"}).exit_code == 0


@pytest.mark.parametrize(
    "bad, where",
    [
        ({"command": "check-abel", "sequence": {"kind": "geometric"}}, "scenarios[0].sequence"),
        ({"command": "frobnicate"}, "scenarios[0].command"),
        ({**GAMMA, "eps": "0.5"}, "scenarios[0].eps"),
        ({"L": "1"}, "scenarios[0]"),
    ],
)
def test_configuration_errors_exit_three(scenario_file, bad, where):
    res = invoke("run", "--scenario", str(scenario_file(bad)))
    assert res.exit_code == 3
    assert where in res.output


def test_invalid_json_exit_three(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"command": ')
    res = invoke("run", "--scenario", str(path))
    assert res.exit_code == 3 and "line 1" in res.output


def test_exit_precedence():
    mk = lambda v: runner.Certificate("x", {}, None, None, None, None, 0, None, v)  # noqa: E731
    assert runner.status_of([mk("pass"), mk("premise-unmet")]) == 0
    assert runner.status_of([mk("pass"), mk("exhausted")]) == 2
    assert runner.status_of([mk("exhausted"), mk("error")]) == 3
    assert runner.status_of([mk("error"), mk("fail")]) == 1


def test_premise_unmet_is_not_failure(scenario_file):
    sc = {**ZERO_ABEL, "N2": "3"}
    res = invoke("run", "--scenario", str(scenario_file(sc)))
    assert res.exit_code == 0
    assert json.loads(res.output)["certificates"][0]["verdict"] == "premise-unmet"


def test_batch_ordering_and_replay(scenario_file, tmp_path):
    batch = {"scenarios": [GAMMA, ZERO_ABEL, {"command": "specker", "base": {"kind": "dyadic_approach"}, "transform": "32"}]}
    path = str(scenario_file(batch))
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    assert invoke("run", "--scenario", path, "--jobs", "3", "--out", str(out1)).exit_code == 0
    assert invoke("run", "--scenario", path, "--out", str(out2)).exit_code == 0
    assert out1.read_bytes() == out2.read_bytes()
    kinds = [c["kind"] for c in json.loads(out1.read_text())["certificates"]]
    assert kinds == ["gamma", "check-abel", "specker"]
    res = invoke("verify-cert", str(out1))
    assert res.exit_code == 0 and res.output.count("replayed") == 3


def test_tampered_certificate_is_rejected(scenario_file, tmp_path):
    out = tmp_path / "c.json"
    invoke("run", "--scenario", str(scenario_file(GAMMA)), "--out", str(out))
    data = json.loads(out.read_text())
    data["certificates"][0]["bound_claimed"] = "3"
    out.write_text(json.dumps(data))
    res = invoke("verify-cert", str(out))
    assert res.exit_code == 1 and "MISMATCH" in res.output


def test_table_format(scenario_file):
    res = invoke("run", "--scenario", str(scenario_file(GAMMA)), "--format", "table")
    assert res.exit_code == 0
    assert res.output.splitlines()[0].split() == list(runner.Certificate.CSV_COLUMNS)


def test_fuzz_command_small():
    res = invoke("fuzz", "--theorem", "abel", "--seed", "3", "--count", "5")
    assert res.exit_code == 0 and "premise=5" in res.output
