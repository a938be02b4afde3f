import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from randlab.cli import main, run

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
COMMANDS = [line.split() for line in (FIXTURES / "commands.txt").read_text().splitlines() if line.strip()]


@pytest.fixture(autouse=True)
def in_fixtures(monkeypatch):
    monkeypatch.chdir(FIXTURES)


def report(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out else None)


def test_measure_check_uniform(capsys):
    code, rep = report(["measure", "check", "--measure", "uniform", "--depth", "10"], capsys)
    assert code == 0 and rep["pass"] and rep["command"] == "measure check"


def test_example_verify_extremes(capsys):
    code, rep = report(["example", "verify", "--epsilon", "1/2", "--machines", "trig1.json", "--depth", "8"], capsys)
    assert code == 0
    assert rep["data"]["min_ratio"] == "1/2" and rep["data"]["max_ratio"] == "3/2"


def test_doob_record(capsys):
    code, rep = report(["martingale", "doob", "--p", "uniform.json", "--q", "zeros.json",
                        "--depth", "2", "--thresholds", "2"], capsys)
    assert code == 0
    assert rep["records"] == [{"name": "doob m=2", "lhs": "1/4", "rhs": "1/2", "relation": "<=", "pass": True}]
    assert len(rep["data"]["config"]["p_sha256"]) == 64


def test_failed_check_exits_one(capsys):
    code, rep = report(["martingale", "boundedprob", "--p", "uniform.json", "--q", "zeros.json",
                        "--depth", "2", "--ks", "2"], capsys)
    assert code == 1 and not rep["pass"]


@pytest.mark.parametrize("argv", [
    ["measure", "check", "--measure", "uniform", "--depth", "0"],
    ["measure", "check", "--measure", "uniform", "--depth", "17"],
    ["measure", "check", "--measure", "missing.json", "--depth", "2"],
    ["example", "verify", "--epsilon", "1/0", "--machines", "trig1.json", "--depth", "2"],
    ["example", "verify", "--epsilon", "3/2", "--machines", "trig1.json", "--depth", "2"],
    ["bogus"],
])
def test_usage_errors_exit_two(argv, capsys):
    assert main(argv) == 2
    assert capsys.readouterr().out == ""


def test_env_depth_cap(monkeypatch, capsys):
    monkeypatch.setenv("RANDLAB_MAX_DEPTH", "4")
    assert main(["measure", "check", "--measure", "uniform", "--depth", "5"]) == 2


def test_out_file(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["--out", str(out), "measure", "check", "--measure", "uniform", "--depth", "3"]) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(out.read_text())["pass"]


@pytest.mark.parametrize("argv", COMMANDS, ids=[" ".join(c[:2]) + f"#{i}" for i, c in enumerate(COMMANDS)])
def test_documented_commands_pass(argv):
    code, rep = run(argv)
    assert code == 0, [r.to_dict() for r in rep.failures] if rep else "usage error"


def test_console_script_subprocess():
    proc = subprocess.run([sys.executable, "-m", "randlab.cli", "measure", "eval", "--measure", "table2.json",
                           "--x", "01"], capture_output=True, text=True, cwd=FIXTURES,
                          env={**os.environ, "RANDLAB_MAX_DEPTH": "16"})
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["data"]["value"] == "3/8"
