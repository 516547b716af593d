from __future__ import annotations

import json
import subprocess
import sys

import pytest

from lwmi.cli import run
from test_wmi import FIXTURE

PDF_FIXTURE = {
    "booleans": ["B"],
    "reals": [{"name": "x", "lower": 0, "upper": 1}],
    "formula": {"op": "and", "args": [
        {"var": "B"}, {"op": "le", "lhs": {"var": "x"}, "rhs": {"const": "1/2"}}]},
    "weight": {"op": "ite", "args": [{"var": "B"}, {"var": "x"}, {"const": "1/2"}]},
}


@pytest.fixture
def write(tmp_path):
    def _write(doc, name="problem.json"):
        path = tmp_path / name
        path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
        return str(path)
    return _write


def invoke(capsys, argv):
    code = run(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_compute_exact(write, capsys):
    code, out, _ = invoke(capsys, ["compute", write(FIXTURE), "--method", "exact", "--breakdown"])
    doc = json.loads(out)
    assert code == 0
    assert doc["value"] == "5/2" and doc["method"] == "exact"
    assert doc["breakdown"] == {"1": "1/2", "0": "2"}
    assert "elapsed_ms" not in doc


def test_timing_flag(write, capsys):
    _, out, _ = invoke(capsys, ["compute", write(FIXTURE), "--timing"])
    assert json.loads(out)["elapsed_ms"] >= 0


def test_monte_carlo_stdout_is_reproducible(write, capsys):
    path = write(FIXTURE)
    argv = ["compute", path, "--method", "mc", "--mc-samples", "1000000", "--seed", "42"]
    _, first, _ = invoke(capsys, argv)
    _, second, _ = invoke(capsys, argv + ["--threads", "1"])
    assert first == second
    doc = json.loads(first)
    assert doc["seed"] == 42 and doc["samples"] == 1000000
    assert abs(doc["value"] - 2.5) <= 4 * doc["stderr"]


def test_check_identities(write, capsys):
    code, out, _ = invoke(capsys, ["check-identities", write(PDF_FIXTURE)])
    doc = json.loads(out)
    assert code == 0
    by_name = {c["name"]: c for c in doc["checks"]}
    assert by_name["corollary2"] == {"name": "corollary2", "lhs": "1/8", "rhs": "1/8", "pass": True}
    assert {"tonelli", "theorem4_range", "theorem4_complement"} <= set(by_name)


def test_validate_and_factorize(write, capsys):
    path = write(PDF_FIXTURE)
    code, out, _ = invoke(capsys, ["validate-pdf", path])
    assert code == 0 and json.loads(out) == {"value": "1", "is_pdf": True, "method": "exact",
                                             "tolerance": 0.0}
    code, out, _ = invoke(capsys, ["factorize", path])
    assert code == 0 and json.loads(out)["marginal"] == {"1": "1/2", "0": "1/2"}


def test_oracle_subcommand(write, capsys):
    code, out, _ = invoke(capsys, ["oracle", write(FIXTURE), "--grid-resolution", "10000"])
    doc = json.loads(out)
    assert code == 0 and doc["method"] == "oracle" and abs(doc["value"] - 2.5) <= 1e-3


def test_input_errors_exit_1_with_empty_stdout(write, capsys):
    bad = dict(FIXTURE, formula={"op": "le", "lhs": {"var": "nope"}, "rhs": {"const": 0}})
    code, out, err = invoke(capsys, ["compute", write(bad)])
    assert code == 1 and out == "" and "nope" in err
    code, out, err = invoke(capsys, ["compute", write("{not json")])
    assert code == 1 and out == ""
    code, out, err = invoke(capsys, ["factorize", write(FIXTURE)])
    assert code == 1 and "not 1" in err


def test_backend_errors_exit_2_with_json(write, capsys):
    disc = {
        "booleans": [], "reals": [{"name": "x", "lower": -1, "upper": 1},
                                  {"name": "y", "lower": -1, "upper": 1}],
        "formula": {"op": "le", "lhs": {"op": "add", "args": [
            {"op": "pow", "args": [{"var": "x"}, {"const": 2}]},
            {"op": "pow", "args": [{"var": "y"}, {"const": 2}]}]}, "rhs": {"const": 1}},
        "weight": {"const": 1},
    }
    code, out, _ = invoke(capsys, ["compute", write(disc), "--method", "exact"])
    assert code == 2 and json.loads(out)["error"]["kind"] == "backend"
    code, out, _ = invoke(capsys, ["oracle", write(disc), "--grid-resolution", "20000"])
    assert code == 2 and json.loads(out)["error"]["kind"] == "capacity"


def test_failed_identity_exits_3(write, capsys, monkeypatch):
    from lwmi import cli
    from lwmi.wmi import Check

    monkeypatch.setattr(cli, "check_identities", lambda p: [Check("tonelli", 1, 2, False)])
    code, out, _ = invoke(capsys, ["check-identities", write(FIXTURE)])
    assert code == 3 and json.loads(out)["pass"] is False


def test_console_entry_point(write):
    proc = subprocess.run([sys.executable, "-m", "lwmi.cli", "compute", write(FIXTURE)],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["value"] == "5/2"
