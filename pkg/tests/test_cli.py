import json
import re
import subprocess
import sys

import pytest

from fracmvt.cli import fmt_float, run
from tests import oracles

SUBCOMMANDS = [
    ("op", "rl-int"), ("op", "caputo"), ("check", "fundamental"), ("check", "taylor-remainder"),
    ("mvt", "integral"), ("mvt", "integral-weighted"), ("mvt", "differential"),
    ("nagumo", "scan"), ("nagumo", "counterexample"),
    ("ivp", "solve"), ("ivp", "residual"), ("ivp", "eoc"), ("ivp", "uniqueness"),
]
SCI = re.compile(r"^-?\d\.\d{16}e[+-]\d{2,3}$")


def invoke(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_differential_example(capsys):
    code, out, _ = invoke(capsys, "mvt", "differential", "--f", "x^2", "--alpha", "0.5",
                          "--a", "0", "--b", "1", "--n", "2049", "--format", "json")
    assert code == 0
    result = json.loads(out)["result"]
    assert result["xi"] == pytest.approx(0.70270, abs=1e-5)
    assert result["residual"] <= 1e-6


def test_rl_int_example(capsys):
    code, out, _ = invoke(capsys, "op", "rl-int", "--f", "1", "--alpha", "0.5", "--a", "0", "--b", "1",
                          "--n", "1025", "--at", "1", "--format", "csv")
    assert code == 0
    header, row = out.strip().splitlines()
    assert header == "x,value"
    assert float(row.split(",")[1]) == pytest.approx(oracles.TWO_OVER_SQRT_PI, abs=1e-4)


def test_weight_sign_example(capsys):
    args = ["mvt", "integral-weighted", "--f", "x", "--alpha", "0.5", "--a", "0", "--b", "1"]
    code, out, _ = invoke(capsys, *args, "--g", "x - 2")
    assert code == 0 and "xi" in out
    code, out, err = invoke(capsys, *args, "--g", "x - 0.5")
    assert code == 4
    assert "changes sign" in err and out == ""


@pytest.mark.parametrize("source, offset", [("x +", 3), ("(x", 2), ("sin x", 4), ("2 $ x", 2)])
def test_syntax_errors_exit_2_with_offset(capsys, source, offset):
    code, _, err = invoke(capsys, "check", "fundamental", "--f", source, "--alpha", "0.5")
    assert code == 2
    assert f"offset {offset}" in err


def test_bad_arguments_exit_2(capsys):
    assert invoke(capsys, "mvt", "differential", "--alpha", "0.5")[0] == 2
    assert invoke(capsys, "frobnicate")[0] == 2
    assert invoke(capsys, "op", "rl-int", "--f", "x", "--alpha", "zero")[0] == 2


def test_numeric_failure_exit_3(capsys):
    code, _, err = invoke(capsys, "ivp", "solve", "--rhs", "y^2", "--y0", "1", "--alpha", "1", "--b", "3")
    assert code == 3 and "step" in err
    assert invoke(capsys, "op", "rl-int", "--f", "ln(x)", "--alpha", "0.5")[0] == 3


def test_precondition_exit_4(capsys):
    assert invoke(capsys, "op", "caputo", "--f", "x", "--alpha", "1.5", "--route", "definition")[0] == 4
    assert invoke(capsys, "nagumo", "scan", "--rhs", "y", "--alpha", "1")[0] == 4
    assert invoke(capsys, "mvt", "integral", "--f", "x", "--alpha", "0.5", "--n", "1")[0] == 4
    assert invoke(capsys, "mvt", "integral", "--f", "x", "--alpha", "-1")[0] == 4


@pytest.mark.parametrize("group, command", SUBCOMMANDS)
def test_every_subcommand_has_help(capsys, group, command):
    code, out, _ = invoke(capsys, group, command, "--help")
    assert code == 0
    assert "--alpha" in out and "--format" in out
    assert "expressions:" in out


def test_help_names_the_statement(capsys):
    assert "mean value theorem" in invoke(capsys, "mvt", "differential", "--help")[1]
    assert "Nagumo" in invoke(capsys, "nagumo", "scan", "--help")[1]
    assert "Taylor" in invoke(capsys, "check", "taylor-remainder", "--help")[1]


MACHINE_RUNS = [
    ["op", "caputo", "--f", "sin(x)", "--alpha", "0.4", "--n", "33"],
    ["mvt", "integral", "--f", "exp(x)", "--alpha", "0.3"],
    ["nagumo", "scan", "--rhs", "counterexample", "--alpha", "0.5", "--nx", "21", "--ny", "21"],
    ["ivp", "eoc", "--rhs", "-y", "--y0", "1", "--alpha", "0.5", "--exact", "ml:-1", "--n-list", "16,32"],
    ["ivp", "uniqueness", "--rhs", "counterexample", "--alpha", "0.5", "--eps", "1e-3", "--steps", "64"],
]


@pytest.mark.parametrize("argv", MACHINE_RUNS)
@pytest.mark.parametrize("form", ["csv", "json"])
def test_machine_output_is_deterministic(capsys, argv, form):
    first = invoke(capsys, *argv, "--format", form)[1]
    second = invoke(capsys, *argv, "--format", form)[1]
    assert first == second and first


def test_json_schema_and_float_format(capsys):
    code, out, _ = invoke(capsys, "mvt", "integral", "--f", "x", "--alpha", "0.5", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {"command", "params", "result"}
    assert doc["command"] == "mvt integral"
    assert doc["params"]["n"] == 1025 and doc["params"]["tol"] == 1e-8
    assert isinstance(doc["result"]["xi"], float)
    for literal in re.findall(r": (-?\d[^,\n]*)", out):
        if "." in literal or "e" in literal:
            assert SCI.match(literal), literal


def test_witness_csv_schema(capsys):
    out = invoke(capsys, "mvt", "integral", "--f", "x", "--alpha", "0.5", "--format", "csv")[1]
    header, row = out.strip().splitlines()
    assert header == "xi,target,residual,lo,hi,degenerate"
    cells = row.split(",")
    assert all(SCI.match(c) for c in cells[:5]) and cells[5] == "false"


def test_sampled_csv_has_every_node(capsys):
    out = invoke(capsys, "ivp", "solve", "--rhs", "-y", "--y0", "1", "--alpha", "0.5", "--steps", "8", "--format", "csv")[1]
    lines = out.strip().splitlines()
    assert lines[0] == "x,value" and len(lines) == 10


def test_out_file(capsys, tmp_path):
    target = tmp_path / "witness.json"
    code, out, _ = invoke(capsys, "mvt", "integral", "--f", "x", "--alpha", "0.5", "--format", "json", "--out", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["result"]["xi"] == pytest.approx(2 / 3, abs=1e-6)


def test_expression_starting_with_minus(capsys):
    code, out, _ = invoke(capsys, "op", "rl-int", "--f", "-x", "--alpha", "1", "--at", "1", "--format", "csv")
    assert code == 0
    assert float(out.splitlines()[1].split(",")[1]) == pytest.approx(-0.5, abs=1e-12)


def test_fmt_float():
    assert fmt_float(0.1) == "1.0000000000000001e-01"
    assert float(fmt_float(2 / 3)) == 2 / 3


def test_module_entry_point_is_byte_identical():
    argv = [sys.executable, "-m", "fracmvt", "mvt", "differential", "--f", "x^2", "--alpha", "0.5", "--format", "json"]
    first = subprocess.run(argv, capture_output=True, check=True).stdout
    second = subprocess.run(argv, capture_output=True, check=True).stdout
    assert first == second
    assert json.loads(first)["command"] == "mvt differential"
