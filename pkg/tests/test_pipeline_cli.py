import json
import subprocess
import sys

import pytest

from conftest import EX1, EX2, EX3
from psode import exprtree as ex
from psode.cli import EXIT_ERROR, EXIT_NONE, EXIT_OK, main
from psode.firstintegral import gradients_parallel
from psode.odemodel import parse_soode
from psode.pipeline import STATUS_NONE, STATUS_TWO, Config, emit, report_dict, run

KEYS = ["ode", "parameters", "darboux", "sr_solutions", "first_integrals", "status"]


def cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_config_validation():
    for bad in (dict(max_deg=0), dict(degq_factor=0), dict(output="xml"), dict(target_invariants=3)):
        with pytest.raises(ValueError):
            Config(**bad)


def test_ex1_report(ex1):
    rep = run(ex1)
    assert rep.status == STATUS_TWO
    assert len([p for p in rep.darboux if p.v.degree() == 1]) == 3
    good = [fi for fi in rep.first_integrals if fi.verified and fi.independent]
    assert len(good) == 2
    assert not gradients_parallel(good[0].expr, good[1].expr)


def test_free_particle_two_invariants():
    rep = run(parse_soode("y'' = 0"))
    assert rep.status == STATUS_TWO
    exprs = [fi.expr for fi in rep.first_integrals if fi.independent]
    assert len(exprs) == 2
    assert gradients_parallel(exprs[0], ex.parse_invariant("y'"))
    assert not gradients_parallel(exprs[0], exprs[1])


def test_json_schema_and_checks(ex1):
    d = report_dict(run(ex1))
    assert list(d) == KEYS
    for sr in d["sr_solutions"]:
        if sr["class"] == "rational":
            assert all(sr["checks"].values())
    assert all(fi["verified"] for fi in d["first_integrals"])


def test_empty_result(capsys):
    code, out, _ = cli(capsys, "find", "y'' = x + y^2*y'", "--max-deg", "1", "--degq-factor", "1", "--json")
    assert code == EXIT_NONE
    d = json.loads(out)
    assert d["status"] == STATUS_NONE
    assert d["first_integrals"] == []


def test_find_exit_ok(capsys):
    code, out, _ = cli(capsys, "find", EX1, "--json")
    assert code == EXIT_OK
    assert json.loads(out)["status"] == STATUS_TWO


def test_text_output(capsys):
    code, out, _ = cli(capsys, "find", "y'' = 0")
    assert code == EXIT_OK
    assert "I = -y'   [verified]" in out


@pytest.mark.parametrize("argv", [
    ["find", "y'' = "],
    ["find", "y'' = sin(x)"],
    ["find", "y'' = y/0"],
    ["find", EX1, "--max-deg", "0"],
    ["darboux", EX1, "--deg", "0"],
    ["find", "y'' = c1*y", "--param", "c1", "--pin", "c2=1"],
])
def test_input_errors(capsys, argv):
    code, _, err = cli(capsys, *argv)
    assert code == EXIT_ERROR
    assert err.startswith("psode: error:")


def test_verify_command(capsys):
    code, out, _ = cli(capsys, "verify", EX1, "--invariant", "y'/(y^3*x)")
    assert code == EXIT_OK and json.loads(out)["verified"] is True
    code, out, _ = cli(capsys, "verify", EX1, "--invariant", "x")
    assert code == EXIT_NONE and json.loads(out)["verified"] is False


def test_darboux_command(capsys):
    code, out, _ = cli(capsys, "darboux", EX1, "--deg", "1", "--json")
    assert code == EXIT_OK
    rows = {(r["v"], r["g"]) for r in json.loads(out)["darboux"]}
    assert rows == {("x", "y"), ("y", "x*y'"), ("y'", "3*x*y' + y")}


def test_ex2_parametric_constraint(capsys):
    code, out, _ = cli(capsys, "darboux", EX2, "--param", "c1", "--param", "c2", "--param", "beta",
                       "--parametric", "--deg", "3", "--json")
    assert code == EXIT_OK
    rows = json.loads(out)["darboux"]
    assert any("25*c2 - 6*c1^2 = 0" in r["constraints"] and r["g"] == "-6/5*c1" for r in rows)


def test_ex2_pinned_find(capsys):
    code, out, _ = cli(capsys, "find", EX2, "--param", "c1", "--param", "c2", "--param", "beta",
                       "--pin", "c2=6/25*c1^2", "--max-deg", "3", "--json")
    assert code == EXIT_OK
    d = json.loads(out)
    assert d["parameters"]["pins"] == {"c2": "6/25*c1^2"}
    assert any(fi["verified"] for fi in d["first_integrals"])


def test_emit_deterministic(ex1):
    a = emit(run(ex1), "json")
    b = emit(run(parse_soode(EX1)), "json")
    assert a == b


def test_monotone_in_max_deg():
    s = parse_soode(EX3)
    small = run(s, Config(max_deg=1, degq_factor=2))
    large = run(s, Config(max_deg=2, degq_factor=2))
    found = {str(sr.S) for sr in small.sr_solutions}
    assert found <= {str(sr.S) for sr in large.sr_solutions}


def test_console_script_byte_identical():
    cmd = [sys.executable, "-m", "psode.cli", "find", EX1, "--json"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and a
