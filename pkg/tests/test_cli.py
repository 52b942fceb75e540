import dataclasses
import json
import subprocess
import sys
from pathlib import Path

import pytest

from hkflop import cli, dualcurve
from hkflop.exactpoly import parse

DATA = Path(__file__).parent / "data"
REPORT_KEYS = {"command", "inputs", "results", "residuals", "checks", "pass", "seed", "duration_ms"}


def invoke(capsys, *argv):
    code = cli.run([*map(str, argv), "--json-only"])
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out.strip() else None), out.err


@pytest.mark.parametrize("name, argv", [
    ("pluecker_3_0_0", ["pluecker", "--d", 3]),
    ("lag_transform_k3", ["lag", "transform", "--table", DATA / "k3_table.json"]),
    ("lag_reflect", ["lag", "reflect", "--gram", DATA / "u_plus_a1.json", "--p", "0,0,1", "--c", "0,0,1"]),
    ("symplin_project", ["symplin", "project", "--c", DATA / "lag34.json", "--d", DATA / "coiso.json"]),
    ("charclass_sqrt_l", ["charclass", "identity", "--kind", "sqrt-l", "--rank", 1, "--degree", 4]),
])
def test_golden_reports(capsys, monkeypatch, name, argv):
    monkeypatch.chdir(DATA)
    code, rep, _ = invoke(capsys, *argv)
    assert code == 0 and set(rep) == REPORT_KEYS
    rep.pop("duration_ms")
    assert rep == json.loads((DATA / "golden" / f"{name}.json").read_text())


def test_pluecker_examples(capsys):
    for (d, delta, kappa), expected in {(3, 0, 0): (6, 9), (3, 1, 0): (4, 3), (2, 0, 0): (2, 0)}.items():
        code, rep, _ = invoke(capsys, "pluecker", "--d", d, "--delta", delta, "--kappa", kappa)
        assert code == 0 and (rep["results"]["d_dual"], rep["results"]["kappa_dual"]) == expected


def test_dual_conic(capsys):
    code, rep, _ = invoke(capsys, "dual", "--poly", DATA / "conic.txt")
    assert code == 0 and rep["pass"]
    assert dualcurve.proportionality(parse(rep["results"]["dual_poly"]), parse("x1^2 - 4*x0*x2")) is not None
    assert [r["name"] for r in rep["residuals"]] == ["membership"]


def test_hk_and_legendre_commands(capsys):
    code, rep, _ = invoke(capsys, "hk", "flop-check", "--n", 1, "--samples", 10, "--seed", 3)
    assert code == 0 and len(rep["results"]["per_sample"]) == 10
    code, rep, _ = invoke(capsys, "hk", "conormal", "--poly", DATA / "cuspidal_cubic.txt", "--samples", 5,
                          "--tolerance", 1e-7)
    assert code == 0
    code, rep, _ = invoke(capsys, "legendre", "eval", "--poly", DATA / "conic.txt", "--xi", "1,-2,1")
    assert code == 0


def test_verification_failure_exits_one(capsys):
    code, rep, _ = invoke(capsys, "hk", "conormal", "--poly", DATA / "conic.txt", "--samples", 5,
                          "--tolerance", 1e-300)
    assert code == 1 and rep["pass"] is False and rep["checks"] == {"check_passed": False}


def test_degree_identity_mismatch_is_reported_not_failed(capsys):
    code, rep, _ = invoke(capsys, "pluecker", "--d", 3, "--dual-d", 6, "--dual-delta", 0, "--dual-kappa", 9)
    assert code == 0
    assert rep["results"]["degree_identity"] == {"lhs": 18, "rhs": -90, "match": False, "chi_bar_dual": 45}


@pytest.mark.parametrize("argv", [
    ["dual", "--poly", "/nonexistent/poly.txt"],
    ["pluecker", "--d", "three"],
    ["pluecker", "--d", 1],
    ["lag", "check", "--table", DATA / "conic.txt"],
    ["lag", "reflect", "--gram", DATA / "u_plus_a1.json", "--p", "1,0,0", "--c", "0,0,1"],
    ["charclass", "identity", "--rank", 1, "--degree", 20],
    ["bogus"],
])
def test_input_errors_exit_two(capsys, argv):
    code, rep, _ = invoke(capsys, *argv)
    assert code == 2 and rep is None


def test_bad_polynomial_file(capsys, tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("x0^2 + x1 +\n")
    assert invoke(capsys, "dual", "--poly", p)[0] == 2


def test_verify_subset_is_deterministic(capsys):
    argv = ["verify", "all", "--seed", 7, "--only", "pluecker_numbers", "--only", "normalized_legendre"]
    code1, a, _ = invoke(capsys, *argv)
    code2, b, _ = invoke(capsys, *argv)
    assert code1 == code2 == 0
    a.pop("duration_ms"), b.pop("duration_ms")
    assert a == b
    assert [it["name"] for it in a["results"]["items"]] == ["pluecker_numbers", "normalized_legendre"]


def test_mutation_in_dualcurve_is_named(capsys, monkeypatch):
    real = dualcurve.dual_polynomial

    def corrupted(f, **kw):
        res = real(f, **kw)
        return dataclasses.replace(res, dual_poly=res.dual_poly + parse("x0*x1", 3))

    monkeypatch.setattr(dualcurve, "dual_polynomial", corrupted)
    code, rep, _ = invoke(capsys, "verify", "all", "--seed", 7, "--only", "dual_conic")
    assert code == 1 and rep["pass"] is False
    assert rep["results"]["failing"] == ["dual_conic: proportional_to_x1^2-4x0x2"]
    assert rep["checks"]["dual_conic.proportional_to_x1^2-4x0x2"] is False


def test_crashing_check_is_reported(capsys, monkeypatch):
    def boom(*a, **kw):
        raise RuntimeError("injected")

    monkeypatch.setattr(dualcurve, "dual_polynomial", boom)
    code, rep, _ = invoke(capsys, "verify", "all", "--only", "dual_conic")
    assert code == 1 and "injected" in rep["results"]["items"][0]["results"]["error"]


def test_summary_on_stderr(capsys):
    code = cli.run(["pluecker", "--d", "2"])
    out = capsys.readouterr()
    assert code == 0 and "pluecker: PASS" in out.err
    json.loads(out.out)


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "hkflop", "pluecker", "--d", "2", "--json-only"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and json.loads(out.stdout)["results"]["d_dual"] == 2
