import json
import re
from fractions import Fraction

import pytest

from painleve_equiv import cli
from painleve_equiv.classifier import Verdict
from painleve_equiv.cli import ParamDecl, UsageError, main, parse_param, sweep_points
from painleve_equiv.expr import parse, to_rational

from conftest import POINT_TABLE

FAMILY_A = "c*p^2/y + (y^4+x)/y"
FAMILY_B = "c*p^2/y + y*(y^4+x)"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    assert code == 0
    return json.loads(out)


# -- argument handling --------------------------------------------------------


def test_parse_param_forms():
    assert list(parse_param("c=3").values) == [3]
    assert list(parse_param("c={-3, 5}").values) == [-3, 5]
    assert parse_param("alpha=symbolic").symbolic
    assert list(parse_param("c=1/2").values) == [Fraction(1, 2)]
    for bad in ("c", "=3", "c={}", "c=x"):
        with pytest.raises(UsageError):
            parse_param(bad)


def test_sweep_is_cartesian_and_ordered():
    pts = sweep_points([ParamDecl("a", (1, 2)), ParamDecl("b", (3, 4))])
    assert [tuple(p.values()) for p in pts] == [(1, 3), (1, 4), (2, 3), (2, 4)]


def test_usage_errors_exit_1(capsys):
    code, _, err = run(capsys, "-e", "x + * y")
    assert code == 1 and "error" in err
    code, _, _ = run(capsys, "-e", "q*x")
    assert code == 1
    code, _, _ = run(capsys, "-e", "x", "--target", "p7")
    assert code == 1
    code, _, _ = run(capsys, "-e", FAMILY_A, "--param", "c=oops")
    assert code == 1


def test_help_exits_0(capsys):
    code, out, _ = run(capsys, "--help")
    assert code == 0 and "--equation" in out


def test_internal_assertion_exits_2(capsys, monkeypatch):
    def boom(*args, **kwargs):
        raise AssertionError("broken invariant")

    monkeypatch.setattr(cli, "classify", boom)
    code, _, _ = run(capsys, "-e", "6*y^2+x")
    assert code == 2


def test_leading_minus_equation(capsys):
    code, out, _ = run(capsys, "-e", "-p^2/y + (y^4+x)/y", "--target", "p1")
    assert code == 0 and "equivalent (degree 5)" in out


# -- runs ---------------------------------------------------------------------


def test_table1_sweep(capsys):
    doc = run_json(capsys, "-e", FAMILY_A, "--param", "c={-1,3}", "--target", "p1")
    assert [r["equivalent"] for r in doc["results"]] == [True, False]
    assert doc["results"][1]["reason"] == "VerificationFailed"


def test_table2_sweep(capsys):
    doc = run_json(capsys, "-e", FAMILY_B, "--param", "c={-3,5}", "--target", "p1")
    assert [r["reason"] for r in doc["results"]] == ["VerificationFailed", "DivisionByZero"]


def test_identity_class(capsys):
    code, out, _ = run(capsys, "-e", "6*y^2+x", "--target", "p1")
    assert code == 0
    assert "ybar^5 = y^5" in out and "xbar = x/y^2*ybar^2" in out


def test_point_class_with_table(capsys):
    doc = run_json(
        capsys, "-e", FAMILY_B, "--param", "c=-1", "--target", "p2a0", "--class", "point", "--derivations", str(POINT_TABLE)
    )
    rec = doc["results"][0]
    assert rec["equivalent"] and rec["degree"] == 6


def test_point_class_without_table(capsys):
    doc = run_json(capsys, "-e", "6*y^2+x", "--target", "p1", "--class", "point")
    assert doc["results"][0]["reason"] == "MissingDerivations"


def test_bad_table_path_is_usage_error(capsys, tmp_path):
    code, _, _ = run(capsys, "-e", "6*y^2+x", "--class", "point", "--derivations", str(tmp_path / "none.json"))
    assert code == 1


# -- schema -------------------------------------------------------------------

FIELDS = {"params", "equivalent", "reason", "transform", "degree", "seconds"}


def test_json_schema_and_round_trip(capsys):
    doc = run_json(capsys, "-e", "2*y^3+x*y+alpha", "--param", "alpha=symbolic", "--target", "p2")
    rec = doc["results"][0]
    assert set(rec) == FIELDS
    assert rec["params"] == {"alpha": "symbolic"}
    tr = rec["transform"]
    assert set(tr) == {"xbar", "pbar", "tower", "alphabar"}
    gens = [g["gen"] for g in tr["tower"]]
    names = ["x", "y", "p", "alpha"] + gens
    for text in [tr["xbar"], tr["pbar"], tr["alphabar"]] + [g["relation"] for g in tr["tower"]]:
        to_rational(parse(text, names), names)
    assert all(set(g) == {"gen", "degree", "relation"} for g in tr["tower"])


def test_text_and_json_agree(capsys):
    args = ("-e", FAMILY_B, "--param", "c={-3,-1,5}", "--target", "p2a0")
    doc = run_json(capsys, *args)
    _, out, _ = run(capsys, *args)
    lines = [l for l in out.splitlines() if l.startswith("c = ")]
    assert len(lines) == len(doc["results"])
    for line, rec in zip(lines, doc["results"]):
        assert line.startswith(f"c = {rec['params']['c']}:")
        assert (": equivalent" in line) == rec["equivalent"]
        if not rec["equivalent"]:
            assert f"({rec['reason']}" in line


def test_timing_flag(capsys):
    _, out, _ = run(capsys, "-e", "6*y^2+x", "--timing")
    assert re.search(r"\[\d+\.\d+ s\]", out)
    _, out, _ = run(capsys, "-e", "6*y^2+x")
    assert " s]" not in out


def test_prescreen_flag(capsys):
    doc = run_json(capsys, "-e", FAMILY_A, "--param", "c={-1,3}", "--prescreen")
    assert [r["equivalent"] for r in doc["results"]] == [True, False]


# -- explain ------------------------------------------------------------------


def test_explain_family_a(capsys):
    _, out, _ = run(capsys, "-e", FAMILY_A, "--param", "c=symbolic", "--target", "p1", "--explain")
    assert "admissible c: {-1, 3}" in out


def test_explain_family_b(capsys):
    _, out, _ = run(capsys, "-e", FAMILY_B, "--param", "c=symbolic", "--target", "p1", "--explain")
    assert "admissible c: {-3, 5}" in out


def test_explain_without_parameters(capsys):
    code, out, _ = run(capsys, "-e", "6*y^2+x", "--explain")
    assert code == 0 and "no constraints computed" in out


def test_explain_unsupported_is_a_warning(capsys, monkeypatch):
    # the symbolic family itself is slow to classify; only the warning matters here
    monkeypatch.setattr(cli, "classify", lambda *a, **k: Verdict(False, failure_reason="VerificationFailed"))
    doc = run_json(capsys, "-e", "c^2*p^2/y + (y^4+x)/y", "--param", "c=symbolic", "--explain")
    assert "warning" in json.dumps(doc["constraints"]).lower()
