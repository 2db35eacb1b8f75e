from __future__ import annotations

import json
import math

import pytest

from qtorus.algebra import ThetaMatrix, element_to_json, monomial
from qtorus.cli import EXIT_FAIL, EXIT_PASS, EXIT_USAGE, main

from conftest import GOLDEN

THETA = ThetaMatrix.from_scalar(GOLDEN, 2)


@pytest.fixture
def elem(tmp_path):
    def write(m, c=1.0, name="x.json"):
        path = tmp_path / name
        path.write_text(element_to_json(monomial(THETA, m, c)))
        return str(path)
    return write


def _value(capsys) -> float:
    return float(capsys.readouterr().out.split()[0])


def test_sobolev_of_generator(elem, capsys):
    assert main(["norm", elem((1, 0)), "--space", "sobolev", "--k", "1", "--p", "2", "--levels", "3"]) == EXIT_PASS
    assert _value(capsys) == pytest.approx(math.sqrt(1 + 4 * math.pi ** 2), rel=1e-10)


def test_besov_single_frequency(elem, capsys):
    args = ["norm", elem((2, 0)), "--space", "besov", "--alpha", "0.5", "--p", "2", "--q", "2", "--levels", "3"]
    assert main(args) == EXIT_PASS
    assert _value(capsys) == pytest.approx(math.sqrt(2), rel=1e-10)


def test_json_output(elem, capsys):
    assert main(["norm", elem((1, 1)), "--space", "lp", "--p", "inf", "--json"]) == EXIT_PASS
    out = json.loads(capsys.readouterr().out)
    assert out["value"] == pytest.approx(1.0, abs=1e-3)
    assert "version" in out and "config" in out


def test_circular_poisson_needs_x_k(elem, capsys):
    path = elem((1, 0))
    args = ["norm", path, "--space", "besov", "--method", "circular-poisson", "--alpha", "1.5"]
    assert main(args) == EXIT_USAGE
    assert "x_k" in capsys.readouterr().err
    assert main(args + ["--strip-low", "--nodes", "16", "--levels", "3"]) == EXIT_PASS


def test_constraint_violation_is_usage_error(elem, capsys):
    args = ["norm", elem((2, 0)), "--space", "besov", "--method", "poisson-eps", "--alpha", "1.5", "--k", "1"]
    assert main(args) == EXIT_USAGE


def test_bad_inputs(tmp_path, capsys):
    assert main(["check", "--suite", "nope"]) == EXIT_USAGE
    assert main(["norm", str(tmp_path / "missing.json"), "--space", "lp"]) == EXIT_USAGE
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert main(["norm", str(bad), "--space", "lp"]) == EXIT_USAGE
    assert main(["frobnicate"]) == EXIT_USAGE


def test_check_writes_reports(tmp_path, capsys):
    out = tmp_path / "rep"
    code = main(["check", "--suite", "schur_identity", "--n", "3", "--out", str(out)])
    assert code == EXIT_PASS
    summary = json.loads((out / "schur_identity.summary.json").read_text())
    assert summary["verdict"] == "pass"
    assert (out / "schur_identity.csv").read_text().startswith("suite,sample_id")


def test_poincare_reports_attainment(tmp_path, capsys):
    code = main(["check", "--suite", "poincare", "--n", "5", "--param", "levels=[3]", "--out", str(tmp_path)])
    assert code == EXIT_PASS
    assert "attained: True" in capsys.readouterr().out


def test_failing_bound_exits_one(tmp_path, capsys):
    code = main(["check", "--suite", "poincare", "--n", "3", "--param", "bound=0.01",
                 "--param", "levels=[3]", "--out", str(tmp_path)])
    assert code == EXIT_FAIL


def test_gen_and_info(tmp_path, capsys):
    out = tmp_path / "els"
    assert main(["gen", "--n", "3", "--seed", "2", "--out", str(out)]) == EXIT_PASS
    files = sorted(out.glob("element_*.json"))
    assert len(files) == 3
    assert json.loads((out / "corpus.json").read_text())["corpus"]["seed"] == 2
    capsys.readouterr()
    assert main(["info", str(files[0])]) == EXIT_PASS
    assert "support size" in capsys.readouterr().out


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"suite": "schur_identity", "n": 2}))
    assert main(["check", "--config", str(cfg), "--out", str(tmp_path / "o")]) == EXIT_PASS
    cfg.write_text(json.dumps({"not-a-key": 1}))
    assert main(["check", "--config", str(cfg)]) == EXIT_USAGE


def test_sweep(tmp_path, capsys):
    code = main(["sweep", "--suite", "schur_identity", "--n", "2", "--grid", "N=[4,6]", "--out", str(tmp_path)])
    assert code == EXIT_PASS
    assert len(list(tmp_path.glob("*/schur_identity.csv"))) == 2
