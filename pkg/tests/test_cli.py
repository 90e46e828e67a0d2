import json
import math

import numpy as np
import pytest
from click.testing import CliRunner

from setinfo import serialize
from setinfo.cli import main

from _oracles import DIVERGENCES, mutual_information_oracle


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture()
def files(tmp_path):
    paths = {}

    def put(name, doc):
        p = tmp_path / name
        p.write_text(json.dumps(doc) + "\n")
        paths[name] = str(p)
        return str(p)

    put("coin.json", {"n": 2, "m": 2,
                      "rows": [["0.5", "0.5"], ["0.25", "0.75"]]})
    put("dvar.json", {"dim": 2, "rep": {"kind": "dvar", "n": 2},
                      "transforms": []})
    put("kl.json", {"dim": 2,
                    "rep": {"kind": "phi",
                            "generator": {"kind": "builtin", "name": "kl"}},
                    "transforms": []})
    put("zero.json", {"n": 2, "m": 2,
                      "rows": [["0.5", "0.5"], ["0", "1"]]})
    paths["dir"] = str(tmp_path)
    return paths


def payload(result):
    assert result.exit_code == 0, result.output
    return json.loads(result.output)


# -- compute -------------------------------------------------------------------

def test_compute_json_value(runner, files):
    doc = payload(runner.invoke(
        main, ["compute", files["coin.json"], files["dvar.json"]]))
    assert serialize.parse_float(doc["value"]) == pytest.approx(0.5, abs=1e-12)
    assert doc["witness"] is None
    assert len(doc["per_outcome"]) == 2


def test_compute_witness_flag(runner, files):
    doc = payload(runner.invoke(
        main, ["compute", files["coin.json"], files["dvar.json"], "--witness"]))
    w = serialize.parse_array(doc["witness"])
    assert w.shape == (2, 2)


def test_compute_csv(runner, files):
    res = runner.invoke(main, ["compute", files["coin.json"],
                               files["dvar.json"], "--format", "csv"])
    assert res.exit_code == 0
    lines = res.output.strip().splitlines()
    assert lines[0].startswith("value,")
    assert float(lines[0].split(",")[1]) == pytest.approx(0.5, abs=1e-12)
    assert lines[2].startswith("per_outcome,0,")


def test_compute_ref_invariance(runner, files):
    base = payload(runner.invoke(
        main, ["compute", files["coin.json"], files["kl.json"]]))
    uni = payload(runner.invoke(
        main, ["compute", files["coin.json"], files["kl.json"],
               "--ref", "uniform"]))
    a = serialize.parse_float(base["value"])
    b = serialize.parse_float(uni["value"])
    assert a == pytest.approx(b, abs=1e-12)
    assert a == pytest.approx(0.14384103622589042, abs=1e-12)


def test_compute_require_finite_exit_one(runner, files):
    res = runner.invoke(main, ["compute", files["zero.json"],
                               files["kl.json"], "--require-finite"])
    assert res.exit_code == 1
    assert "infinite" in res.output.lower()


def test_compute_infinite_without_flag(runner, files):
    doc = payload(runner.invoke(
        main, ["compute", files["zero.json"], files["kl.json"]]))
    assert doc["value"] == "inf"


def test_compute_out_file(runner, files, tmp_path):
    target = tmp_path / "result.json"
    res = runner.invoke(main, ["compute", files["coin.json"],
                               files["dvar.json"], "--out", str(target)])
    assert res.exit_code == 0
    doc = json.loads(target.read_text())
    assert serialize.parse_float(doc["value"]) == pytest.approx(0.5, abs=1e-12)


# -- bridge --------------------------------------------------------------------

def test_bridge_zero_one(runner, files):
    doc = payload(runner.invoke(
        main, ["bridge", files["coin.json"], "--loss", "zero_one"]))
    brisk = serialize.parse_float(doc["bayes_risk"])
    info = serialize.parse_float(doc["bridge_information"])
    gap = serialize.parse_float(doc["gap"])
    assert brisk == pytest.approx(0.375, abs=1e-12)
    assert info == pytest.approx(-brisk, abs=1e-9)
    assert abs(gap) <= 1e-9


def test_bridge_prior_option(runner, files):
    doc = payload(runner.invoke(
        main, ["bridge", files["coin.json"], "--loss", "zero_one",
               "--prior", "0.8,0.2"]))
    assert serialize.parse_float(doc["prior"][0]) == 0.8
    assert abs(serialize.parse_float(doc["gap"])) <= 1e-9


def test_bridge_constrained(runner, files, tmp_path):
    hyp = tmp_path / "hyp.json"
    hyp.write_text(json.dumps([
        {"predictions": [["0.2", "0.8"], ["0.9", "0.1"]]},
        {"predictions": [["0.5", "0.5"], ["0.5", "0.5"]]},
    ]) + "\n")
    doc = payload(runner.invoke(
        main, ["bridge", files["coin.json"], "--loss", "log",
               "--hypotheses", str(hyp)]))
    gap = serialize.parse_float(doc["gap"])
    assert abs(gap) <= 1e-12
    assert serialize.parse_float(doc["bayes_risk"]) > 0.0


# -- entropy and mi --------------------------------------------------------------

def test_entropy_matches_divergence(runner):
    doc = payload(runner.invoke(
        main, ["entropy", "0.25,0.75", "0.5,0.5", "--phi", "kl"]))
    want = DIVERGENCES["kl"](np.array([0.25, 0.75]), np.array([0.5, 0.5]))
    assert serialize.parse_float(doc["value"]) == pytest.approx(want, abs=1e-9)


def test_entropy_from_files(runner, tmp_path):
    mu = tmp_path / "mu.json"
    mu.write_text('["0.25", "0.75"]\n')
    doc = payload(runner.invoke(
        main, ["entropy", f"@{mu}", "0.5,0.5", "--phi", "kl"]))
    assert serialize.parse_float(doc["value"]) > 0.0


def test_mi_matches_shannon(runner, tmp_path):
    joint = np.array([[0.3, 0.1], [0.2, 0.4]])
    jfile = tmp_path / "joint.json"
    jfile.write_text(json.dumps(serialize.encode_array(joint)) + "\n")
    doc = payload(runner.invoke(main, ["mi", str(jfile), "--phi", "kl"]))
    want = mutual_information_oracle(joint)
    assert serialize.parse_float(doc["value"]) == pytest.approx(want, abs=1e-9)


def test_mi_independent_is_zero(runner, tmp_path):
    joint = np.outer([0.4, 0.6], [0.3, 0.7])
    jfile = tmp_path / "joint.json"
    jfile.write_text(json.dumps(serialize.encode_array(joint)) + "\n")
    doc = payload(runner.invoke(main, ["mi", str(jfile), "--phi", "kl"]))
    assert abs(serialize.parse_float(doc["value"])) <= 1e-12


# -- catalog and regions -----------------------------------------------------------

def test_catalog_single_entry(runner):
    doc = payload(runner.invoke(main, ["catalog", "kl"]))
    (entry,) = doc["generators"]
    assert entry["name"] == "kl"
    assert entry["phi_at_zero"] == "1"
    assert entry["phi_slope_inf"] == "inf"
    assert serialize.parse_float(entry["value"]["1"]) == 0.0


def test_catalog_all_builtins(runner):
    doc = payload(runner.invoke(main, ["catalog"]))
    names = [g["name"] for g in doc["generators"]]
    assert names == ["variational", "kl", "hellinger2", "chi2",
                     "jensen_shannon", "triangular"]


def test_regions_csv(runner):
    res = runner.invoke(main, ["regions", "variational",
                               "--window", "-3,3,-3,3", "--grid", "61"])
    assert res.exit_code == 0
    lines = res.output.strip().splitlines()
    assert lines[0] == "x,y,set"
    tags = {line.rsplit(",", 1)[1] for line in lines[1:]}
    assert tags == {"D", "Dpolar"}
    x, y, _ = lines[1].split(",")
    float(x), float(y)


def test_regions_bad_window(runner):
    res = runner.invoke(main, ["regions", "kl", "--window", "0,1"])
    assert res.exit_code == 2


# -- verify ----------------------------------------------------------------------

def test_verify_small_run_passes(runner):
    res = runner.invoke(main, ["verify", "--seed", "3", "--trials", "2"])
    assert res.exit_code == 0, res.output
    doc = json.loads(res.stdout)
    assert doc["all_passed"] is True
    assert "passed" in res.stderr


def test_verify_repeat_is_byte_identical(runner, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for target in (a, b):
        res = runner.invoke(main, ["verify", "--seed", "3", "--trials", "2",
                                   "--out", str(target)])
        assert res.exit_code == 0
    assert a.read_bytes() == b.read_bytes()


def test_verify_bad_suite_is_usage_error(runner):
    res = runner.invoke(main, ["verify", "--suites", "nope"])
    assert res.exit_code == 2
    assert "unknown suite" in res.output


def test_verify_failing_tolerance_exit_one(runner):
    res = runner.invoke(main, ["verify", "--seed", "3", "--trials", "2",
                               "--suites", "label", "--tol", "1e-18"])
    assert res.exit_code == 1
    doc = json.loads(res.stdout)
    assert doc["all_passed"] is False


def test_verify_config_file(runner, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 3, "trials": 2,
                               "suites": ["bridges"]}) + "\n")
    res = runner.invoke(main, ["verify", "--config", str(cfg)])
    assert res.exit_code == 0
    doc = json.loads(res.stdout)
    assert [s["suite"] for s in doc["suites"]] == ["bridges"]


# -- failure modes -----------------------------------------------------------------

def test_missing_input_file(runner, files):
    res = runner.invoke(main, ["compute", files["dir"] + "/absent.json",
                               files["dvar.json"]])
    assert res.exit_code == 2


def test_malformed_json_reports_position(runner, files, tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text("{bad\n")
    res = runner.invoke(main, ["compute", str(broken), files["dvar.json"]])
    assert res.exit_code == 2
    assert "line" in res.output


def test_schema_error_exit_two(runner, files, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"n": 3, "m": 2,
                               "rows": [["0.5", "0.5"]]}) + "\n")
    res = runner.invoke(main, ["compute", str(bad), files["dvar.json"]])
    assert res.exit_code == 2


def test_dimension_mismatch_is_computation_error(runner, files, tmp_path):
    big = tmp_path / "dvar3.json"
    big.write_text(json.dumps({"dim": 3, "rep": {"kind": "dvar", "n": 3},
                               "transforms": []}) + "\n")
    res = runner.invoke(main, ["compute", files["coin.json"], str(big)])
    assert res.exit_code == 1
