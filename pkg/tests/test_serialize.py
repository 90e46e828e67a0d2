import json
import math

import numpy as np
import pytest

from setinfo import (
    BRIER, Experiment, FunctionClass, Hypothesis, Kernel, RefMeasure,
    SchemaError, TABLE, ZERO_ONE, affine_offset, builtin, channel_transform,
    csiszar_conjugate, d_information, d_phi_set, dvarn, hadamard_scale,
    make_loss, phi_induced_loss, pullback, serialize, support, translate,
    vpolyhedron, hpolyhedron,
)

INF = float("inf")


# -- float and array encoding -------------------------------------------------

def test_fmt_float_round_trip(rng):
    values = list(rng.normal(size=50) * 10.0 ** rng.integers(-300, 300, size=50))
    values += [0.0, -0.0, 1e-323, math.pi, INF, -INF]
    for v in values:
        s = serialize.fmt_float(v)
        assert isinstance(s, str)
        back = serialize.parse_float(s)
        if math.isinf(v):
            assert back == v
        else:
            assert back == v  # 17 significant digits are lossless for doubles


def test_fmt_special_values():
    assert serialize.fmt_float(INF) == "inf"
    assert serialize.fmt_float(-INF) == "-inf"
    assert serialize.fmt_float(float("nan")) == "nan"
    assert math.isnan(serialize.parse_float("nan"))
    assert serialize.parse_float("inf") == INF


def test_parse_float_rejects_junk():
    with pytest.raises(SchemaError):
        serialize.parse_float("zero")
    with pytest.raises(SchemaError):
        serialize.parse_float(True)
    with pytest.raises(SchemaError):
        serialize.parse_float(None)


def test_array_round_trip(rng):
    a = rng.normal(size=(3, 4))
    doc = serialize.encode_array(a)
    assert isinstance(doc[0][0], str)
    back = serialize.parse_array(doc)
    assert np.array_equal(back, a)


# -- generators ----------------------------------------------------------------

def test_builtin_recipe_round_trip():
    gen = builtin("kl")
    doc = serialize.generator_to_dict(gen)
    assert doc == {"kind": "builtin", "name": "kl"}
    back = serialize.generator_from_dict(doc)
    for t in (0.2, 1.0, 3.0):
        assert back.value(t) == gen.value(t)


def test_composed_recipe_round_trip():
    gen = csiszar_conjugate(affine_offset(channel_transform(
        builtin("hellinger2"), 0.8, 0.9), 0.5))
    doc = serialize.generator_to_dict(gen)
    back = serialize.generator_from_dict(doc)
    for t in (0.3, 1.0, 2.5):
        assert back.value(t) == pytest.approx(gen.value(t), abs=1e-12)


def test_generator_without_recipe_rejected():
    from setinfo import phi_from_set
    gen = phi_from_set(dvarn(2))
    if gen.recipe is None:
        with pytest.raises(SchemaError):
            serialize.generator_to_dict(gen)


def test_generator_unknown_kind():
    with pytest.raises(SchemaError):
        serialize.generator_from_dict({"kind": "mystery"})


# -- convex specs ---------------------------------------------------------------

def specs_for_round_trip(rng):
    yield dvarn(3)
    yield d_phi_set(builtin("jensen_shannon"))
    yield vpolyhedron(rng.normal(size=(4, 2)), rays=-np.eye(2))
    yield hpolyhedron(rng.normal(size=(4, 2)), rng.uniform(0.5, 1.0, size=4))
    base = vpolyhedron(rng.normal(size=(3, 2)))
    yield hadamard_scale(translate(pullback(base, rng.normal(size=(2, 2))),
                                   rng.normal(size=2)), [2.0, -1.0])


def test_spec_round_trips(rng):
    for spec in specs_for_round_trip(rng):
        doc = serialize.spec_to_dict(spec)
        back = serialize.spec_from_dict(doc)
        assert back.dim == spec.dim
        for _ in range(20):
            x = rng.normal(size=spec.dim)
            a, b = support(spec, x), support(back, x)
            assert (a == b) or (a == pytest.approx(b, abs=1e-12))


def test_spec_json_shape():
    doc = serialize.spec_to_dict(dvarn(2))
    assert doc["dim"] == 2
    assert doc["rep"] == {"kind": "dvar", "n": 2}
    assert doc["transforms"] == []
    phi_doc = serialize.spec_to_dict(d_phi_set(builtin("kl")))
    assert phi_doc["rep"]["kind"] == "phi"
    assert phi_doc["rep"]["generator"] == {"kind": "builtin", "name": "kl"}


def test_spec_malformed():
    with pytest.raises(SchemaError):
        serialize.spec_from_dict({"dim": 2, "rep": {"kind": "blob"}})
    with pytest.raises(SchemaError):
        serialize.spec_from_dict({"rep": {"kind": "dvar", "n": 2}})
    with pytest.raises(SchemaError):
        serialize.spec_from_dict(
            {"dim": "two", "rep": {"kind": "dvar", "n": 2}, "transforms": []})


# -- experiments, kernels, refs ---------------------------------------------------

def test_experiment_round_trip(coin):
    doc = serialize.experiment_to_dict(coin)
    assert doc["n"] == 2 and doc["m"] == 2
    back = serialize.experiment_from_dict(doc)
    assert np.array_equal(back.rows, coin.rows)


def test_experiment_cross_check():
    with pytest.raises(SchemaError):
        serialize.experiment_from_dict(
            {"n": 3, "m": 2, "rows": [["0.5", "0.5"], ["0.25", "0.75"]]})


def test_kernel_and_ref_round_trip(rng):
    k = Kernel(rng.dirichlet(np.ones(3), size=3))
    back = serialize.kernel_from_dict(serialize.kernel_to_dict(k))
    assert np.array_equal(back.matrix, k.matrix)
    r = RefMeasure([0.25, 0.75])
    back = serialize.ref_from_dict(serialize.ref_to_dict(r))
    assert np.array_equal(back.weights, r.weights)


def test_invalid_rows_carry_schema_error():
    with pytest.raises(SchemaError):
        serialize.experiment_from_dict(
            {"n": 1, "m": 2, "rows": [["0.6", "0.6"]]})


# -- info results -------------------------------------------------------------------

def test_info_result_shape(coin, dvar2):
    res = d_information(dvar2, coin)
    doc = serialize.info_result_to_dict(res)
    assert set(doc) == {"value", "witness", "per_outcome"}
    assert serialize.parse_float(doc["value"]) == pytest.approx(0.5, abs=1e-12)
    assert serialize.parse_array(doc["witness"]).shape == (2, 2)


def test_info_result_infinite(coin):
    res = d_information(d_phi_set(builtin("kl")),
                        Experiment([[0.5, 0.5], [0.0, 1.0]]))
    doc = serialize.info_result_to_dict(res)
    assert doc["value"] == "inf"
    assert doc["witness"] is None


# -- losses and hypotheses ------------------------------------------------------------

def test_loss_round_trip():
    loss = make_loss(BRIER, 2)
    doc = serialize.loss_to_dict(loss)
    back = serialize.loss_from_dict(doc)
    assert back.form == BRIER
    assert np.array_equal(back.grid, loss.grid)


def test_table_loss_round_trip():
    loss = phi_induced_loss(builtin("kl"), [0.5, 0.5], points=11)
    doc = serialize.loss_to_dict(loss)
    assert doc["form"] == TABLE
    back = serialize.loss_from_dict(doc)
    assert np.allclose(back.table, loss.table)
    assert back.allow_negative


def test_hypothesis_predictions_and_indices():
    loss = make_loss(ZERO_ONE, 2)
    h = Hypothesis(np.array([[0.25, 0.75], [1.0, 0.0]]))
    doc = serialize.hypothesis_to_dict(h)
    back = serialize.hypothesis_from_dict(doc)
    assert np.allclose(back.predictions, h.predictions)
    via_idx = serialize.hypothesis_from_dict({"indices": [50, 200]}, loss=loss)
    assert np.allclose(via_idx.predictions, loss.grid[[50, 200]])


def test_hypothesis_indices_without_loss():
    with pytest.raises(SchemaError):
        serialize.hypothesis_from_dict({"indices": [0, 1]})


def test_fclass_round_trip(rng):
    members = tuple(rng.normal(size=(2, 3)) for _ in range(3))
    fc = FunctionClass(members)
    back = serialize.fclass_from_dict(serialize.fclass_to_dict(fc))
    for a, b in zip(back.members, members):
        assert np.array_equal(a, b)


# -- json file handling ----------------------------------------------------------------

def test_dumps_is_stable_and_newline_terminated(coin):
    doc = serialize.experiment_to_dict(coin)
    text = serialize.dumps(doc)
    assert text.endswith("\n")
    assert serialize.dumps(doc) == text
    assert json.loads(text) == doc


def test_load_json_round_trip(tmp_path, coin):
    path = tmp_path / "e.json"
    serialize.dump_json(serialize.experiment_to_dict(coin), path)
    doc = serialize.load_json(path)
    assert np.array_equal(serialize.experiment_from_dict(doc).rows, coin.rows)


def test_load_json_reports_position(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"n": 2,\n  "rows": [[,]]}\n')
    with pytest.raises(SchemaError) as err:
        serialize.load_json(path)
    assert "line" in str(err.value)
