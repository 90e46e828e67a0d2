import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from setinfo import (
    BUILTIN_NAMES, Experiment, Kernel, RefMeasure, builtin,
    compose_observation, d_information, d_phi_set, dvarn, phi_divergence,
    serialize, support, variational_information, vpolyhedron,
)
from setinfo.simplex import OPTIMAL, solve_max

from _oracles import lp_max_oracle

INF = float("inf")

finite = st.floats(allow_nan=False, allow_infinity=False,
                   min_value=-1e6, max_value=1e6)
positive = st.floats(min_value=1e-9, max_value=1e6, allow_nan=False)


def weights(n, m):
    return st.lists(
        st.lists(st.floats(min_value=1e-3, max_value=1.0), min_size=m, max_size=m),
        min_size=n, max_size=n)


def as_experiment(rows):
    a = np.asarray(rows, dtype=float)
    return Experiment(a / a.sum(axis=1, keepdims=True))


@given(name=st.sampled_from(list(BUILTIN_NAMES)), t=positive, x=finite)
def test_fenchel_young(name, t, x):
    gen = builtin(name)
    p, c = gen.value(t), gen.conjugate(x)
    if math.isinf(p) or math.isinf(c):
        return
    assert p + c >= t * x - 1e-9 * max(1.0, abs(p), abs(c), abs(t * x))


@given(x=st.lists(finite, min_size=2, max_size=2), c=positive)
def test_support_positive_homogeneity(x, c):
    assume(c <= 1e4)
    spec = dvarn(2)
    v = np.asarray(x)
    base = support(spec, v)
    scaled = support(spec, c * v)
    if math.isinf(base):
        assert math.isinf(scaled)
    else:
        assert scaled == pytest.approx(c * base, rel=1e-9, abs=1e-9)


@given(rows=weights(2, 3),
       ref=st.lists(st.floats(min_value=0.05, max_value=1.0),
                    min_size=3, max_size=3))
@settings(max_examples=40)
def test_reference_measure_invariance(rows, ref):
    e = as_experiment(rows)
    spec = dvarn(2)
    base = d_information(spec, e).value
    other = d_information(spec, e, ref=RefMeasure(ref)).value
    assert other == pytest.approx(base, rel=1e-9, abs=1e-10)


@given(rows=weights(2, 3), krows=weights(3, 3))
@settings(max_examples=40)
def test_observation_garbling_cannot_create_information(rows, krows):
    e = as_experiment(rows)
    k = Kernel(np.asarray(krows) / np.asarray(krows).sum(axis=1, keepdims=True))
    spec = dvarn(2)
    before = d_information(spec, e).value
    after = d_information(spec, compose_observation(e, k)).value
    assert after <= before + 1e-9


@given(name=st.sampled_from(list(BUILTIN_NAMES)),
       p=st.lists(st.floats(min_value=1e-3, max_value=1.0),
                  min_size=3, max_size=3),
       q=st.lists(st.floats(min_value=1e-3, max_value=1.0),
                  min_size=3, max_size=3))
@settings(max_examples=60)
def test_divergence_nonnegative_and_zero_at_equality(name, p, q):
    pv = np.asarray(p) / np.sum(p)
    qv = np.asarray(q) / np.sum(q)
    gen = builtin(name)
    assert phi_divergence(gen, pv, qv) >= -1e-12
    assert phi_divergence(gen, pv, pv) == pytest.approx(0.0, abs=1e-12)


@given(v=st.floats(allow_nan=False, width=64))
def test_float_serialization_round_trip(v):
    assert serialize.parse_float(serialize.fmt_float(v)) == v


@given(data=st.data())
@settings(max_examples=30, deadline=None)
def test_simplex_matches_reference_solver(data):
    m = data.draw(st.integers(min_value=2, max_value=5))
    d = data.draw(st.integers(min_value=2, max_value=4))
    entries = st.floats(min_value=-3.0, max_value=3.0,
                        allow_nan=False, allow_infinity=False)
    A = np.array(data.draw(st.lists(
        st.lists(entries, min_size=d, max_size=d), min_size=m, max_size=m)))
    b = np.abs(np.array(data.draw(st.lists(
        entries, min_size=m, max_size=m)))) + 0.1
    c = np.array(data.draw(st.lists(entries, min_size=d, max_size=d)))
    A = np.vstack([A, np.eye(d), -np.eye(d)])
    b = np.concatenate([b, np.full(2 * d, 5.0)])
    res = solve_max(c, A, b)
    status, want, _ = lp_max_oracle(c, A, b)
    assert res.status == OPTIMAL and status == "optimal"
    assert res.value == pytest.approx(want, abs=1e-7)
    assert np.all(A @ res.x <= b + 1e-8)


@given(rows=weights(3, 3))
@settings(max_examples=30)
def test_variational_information_bounds(rows):
    e = as_experiment(rows)
    value = variational_information(e).value
    n = e.rows.shape[0]
    assert -1e-10 <= value <= n + 1e-9


@given(rows=weights(2, 4), scale=st.floats(min_value=0.0, max_value=1.0))
@settings(max_examples=30)
def test_shrinking_toward_uniform_reduces_information(rows, scale):
    e = as_experiment(rows)
    mix = Experiment(scale * e.rows + (1.0 - scale) / e.rows.shape[1])
    spec = d_phi_set(builtin("hellinger2"))
    assert (d_information(spec, mix).value
            <= d_information(spec, e).value + 1e-9)


@given(vertices=st.lists(
    st.lists(st.floats(min_value=-2.0, max_value=2.0, allow_nan=False),
             min_size=2, max_size=2),
    min_size=1, max_size=5))
@settings(max_examples=40)
def test_vpoly_support_dominates_every_vertex(vertices):
    spec = vpolyhedron(vertices, rays=-np.eye(2))
    rng = np.random.default_rng(0)
    for _ in range(5):
        x = rng.normal(size=2)
        s = support(spec, x)
        if math.isinf(s):
            continue
        assert s >= max(np.asarray(vertices) @ x) - 1e-10
