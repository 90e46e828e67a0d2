import numpy as np
import pytest

from setinfo import simplex

from _oracles import lp_max_oracle


def test_known_optimum():
    # max x + y s.t. x <= 2, y <= 3, x + y <= 4
    res = simplex.solve_max([1.0, 1.0],
                            [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]],
                            [2.0, 3.0, 4.0])
    assert res.status == simplex.OPTIMAL
    assert res.value == pytest.approx(4.0, abs=1e-12)
    assert res.x @ np.array([1.0, 1.0]) == pytest.approx(4.0, abs=1e-12)


def test_negative_rhs_needs_phase_one():
    # x >= 1, x <= 3, maximize -x: optimum at x = 1
    res = simplex.solve_max([-1.0], [[-1.0], [1.0]], [-1.0, 3.0])
    assert res.status == simplex.OPTIMAL
    assert res.value == pytest.approx(-1.0, abs=1e-12)
    assert res.x[0] == pytest.approx(1.0, abs=1e-12)


def test_unbounded_with_ray_certificate():
    A = np.array([[-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
    b = np.array([0.0, 1.0, 1.0])
    res = simplex.solve_max([1.0, 0.0], A, b)
    assert res.status == simplex.UNBOUNDED
    ray = res.ray
    assert ray is not None
    assert np.all(A @ ray <= 1e-9)
    assert ray @ np.array([1.0, 0.0]) > 1e-9


def test_infeasible():
    res = simplex.solve_max([1.0], [[1.0], [-1.0]], [-1.0, 0.0])
    assert res.status == simplex.INFEASIBLE
    assert not simplex.feasible([[1.0], [-1.0]], [-1.0, 0.0])
    assert simplex.feasible([[1.0], [-1.0]], [1.0, 0.0])


def test_degenerate_constraints_terminate():
    # duplicated and redundant rows around the same vertex
    A = [[1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 1.0]]
    b = [1.0, 1.0, 1.0, 2.0, 2.0]
    res = simplex.solve_max([1.0, 1.0], A, b)
    assert res.status == simplex.OPTIMAL
    assert res.value == pytest.approx(2.0, abs=1e-12)


def test_equality_via_paired_rows():
    # x + y = 1 encoded as two inequalities, maximize x - y
    A = [[1.0, 1.0], [-1.0, -1.0], [1.0, 0.0]]
    b = [1.0, -1.0, 0.75]
    res = simplex.solve_max([1.0, -1.0], A, b)
    assert res.status == simplex.OPTIMAL
    assert res.value == pytest.approx(0.5, abs=1e-12)
    assert res.x[0] == pytest.approx(0.75, abs=1e-12)


@pytest.mark.parametrize("trial", range(40))
def test_random_bounded_matches_scipy(trial):
    rng = np.random.default_rng(500 + trial)
    d = int(rng.integers(2, 5))
    k = int(rng.integers(d, 3 * d + 1))
    A = rng.normal(size=(k, d))
    b = rng.uniform(0.1, 2.0, size=k)  # origin strictly feasible
    box = np.vstack([np.eye(d), -np.eye(d)])
    A_full = np.vstack([A, box])
    b_full = np.concatenate([b, np.full(2 * d, 10.0)])
    c = rng.normal(size=d)
    res = simplex.solve_max(c, A_full, b_full)
    status, value, _ = lp_max_oracle(c, A_full, b_full)
    assert status == "optimal"
    assert res.status == simplex.OPTIMAL
    assert res.value == pytest.approx(value, abs=1e-7)
    assert np.all(A_full @ res.x <= b_full + 1e-8)
    assert c @ res.x == pytest.approx(res.value, abs=1e-9)


@pytest.mark.parametrize("trial", range(15))
def test_random_status_matches_scipy(trial):
    # no bounding box: unboundedness must be detected identically
    rng = np.random.default_rng(900 + trial)
    d = int(rng.integers(2, 4))
    k = int(rng.integers(2, 2 * d + 1))
    A = rng.normal(size=(k, d))
    b = rng.uniform(0.1, 2.0, size=k)
    c = rng.normal(size=d)
    res = simplex.solve_max(c, A, b)
    status, value, _ = lp_max_oracle(c, A, b)
    if status == "optimal":
        assert res.status == simplex.OPTIMAL
        assert res.value == pytest.approx(value, abs=1e-7)
    else:
        assert status == "unbounded"
        assert res.status == simplex.UNBOUNDED


def test_result_reports_terminal_basis():
    res = simplex.solve_max([1.0, 1.0], [[1.0, 0.0], [0.0, 1.0]], [1.0, 1.0])
    assert res.basis is not None
    assert len(res.basis) == 2
