import math

import numpy as np
import pytest

import dirichar as dc


def test_dirichlet_density_and_sampling():
    assert dc.dirichlet_log_density([1.0, 1.0], [0.3, 0.7]) == pytest.approx(0.0, abs=1e-15)
    draws = dc.dirichlet_sample([2.0, 3.0, 5.0], 2000, 7)
    assert draws.shape == (2000, 3)
    assert np.allclose(draws.sum(axis=1), 1.0)
    assert np.allclose(draws.mean(axis=0), dc.dirichlet_mean([2.0, 3.0, 5.0]), atol=0.02)
    assert np.array_equal(draws, dc.dirichlet_sample([2.0, 3.0, 5.0], 2000, 7))


def test_table_round_trip_and_change_of_variables():
    table = np.array([[0.1, 0.2], [0.3, 0.4]])
    marginal, conds = dc.decompose_table(table, "columns")
    assert np.allclose(dc.compose_table(marginal, conds, "columns"), table, atol=1e-15)
    assert dc.log_jacobian([0.5, 0.5], 2) == pytest.approx(math.log(0.25))
    alphas = np.array([[1.0, 2.0], [3.0, 4.0]])
    m, c = dc.decompose_dirichlet(alphas)
    assert m == [3.0, 7.0]
    assert np.array_equal(dc.compose_dirichlet(m, c), alphas)
    assert dc.verify_change_of_variables(alphas, table, "rows") < 1e-9


def test_errors_map_to_exceptions():
    with pytest.raises(dc.DomainError):
        dc.dirichlet_log_density([1.0, -1.0], [0.5, 0.5])
    with pytest.raises(dc.ConsistencyError):
        dc.compose_dirichlet([2.0, 2.0], [[1.0, 1.0], [2.0, 1.0]])
    with pytest.raises(ValueError):
        dc.decompose_table(np.array([[0.5, 0.5], [0.0, 0.0]]))


def test_cross_ratio_law():
    ones = np.ones((2, 2))
    assert dc.cross_ratio_log_normalizer(ones, 0.0) == pytest.approx(math.log(6.0), abs=1e-10)
    tables, rate = dc.cross_ratio_sample(ones, 1.0, 500, 3)
    assert tables.shape == (500, 4)
    assert 0.0 < rate <= 1.0


def test_gaussian_network():
    forward = [0.0, 2.0, 0.0, 1.0, 1.0]
    reverse = dc.flip(forward)
    assert reverse[1] == pytest.approx(3.0)
    assert dc.flip(reverse, "reverse") == pytest.approx(forward)
    assert dc.log_jacobian_factor(forward) == pytest.approx(math.log(2.0 / 3.0))
    resid = dc.normal_wishart_residual([0.0, 0.0], 1.0, 3.0, np.eye(2), [0.3, 1.2, -0.4, 0.7, 0.9])
    assert resid < 1e-8


def test_scores():
    one = "s:2,t:2\n0,0\n"
    assert dc.bde_log_score(one, "s->t", 4.0) == pytest.approx(math.log(0.25), abs=1e-14)
    data = "s:2,t:3\n0,1\n1,2\n1,0\n0,2\n"
    assert dc.bde_log_score(data, "s->t", 2.0) == pytest.approx(dc.bde_log_score(data, "t->s", 2.0), abs=1e-10)
    assert dc.bde_log_score(data, "s->t", 2.0) == pytest.approx(dc.joint_log_score(data, 2.0), abs=1e-10)
    with pytest.raises(dc.ParseError):
        dc.joint_log_score("s:2\nx\n")
    assert math.isfinite(dc.equivalent_database_score(one, "s:2,t:2\n1,?\n", 2.0))


def test_independence():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(200, 1))
    b = a**2 + 0.1 * rng.normal(size=(200, 1))
    assert dc.distance_correlation(a, b) > 0.3
    res = dc.permutation_test(a, b, 299, 5)
    assert res["p_value"] < 0.01
    assert res == dc.permutation_test(a, b, 299, 5)


def test_verification_suite():
    assert "lemma1" in dc.suite_names()
    rep = dc.run_suite("appendix", 7)
    assert rep["passed"]
    assert {c["name"] for c in rep["checks"]} >= {"log_derivative_identity", "second_order_ode_residual"}
