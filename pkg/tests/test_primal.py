import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from complexrisk import (
    BlackBoxStatistic,
    Max,
    NegAverage,
    PrimalGrid,
    ScenarioSpace,
    ScenarioVector,
    WeightedSum,
    accepts_clustering,
    accepts_simple,
    check_set_monotonicity,
    compose,
    eval_complex,
    primal_evaluate,
)

from conftest import SPACES, catalog_pairs, clustering_members, pair_id, sample_vectors, simple_members


def test_accepts_simple_examples():
    assert accepts_simple(WeightedSum([1, 1]), 6, [1, 2])
    r = Max(2)
    assert accepts_simple(r, r([0.3, -0.7]), [0.3, -0.7])
    assert not accepts_simple(Max(2), 0, [1, -5])
    with pytest.raises(ValueError, match="dimension mismatch"):
        accepts_simple(Max(2), 0, [1, 2, 3])


def test_accepts_simple_infinite_value_is_rejected():
    r = BlackBoxStatistic(lambda x: math.inf if x[0] > 0 else x[0], d=1, name="restricted")
    assert not accepts_simple(r, 1e300, [1.0])
    assert accepts_simple(r, 0.0, [-1.0])


def test_accepts_clustering_examples(space21, X13_2):
    f = NegAverage(space21)
    assert accepts_clustering(f, [-2, -2], X13_2)
    phi = f(X13_2)
    assert accepts_clustering(f, phi + 1, X13_2)
    assert not accepts_clustering(f, phi - 1, X13_2)
    with pytest.raises(ValueError, match="shape mismatch"):
        accepts_clustering(f, [0, 0, 0], X13_2)


@given(st.lists(st.floats(-100, 100), min_size=3, max_size=3))
@settings(max_examples=200)
def test_membership_consistency(x):
    for r in simple_members(3):
        v = r(x)
        assert accepts_simple(r, v, x)
        assert not accepts_simple(r, v - 1e-6, x)


def test_set_monotonicity_examples():
    r = WeightedSum([1, 1])
    x = np.array([0.5, -1.0])
    c = r(x)
    assert accepts_simple(r, c + 1, x)
    assert accepts_simple(r, c, x - 1)
    space = ScenarioSpace((2, 1))
    f = NegAverage(space)
    X = ScenarioVector(space, [[1, 3], [2]])
    Q = ScenarioVector(space, [[1, 4], [2]])  # one block sum larger: X is above Q
    assert accepts_clustering(f, f(X), Q)


@pytest.mark.parametrize("k", SPACES)
@pytest.mark.parametrize("direction", ["f", "b", "convex"])
def test_set_monotonicity_holds_for_catalog(k, direction):
    space = ScenarioSpace(k)
    for subject in simple_members(space.d) + clustering_members(space):
        rep = check_set_monotonicity(subject, direction, 2000, seed=3)
        assert rep.passed, rep.summary()


def test_set_monotonicity_detects_a_broken_statistic():
    # decreasing in its argument, so lowering x can leave the set
    r = BlackBoxStatistic(lambda x: -x[0], d=1, name="negated")
    assert not check_set_monotonicity(r, "f", 500, seed=0).passed


def test_set_monotonicity_rejects_bad_arguments():
    with pytest.raises(ValueError):
        check_set_monotonicity(Max(2), "sideways")
    with pytest.raises(TypeError):
        check_set_monotonicity(object(), "f")


def test_primal_examples(space21, X13_2):
    rho = compose(WeightedSum([1, 1]), NegAverage(space21))
    res = primal_evaluate(rho, X13_2)
    assert res.value == -4 == eval_complex(rho, X13_2)
    assert res.numeric == pytest.approx(-4, abs=1e-12)
    for rho in catalog_pairs([(2, 1)]):
        if rho(space21.zeros()) == 0:
            assert primal_evaluate(rho, space21.zeros()).value == 0


def test_primal_empty_feasible_set(space21, X13_2):
    # a simple statistic that is +inf everywhere above phi(X) leaves nothing feasible
    r = BlackBoxStatistic(lambda x: x.sum() if np.all(x < -10) else math.inf, d=2, name="restricted")
    rho = compose(r, NegAverage(space21))
    res = primal_evaluate(rho, X13_2)
    assert res.value == math.inf
    assert res.numeric == math.inf
    assert res.to_dict()["analytic"] == "+inf"


def test_primal_grid_not_covering_warns(space21, X13_2):
    rho = compose(WeightedSum([1, 1]), NegAverage(space21))
    with pytest.warns(UserWarning, match="does not cover"):
        res = primal_evaluate(rho, X13_2, PrimalGrid(lower=(0, 0), upper=(1, 1)))
    assert res.value == -4
    assert res.warnings


def test_primal_grid_covering_is_quiet(space21, X13_2):
    rho = compose(WeightedSum([1, 1]), NegAverage(space21))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        res = primal_evaluate(rho, X13_2, PrimalGrid(lower=(-3, -3), upper=(0, 0)))
    assert res.numeric == pytest.approx(-4, abs=1e-12)


@pytest.mark.parametrize("rho", list(catalog_pairs([(2, 1), (1, 2, 3)])), ids=pair_id)
def test_primal_numeric_never_below_analytic(rho):
    grid = PrimalGrid(step=0.1, extent=2.0)
    for X in sample_vectors(rho.space, 10, seed=9):
        res = primal_evaluate(rho, X, grid)
        assert res.value == eval_complex(rho, X)
        assert res.numeric >= res.value
        assert res.gap >= 0


def test_primal_gap_shrinks_with_step(space21):
    rho = compose(WeightedSum([1, 1]), NegAverage(space21))
    X = sample_vectors(space21, 1, seed=1)[0]
    gaps = [primal_evaluate(rho, X, PrimalGrid(step=h, extent=1.0)).gap for h in (0.2, 0.1, 0.05)]
    for h, g in zip((0.2, 0.1, 0.05), gaps):
        # Lipschitz constant of the all-ones weighted sum in sup norm is 2
        assert g <= 2 * 2 * h
