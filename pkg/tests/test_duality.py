import math

import numpy as np
import pytest

from complexrisk import (
    DualPair,
    DualSearch,
    Expm1Link,
    LogSumExp,
    Max,
    NegAverage,
    ScenarioSpace,
    ScenarioVector,
    WeightedSum,
    compose,
    dual_evaluate,
    duality_gap,
    penalty_alpha,
    weak_duality_check,
)
from complexrisk.duality import (
    biconjugate_indicator_simple,
    indicator_acceptance_clustering,
    indicator_acceptance_simple,
    support_acceptance_clustering,
    support_acceptance_simple,
)

from conftest import catalog_pairs, pair_id, sample_vectors

LINEAR = lambda sp: compose(WeightedSum(np.ones(sp.d)), NegAverage(sp, 1.0))


def test_dual_pair_validation():
    with pytest.raises(ValueError):
        DualPair([1, 1], [0])
    with pytest.raises(ValueError):
        DualPair([np.nan, 1], [0, 0])
    X = ScenarioVector(ScenarioSpace((2, 1)), [[1, 3], [2]])
    assert DualPair.from_scenario([1, 1], X).xhat_block_sums.tolist() == [4, 2]


def test_penalty_examples(space21):
    rho = LINEAR(space21)
    a = penalty_alpha(rho, DualPair([1, 1], [-0.5, -1]))
    assert a.value == 0 and a.finite and a.unbounded is None
    neg = penalty_alpha(rho, DualPair([-1, 1], [-0.5, -1]))
    assert neg.value == math.inf and "yhat_1 < 0" in neg.unbounded
    flat = penalty_alpha(rho, DualPair([1, 1], [0, 0]))
    assert flat.value == math.inf and "block 1" in flat.unbounded


def test_penalty_off_simplex_flags_x(space21):
    a = penalty_alpha(compose(Max(2), NegAverage(space21)), DualPair([1, 1], [-0.5, -1]))
    assert a.value == math.inf and a.unbounded.startswith("x")


def test_penalty_dimension_mismatch(space21):
    with pytest.raises(ValueError, match="dimension mismatch"):
        penalty_alpha(LINEAR(space21), DualPair([1, 1, 1], [0, 0, 0]))


def test_penalty_grid_matches_closed_form_from_below():
    space = ScenarioSpace((2, 1))
    rho = compose(LogSumExp(2), Expm1Link(space, 0.5))
    rng = np.random.default_rng(4)
    for _ in range(20):
        y = rng.dirichlet([1, 1])
        s = rho.clustering.block_dual(y, rng.uniform(-3, 3, 2) * space.k_array)
        p = DualPair(y, s)
        closed = penalty_alpha(rho, p).value
        errs = []
        for h in (0.1, 0.01, 0.001):
            grid = penalty_alpha(rho, p, DualSearch(block_sum_step=h), method="grid").value
            assert grid <= closed + 1e-9
            errs.append(closed - grid)
        assert errs[-1] <= errs[0] + 1e-12
        assert errs[-1] <= 1e-5


def test_dual_examples(space21, X13_2):
    rho = LINEAR(space21)
    res = dual_evaluate(rho, X13_2)
    assert res.value == -4
    assert res.argmax.yhat.tolist() == [1, 1]
    assert res.argmax.xhat_block_sums.tolist() == [-0.5, -1]
    assert res.alpha == 0
    for rho in catalog_pairs([(2, 1)]):
        assert dual_evaluate(rho, space21.zeros()).value == pytest.approx(rho(space21.zeros()), abs=1e-9)


def test_dual_max_recovers_component_max(space21):
    rho = compose(Max(2), NegAverage(space21))
    for X in sample_vectors(space21, 20, seed=2):
        res = dual_evaluate(rho, X, DualSearch(ymax=1.0, analytic=False))
        assert res.value == pytest.approx(np.max(rho.clustering(X)), abs=1e-12)


def test_dual_empty_candidate_set(space21, X13_2):
    # a lattice that misses the single feasible weight vector leaves nothing finite
    rho = compose(WeightedSum([0.3, 0.3]), NegAverage(space21))
    res = dual_evaluate(rho, X13_2, DualSearch(step=0.25, ymax=1.0, analytic=False))
    assert res.value == -math.inf and res.argmax is None and res.diagnostics


@pytest.mark.parametrize("k", [(2, 1), (1, 2, 3)])
def test_strong_duality_linear_family(k):
    rho = LINEAR(ScenarioSpace(k))
    for X in sample_vectors(rho.space, 50, seed=11):
        g = duality_gap(rho, X)
        assert g.gap <= 1e-9 and abs(g.raw) <= 1e-9


@pytest.mark.parametrize("simple", [Max(2), LogSumExp(2)], ids=lambda r: r.family)
def test_gap_refines(simple, space21):
    rho = compose(simple, NegAverage(space21))
    for X in sample_vectors(space21, 5, seed=12):
        gaps = [duality_gap(rho, X, DualSearch(ymax=1.0, step=h, analytic=False)).gap for h in (0.04, 0.02, 0.01)]
        assert gaps[-1] <= 1e-2
        # 0.02 and 0.01 lattices contain the 0.04 one, so the sup can only grow
        assert gaps[1] <= gaps[0] + 1e-12 and gaps[2] <= gaps[1] + 1e-12


@pytest.mark.parametrize("rho", list(catalog_pairs()), ids=pair_id)
def test_weak_duality_catalog(rho):
    rep = weak_duality_check(rho, sample_vectors(rho.space, 20, seed=13), trials=2000, seed=13)
    assert rep.passed, rep.summary()
    assert rep.trials > 0 and rep.skipped > 0


def test_weak_duality_margin_zero_at_optimum(space21, X13_2):
    rho = LINEAR(space21)
    rep = weak_duality_check(rho, X13_2, trials=100, seed=0)
    # all feasible pairs of the linear family are the optimal one
    assert abs(rep.worst_margin) <= 1e-9


def test_weak_duality_catches_a_wrong_penalty(space21, monkeypatch):
    import complexrisk.duality as dual

    rho = LINEAR(space21)
    monkeypatch.setattr(dual, "_alpha_batch", lambda rho, y, s: np.where(np.all(y >= 0, axis=-1), -1.0, np.inf))
    assert not dual.weak_duality_check(rho, sample_vectors(space21, 5, 0), trials=50, seed=0).passed


def test_canonicalisation_is_bit_identical(space21, X13_2):
    rng = np.random.default_rng(7)
    for rho in catalog_pairs([(2, 1)]):
        for _ in range(20):
            y = rng.uniform(0, 1, 2)
            X1 = ScenarioVector.from_flat(space21, rng.uniform(-3, 3, 3))
            # same block sums, different entries
            X2 = ScenarioVector(space21, [X1.blocks[0][::-1], X1.blocks[1]])
            p1, p2 = DualPair.from_scenario(y, X1), DualPair.from_scenario(y, X2)
            a1, a2 = penalty_alpha(rho, p1).value, penalty_alpha(rho, p2).value
            assert np.float64(a1).tobytes() == np.float64(a2).tobytes()
            assert p1.xhat_block_sums.tobytes() == p2.xhat_block_sums.tobytes()


def test_indicator_and_support_functions(space21, X13_2):
    r = WeightedSum([1, 1])
    assert indicator_acceptance_simple(r, 3, [1, 2]) == 0
    assert indicator_acceptance_simple(r, 2, [1, 2]) == math.inf
    f = NegAverage(space21)
    assert indicator_acceptance_clustering(f, [-2, -2], X13_2) == 0
    assert indicator_acceptance_clustering(f, [-3, -2], X13_2) == math.inf
    assert support_acceptance_simple(r, -1.0, [1, 1]) == 0
    assert support_acceptance_simple(r, -2.0, [1, 1]) == math.inf
    assert support_acceptance_simple(r, 1.0, [1, 1]) == math.inf
    assert support_acceptance_clustering(f, [1, 0], [0, 0]) == math.inf
    assert support_acceptance_clustering(f, [-1, -1], [-0.5, -1]) == 0


def test_biconjugate_indicator_weighted_sum():
    r = WeightedSum([1, 2])
    rng = np.random.default_rng(3)
    for _ in range(200):
        x = rng.uniform(-5, 5, 2)
        c = r(x) + rng.uniform(0, 3)
        assert biconjugate_indicator_simple(r, c, x) == 0
        c_out = r(x) - rng.uniform(0.1, 3)
        assert biconjugate_indicator_simple(r, c_out, x) > 1e6
