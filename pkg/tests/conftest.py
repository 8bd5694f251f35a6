import numpy as np
import pytest
from scipy.special import logsumexp

from complexrisk import Expm1Link, LogSumExp, Max, NegAverage, ScenarioSpace, ScenarioVector, WeightedSum, compose

SPACES = [(2, 1), (3,), (1, 2, 3)]

ACCEPTANCE_LINES = []


def simple_members(d):
    return [WeightedSum(np.ones(d)), Max(d), LogSumExp(d, tau=1.0)]


def clustering_members(space):
    return [NegAverage(space), Expm1Link(space, gamma=0.5)]


def catalog_pairs(spaces=SPACES):
    for k in spaces:
        space = ScenarioSpace(k)
        for r in simple_members(space.d):
            for f in clustering_members(space):
                yield compose(r, f)


def pair_id(rho):
    return f"{rho.describe()} k={list(rho.space.k)}"


def sample_vectors(space, n, seed, box=5.0):
    rng = np.random.default_rng(seed)
    return [ScenarioVector.from_flat(space, rng.uniform(-box, box, space.dim)) for _ in range(n)]


def brute_conjugate(func, yhat, box=10.0, step=0.05, max_rows=1 << 21):
    """Grid supremum of <yhat, x> - func(x) over [-box, box]^d."""
    d = len(yhat)
    yhat = np.asarray(yhat, dtype=float)
    axis = np.arange(-round(box / step), round(box / step) + 1) * step
    n = len(axis)
    best = -np.inf
    # walk the lattice in flat-index chunks to bound memory
    for start in range(0, n**d, max_rows):
        idx = np.arange(start, min(n**d, start + max_rows))
        pts = axis[np.stack(np.unravel_index(idx, (n,) * d), axis=-1)]
        best = max(best, float(np.max(pts @ yhat - func(pts))))
    return best


# independent reference formulas for the oracle
REFERENCE = {
    "weighted-sum": lambda r: (lambda x: x @ r.weights),
    "max": lambda r: (lambda x: np.max(x, axis=-1)),
    "log-sum-exp": lambda r: (lambda x: r.tau * logsumexp(x / r.tau, axis=-1)),
}


@pytest.fixture
def space21():
    return ScenarioSpace((2, 1))


@pytest.fixture
def X13_2(space21):
    return ScenarioVector(space21, [[1, 3], [2]])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
