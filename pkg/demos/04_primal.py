"""Evaluate through the acceptance sets.

The smallest budget accepted by the simple statistic, over all intermediate
points accepted by the clustering function, equals the composed value.  A
brute-force lattice search confirms it from above.
"""
import math

import numpy as np

from complexrisk import (
    BlackBoxStatistic,
    NegAverage,
    PrimalGrid,
    ScenarioSpace,
    ScenarioVector,
    WeightedSum,
    compose,
    primal_evaluate,
)

space = ScenarioSpace((2, 1))
rho = compose(WeightedSum([1, 1]), NegAverage(space))
X = ScenarioVector(space, [[1, 3], [2]])
for step in (0.2, 0.05, 0.01):
    res = primal_evaluate(rho, X, PrimalGrid(step=step, extent=1.0))
    print(f"step {step:<5} analytic {res.value:+.4f}  numeric {res.numeric:+.4f}  gap {res.gap:.2e}")

# nothing is feasible when the simple statistic is infinite above phi(X)
restricted = BlackBoxStatistic(lambda x: x.sum() if np.all(x < -10) else math.inf, d=2, name="restricted")
print("empty feasible set:", primal_evaluate(compose(restricted, NegAverage(space)), X).value)
