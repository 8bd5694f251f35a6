"""Build a complex risk statistic from two pieces and evaluate it.

A scenario vector holds one block of observations per component.  The
clustering function squeezes each block into a single number, and the
simple statistic turns those numbers into one risk figure.
"""
import numpy as np

from complexrisk import (
    Expm1Link,
    LogSumExp,
    Max,
    NegAverage,
    ScenarioSpace,
    ScenarioVector,
    WeightedSum,
    block_sum,
    compose,
)

space = ScenarioSpace((2, 1))          # two observations for component 1, one for component 2
X = ScenarioVector(space, [[1, 3], [2]])
print("X =", X.tolist(), " block sums =", block_sum(X).tolist())

phi = NegAverage(space)
print("neg-average clustering:", phi(X).tolist())

for simple in (WeightedSum([1, 1]), Max(2), LogSumExp(2, tau=0.5)):
    rho = compose(simple, phi)
    print(f"{rho.describe():<28} rho(X) = {rho(X):+.6f}")

# a nonlinear link: large losses are penalised exponentially
curved = compose(Max(2), Expm1Link(space, gamma=0.5))
rng = np.random.default_rng(0)
for _ in range(3):
    Y = ScenarioVector.from_flat(space, rng.uniform(-2, 2, space.dim))
    print(f"{curved.describe()}  at {np.round(Y.flat, 3).tolist()}: {curved(Y):+.6f}")
