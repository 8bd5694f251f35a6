"""Dual representation and duality gaps.

Each dual pair with finite penalty gives an affine lower bound.  On the
linear family the best pair closes the gap exactly; for max and
log-sum-exp the lattice search closes it as the lattice refines.
"""
from complexrisk import (
    DualPair,
    DualSearch,
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

space = ScenarioSpace((2, 1))
X = ScenarioVector(space, [[1, 3], [2]])
linear = compose(WeightedSum([1, 1]), NegAverage(space))

for y, s in (([1, 1], [-0.5, -1]), ([-1, 1], [-0.5, -1]), ([1, 1], [0, 0])):
    a = penalty_alpha(linear, DualPair(y, s))
    print(f"alpha(yhat={y}, S={s}) = {a.value}" + (f"   [{a.unbounded}]" if a.unbounded else ""))

res = dual_evaluate(linear, X)
print("linear dual value", res.value, "at", res.argmax.to_dict())

for simple in (Max(2), LogSumExp(2)):
    rho = compose(simple, NegAverage(space))
    gaps = [duality_gap(rho, X, DualSearch(ymax=1.0, step=h, analytic=False)).gap for h in (0.04, 0.02, 0.01)]
    print(f"{rho.describe():<26} gaps at steps 0.04/0.02/0.01:", ["%.2e" % g for g in gaps])
    print("   ", weak_duality_check(rho, X, trials=5000, seed=2).summary())
