"""Seeded property checks for every axiom.

Each report gives the number of trials, violations and the worst margin.
The statistical convexity check on composed statistics builds a witness
vector whose per-block risks interpolate those of two inputs.  For max and
log-sum-exp over two components the conclusion does not follow, and the
check reports it.
"""
from complexrisk import (
    BlackBoxStatistic,
    Expm1Link,
    LogSumExp,
    NegAverage,
    ScenarioSpace,
    WeightedSum,
    check_axiom,
    check_set_monotonicity,
    compose,
)

space = ScenarioSpace((2, 1))
r, f = LogSumExp(2), Expm1Link(space, 0.5)
for subject, axioms in ((r, ("A1", "A2")), (f, ("B1", "B2", "B3"))):
    for a in axioms:
        print(check_axiom(subject, a, trials=5000, seed=3).summary())
for direction in ("convex", "f", "b"):
    print(check_set_monotonicity(r, direction, trials=5000, seed=3).summary())

for simple in (WeightedSum([1, 1]), r):
    rho = compose(simple, NegAverage(space))
    print(rho.describe())
    for a in ("C1", "C2", "C3"):
        print("  ", check_axiom(rho, a, trials=5000, seed=3).summary())

# a statistic that is decreasing is caught immediately
broken = BlackBoxStatistic(lambda x: -x.sum(), d=2, name="negated sum")
print(check_axiom(broken, "A1", trials=1000, seed=0).summary())
