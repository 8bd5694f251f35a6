"""Complex risk statistics on finite product scenario spaces.

A complex risk statistic is built as ``simple o clustering``: a clustering
function compresses each block of scenario observations to one number per
component, and a simple risk statistic scores the resulting vector.  The
package evaluates such statistics, rebuilds the two factors from a given
statistic, checks the defining axioms on seeded random samples, and computes
the primal (acceptance-set) and dual (penalty) representations.
"""
__version__ = "0.1.0"

from .scenario import (
    ScenarioSpace,
    ScenarioVector,
    block_embed,
    block_sum,
    inner_block,
    inner_component,
    preorder_geq,
)
from .catalog import (
    BlackBoxStatistic,
    ClusteringFunction,
    Expm1Link,
    LogSumExp,
    Max,
    NegAverage,
    OutOfRangeError,
    SimpleRiskStatistic,
    WeightedSum,
    conjugate_simple,
    eval_clustering,
    eval_simple,
    section_clustering,
)
from .report import AxiomReport
from .composition import (
    ComplexRiskStatistic,
    NotInImageError,
    SectionUnavailableError,
    check_axiom,
    check_level_set_constancy,
    check_round_trip,
    compose,
    construct_c3_witness,
    eval_complex,
    reconstruct_clustering,
    reconstruct_simple,
)
from .acceptance import (
    PrimalGrid,
    accepts_clustering,
    accepts_simple,
    check_set_monotonicity,
    primal_evaluate,
)
from .duality import (
    DualPair,
    DualSearch,
    dual_evaluate,
    duality_gap,
    penalty_alpha,
    weak_duality_check,
)
from .io import load_scenarios
