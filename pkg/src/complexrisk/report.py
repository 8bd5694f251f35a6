from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = ["AxiomReport", "json_float"]


def json_float(v):
    """Finite floats pass through; infinities and NaN become strings."""
    if v is None:
        return None
    v = float(v)
    if math.isfinite(v):
        return v
    if math.isnan(v):
        return "nan"
    return "+inf" if v > 0 else "-inf"


@dataclass
class AxiomReport:
    """Outcome of one randomised property check.

    ``worst_margin`` is the largest amount by which the checked inequality
    was exceeded (negative when every trial held with room to spare).
    A trial is a violation when its margin is above ``tolerance``.
    """

    axiom: str
    trials: int
    violations: int
    worst_margin: float
    seed: int
    tolerance: float
    skipped: int = 0
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def merge(self, other: "AxiomReport") -> "AxiomReport":
        if other.axiom != self.axiom:
            raise ValueError(f"cannot merge {self.axiom} with {other.axiom}")
        return AxiomReport(
            axiom=self.axiom,
            trials=self.trials + other.trials,
            violations=self.violations + other.violations,
            worst_margin=max(self.worst_margin, other.worst_margin),
            seed=self.seed,
            tolerance=max(self.tolerance, other.tolerance),
            skipped=self.skipped + other.skipped,
        )

    def to_dict(self) -> dict:
        out = {
            "axiom": self.axiom,
            "trials": self.trials,
            "violations": self.violations,
            "worst_margin": json_float(self.worst_margin),
            "seed": self.seed,
            "tolerance": self.tolerance,
            "skipped": self.skipped,
        }
        if self.details:
            out["details"] = self.details
        return out

    def summary(self) -> str:
        state = "PASS" if self.passed else "FAIL"
        return (
            f"{state} {self.axiom:<12} trials={self.trials:<6d} violations={self.violations:<6d} "
            f"skipped={self.skipped:<6d} worst_margin={self.worst_margin:.3e}"
        )
