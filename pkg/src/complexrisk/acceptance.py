"""Acceptance sets of simple statistics and clustering functions.

``A_rho = {(c, x) : rho(x) <= c}`` and ``A_phi = {(y, X) : phi(X) <= y}``.
The primal evaluator recovers the composed statistic as the smallest budget
``c`` reachable through some intermediate ``x`` that links both sets.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .catalog import ClusteringFunction, SimpleRiskStatistic
from .composition import SAMPLE_BOX, ComplexRiskStatistic, _combine, _excess, _finish, _sparse_nonneg
from .report import AxiomReport, json_float
from .scenario import ScenarioVector

__all__ = [
    "accepts_simple",
    "accepts_clustering",
    "check_set_monotonicity",
    "PrimalGrid",
    "PrimalResult",
    "primal_evaluate",
]


def accepts_simple(r: SimpleRiskStatistic, c: float, x) -> bool:
    return bool(r(x) <= c)


def accepts_clustering(f: ClusteringFunction, y, X: ScenarioVector) -> bool:
    y = np.asarray(y, dtype=float)
    if y.shape != (f.d,):
        raise ValueError(f"shape mismatch: y has shape {y.shape}, expected ({f.d},)")
    return bool(np.all(f(X) <= y))


def _members_simple(r, n, rng):
    x = rng.uniform(-SAMPLE_BOX, SAMPLE_BOX, (n, r.d))
    # a quarter of the points sit exactly on the boundary c = rho(x)
    slack = rng.uniform(0, 2, n) * (rng.random(n) >= 0.25)
    return r(x) + slack, x


def _members_clustering(f, n, rng):
    X = rng.uniform(-SAMPLE_BOX, SAMPLE_BOX, (n, f.space.dim))
    y = f.evaluate_flat(X) + rng.uniform(0, 2, (n, f.d)) * (rng.random((n, f.d)) >= 0.25)
    return y, X


def check_set_monotonicity(subject, direction: str, trials: int = 10_000, seed: int = 0,
                           tolerance: float = 1e-9) -> AxiomReport:
    """Membership-preservation check for ``A_rho`` or ``A_phi``.

    ``subject`` picks the set (a simple statistic gives ``A_rho``, a
    clustering function ``A_phi``).  ``direction`` is ``"f"`` (lower the
    second slot), ``"b"`` (raise the first slot) or ``"convex"``.  The
    second slot of ``A_phi`` is ordered by the scenario preorder.
    """
    if direction not in ("f", "b", "convex"):
        raise ValueError(f"direction must be 'f', 'b' or 'convex', got {direction!r}")
    rng = np.random.default_rng(seed)
    n = int(trials)
    if isinstance(subject, SimpleRiskStatistic):
        name = f"A_rho:{direction}"
        c, x = _members_simple(subject, n, rng)
        if direction == "f":
            q = x - _sparse_nonneg(rng, x.shape)
            m = _excess(subject(q), c)
        elif direction == "b":
            p = c + rng.uniform(0, SAMPLE_BOX, n)
            m = _excess(subject(x), p)
        else:
            c2, x2 = _members_simple(subject, n, rng)
            lam = rng.random(n)
            m = _excess(subject(lam[:, None] * x + (1 - lam[:, None]) * x2), _combine(lam, c, c2))
    elif isinstance(subject, ClusteringFunction):
        name = f"A_phi:{direction}"
        y, X = _members_clustering(subject, n, rng)
        if direction == "f":
            # Q has larger block sums, hence X >= Q in the scenario order
            Q = X + _sparse_nonneg(rng, X.shape)
            m = (subject.evaluate_flat(Q) - y).max(axis=-1)
        elif direction == "b":
            p = y + _sparse_nonneg(rng, y.shape)
            m = (subject.evaluate_flat(X) - p).max(axis=-1)
        else:
            y2, X2 = _members_clustering(subject, n, rng)
            lam = rng.random(n)[:, None]
            m = (subject.evaluate_flat(lam * X + (1 - lam) * X2) - (lam * y + (1 - lam) * y2)).max(axis=-1)
    else:
        raise TypeError(f"expected a simple statistic or clustering function, got {type(subject).__name__}")
    return _finish(name, m, seed, tolerance)


@dataclass(frozen=True)
class PrimalGrid:
    """Lattice for the numeric primal oracle.

    Points are multiples of ``step`` (a lattice anchored at the origin, not
    at ``phi(X)``).  By default the box is ``phi(X) + [0, extent]^d``; pass
    ``lower``/``upper`` for a fixed box instead.
    """

    step: float = 0.05
    extent: float = 5.0
    lower: tuple | None = None
    upper: tuple | None = None
    max_points: int = 5_000_000

    def to_dict(self) -> dict:
        return {"step": self.step, "extent": self.extent,
                "lower": None if self.lower is None else list(self.lower),
                "upper": None if self.upper is None else list(self.upper)}


@dataclass
class PrimalResult:
    value: float
    numeric: float
    gap: float
    grid: dict
    argmin: list | None = None
    warnings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"analytic": json_float(self.value), "numeric": json_float(self.numeric),
                "gap": json_float(self.gap), "grid": self.grid, "argmin": self.argmin,
                "warnings": list(self.warnings)}


def _lattice_axes(lo, hi, step):
    axes = []
    for a, b in zip(lo, hi):
        n0, n1 = int(np.ceil(a / step - 1e-9)), int(np.floor(b / step + 1e-9))
        axes.append(np.arange(n0, n1 + 1) * step)
    return axes


def primal_evaluate(rho: ComplexRiskStatistic, X: ScenarioVector, grid: PrimalGrid | None = None) -> PrimalResult:
    """Smallest budget ``c`` with ``(c, x)`` in ``A_rho`` and ``(x, X)`` in ``A_phi`` for some ``x``.

    The returned ``value`` is the analytic infimum ``rho(phi(X))`` (the
    simple statistic is monotone, so the infimum sits at ``x = phi(X)``).
    ``numeric`` is an independent brute-force minimum of ``rho(x)`` over
    lattice points ``x >= phi(X)``; it is never below the analytic value.
    Either is ``+inf`` when nothing is feasible.
    """
    grid = grid or PrimalGrid()
    phiX = rho.clustering(X)
    analytic = float(rho.simple(phiX))
    notes = []
    if grid.lower is None:
        lo, hi = phiX, phiX + grid.extent
    else:
        lo, hi = np.asarray(grid.lower, float), np.asarray(grid.upper, float)
        if not (np.all(lo <= phiX) and np.all(phiX <= hi)):
            msg = "grid box does not cover phi(X); numeric value is not comparable"
            notes.append(msg)
            warnings.warn(msg, stacklevel=2)
        lo = np.maximum(lo, phiX)
    axes = _lattice_axes(lo, hi, grid.step)
    size = int(np.prod([len(a) for a in axes]))
    if size > grid.max_points:
        raise ValueError(f"primal grid has {size} points, more than max_points={grid.max_points}")
    numeric, argmin = np.inf, None
    if size:
        pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, rho.simple.d)
        pts = pts[np.all(pts >= phiX, axis=-1)]
        if len(pts):
            vals = rho.simple(pts)
            j = int(np.argmin(vals))  # first minimum = lexicographically smallest grid index
            if np.isfinite(vals[j]):
                numeric, argmin = float(vals[j]), pts[j].tolist()
    with np.errstate(invalid="ignore"):
        gap = numeric - analytic if np.isfinite(analytic) else (0.0 if numeric == analytic else np.inf)
    return PrimalResult(value=analytic, numeric=numeric, gap=float(gap), grid=grid.to_dict(),
                        argmin=argmin, warnings=notes)
