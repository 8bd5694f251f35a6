"""Penalty function, dual representation and duality-gap diagnostics.

A dual variable is a pair ``(yhat, Xhat)``.  The block-sum inner product
only sees the block sums of ``Xhat``, so pairs are stored canonically as
``(yhat, shat)`` with ``shat_i = sum_j Xhat^i_j``.

The penalty

    alpha(yhat, Xhat) = sup { -c - <yhat, y - x> + <Xhat, Y> :
                              rho(x) <= c, phi(Y) <= y }

is computed on the boundary ``c = rho(x)``, ``y = phi(Y)``, which is where
the supremum lives once ``yhat >= 0`` (otherwise raising ``y`` makes it
unbounded).  It then splits into the conjugate of the simple statistic at
``yhat`` plus one scalar supremum per block:

    sup_s  shat_i * s - yhat_i * gamma_i * h(s / k_i).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .acceptance import PrimalGrid, primal_evaluate
from .catalog import ClusteringFunction, SimpleRiskStatistic
from .composition import SAMPLE_BOX, ComplexRiskStatistic
from .report import AxiomReport, json_float
from .scenario import ScenarioVector, block_sum

__all__ = [
    "DualPair",
    "PenaltyValue",
    "DualSearch",
    "DualResult",
    "GapResult",
    "penalty_alpha",
    "dual_evaluate",
    "weak_duality_check",
    "duality_gap",
    "indicator_acceptance_simple",
    "indicator_acceptance_clustering",
    "support_acceptance_simple",
    "support_acceptance_clustering",
    "biconjugate_indicator_simple",
]


@dataclass(frozen=True)
class DualPair:
    yhat: np.ndarray
    xhat_block_sums: np.ndarray

    def __init__(self, yhat, xhat_block_sums):
        y = np.array(yhat, dtype=float).reshape(-1)
        s = np.array(xhat_block_sums, dtype=float).reshape(-1)
        if y.shape != s.shape:
            raise ValueError(f"yhat and block sums differ in length: {y.size} vs {s.size}")
        if not (np.all(np.isfinite(y)) and np.all(np.isfinite(s))):
            raise ValueError("dual pair entries must be finite")
        y.setflags(write=False)
        s.setflags(write=False)
        object.__setattr__(self, "yhat", y)
        object.__setattr__(self, "xhat_block_sums", s)

    @classmethod
    def from_scenario(cls, yhat, Xhat: ScenarioVector) -> "DualPair":
        return cls(yhat, block_sum(Xhat))

    def to_dict(self) -> dict:
        return {"yhat": self.yhat.tolist(), "xhat_block_sums": self.xhat_block_sums.tolist()}


@dataclass
class PenaltyValue:
    value: float
    method: str
    components: tuple
    unbounded: str | None = None

    @property
    def finite(self) -> bool:
        return bool(np.isfinite(self.value))


@dataclass(frozen=True)
class DualSearch:
    """Candidate set for the dual supremum.

    ``yhat`` runs over the lattice ``{0, step, 2 step, ...}^d`` capped at
    ``ymax``; ``analytic`` adds the subgradient of the simple statistic at
    ``phi(X)``.  ``block_sum_range``/``block_sum_step`` only matter for the
    grid form of the penalty.
    """

    ymax: float = 4.0
    step: float = 0.05
    analytic: bool = True
    block_sum_range: float = 50.0
    block_sum_step: float = 0.01
    chunk: int = 1 << 18

    def to_dict(self) -> dict:
        return {"ymax": self.ymax, "step": self.step, "analytic": self.analytic,
                "block_sum_range": self.block_sum_range, "block_sum_step": self.block_sum_step}


@dataclass
class DualResult:
    value: float
    argmax: DualPair | None
    alpha: float
    method: str
    candidates: int
    diagnostics: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"value": json_float(self.value),
                "argmax": None if self.argmax is None else self.argmax.to_dict(),
                "alpha": json_float(self.alpha), "method": self.method,
                "candidates": self.candidates}


@dataclass
class GapResult:
    gap: float
    raw: float
    primal: float
    dual: DualResult

    def to_dict(self) -> dict:
        out = self.dual.to_dict()
        out.update(gap=json_float(self.gap), raw_gap=json_float(self.raw), primal=json_float(self.primal))
        return out


# -- penalty ----------------------------------------------------------------

def _block_conjugate_grid(f: ClusteringFunction, shat, yhat, G: float, step: float) -> np.ndarray:
    """Brute-force version of ``f.block_conjugate`` over ``s`` in ``[-G, G]``."""
    s = np.arange(-int(round(G / step)), int(round(G / step)) + 1) * step
    out = np.empty(f.d)
    with np.errstate(over="ignore"):
        for i in range(f.d):
            vals = shat[i] * s - yhat[i] * f.gamma[i] * f.link(s / f.space.k[i])
            out[i] = np.max(vals)
    return out


def _alpha_batch(rho: ComplexRiskStatistic, yhat: np.ndarray, shat: np.ndarray) -> np.ndarray:
    """Closed-form penalty for a batch of canonical pairs; ``+inf`` off the dual domain."""
    out = np.full(yhat.shape[:-1], np.inf)
    ok = np.all(yhat >= 0, axis=-1)
    if ok.any():
        out[ok] = rho.simple.conjugate(yhat[ok]) + rho.clustering.block_conjugate(shat[ok], yhat[ok]).sum(axis=-1)
    return out


def penalty_alpha(rho: ComplexRiskStatistic, p: DualPair, grid: DualSearch | None = None,
                  method: str = "closed-form") -> PenaltyValue:
    """Penalty ``alpha`` at a canonical dual pair.

    ``method="grid"`` replaces the per-block closed forms with a lattice
    search over block sums in ``[-G, G]``; the conjugate of the simple
    statistic is always closed-form.  ``+inf`` comes with a note naming the
    unbounded direction.
    """
    if method not in ("closed-form", "grid"):
        raise ValueError(f"unknown method {method!r}")
    d = rho.space.d
    y, s = p.yhat, p.xhat_block_sums
    if y.size != d:
        raise ValueError(f"dimension mismatch: dual pair has d={y.size}, statistic has d={d}")
    neg = np.flatnonzero(y < 0)
    if neg.size:
        return PenaltyValue(np.inf, method, (np.inf, np.inf),
                            unbounded=f"y[{int(neg[0]) + 1}] -> +inf (yhat_{int(neg[0]) + 1} < 0)")
    conj_simple = float(rho.simple.conjugate(y))
    if method == "grid":
        grid = grid or DualSearch()
        blocks = _block_conjugate_grid(rho.clustering, s, y, grid.block_sum_range, grid.block_sum_step)
    else:
        blocks = rho.clustering.block_conjugate(s, y)
    conj_blocks = float(blocks.sum())
    unbounded = None
    if not np.isfinite(conj_simple):
        unbounded = "x: yhat is outside the domain of the simple statistic's conjugate"
    elif not np.isfinite(conj_blocks):
        i = int(np.flatnonzero(~np.isfinite(blocks))[0])
        unbounded = f"Y: block {i + 1} sum, net coefficient does not vanish"
    return PenaltyValue(conj_simple + conj_blocks, method, (conj_simple, conj_blocks), unbounded)


# -- dual evaluation --------------------------------------------------------

def _lattice_size(search: DualSearch) -> int:
    return int(np.floor(search.ymax / search.step + 1e-9)) + 1


def _compositions(total: int, d: int) -> np.ndarray:
    """All non-negative integer vectors of length ``d`` summing to ``total``."""
    if d == 1:
        return np.array([[total]])
    cuts = np.array(list(itertools.combinations(range(total + d - 1), d - 1)), dtype=int).reshape(-1, d - 1)
    edges = np.concatenate([np.full((len(cuts), 1), -1), cuts, np.full((len(cuts), 1), total + d - 1)], axis=1)
    return np.diff(edges, axis=1) - 1


def _lattice_candidates(simple: SimpleRiskStatistic, search: DualSearch, d: int):
    """Chunks of lattice points, skipping those where the conjugate is surely infinite.

    The skipped points would score ``-inf`` anyway, so the best value and
    its argmax do not change; the conjugate still decides the kept ones.
    """
    m = _lattice_size(search)
    if simple.dual_domain == "point":
        n = np.round(simple.weights / search.step)
        if np.all((0 <= n) & (n < m)):
            yield (n * search.step)[None, :]
        return
    if simple.dual_domain == "simplex":
        # lattice sums n_1 + ... + n_d that can land on 1 within float error
        target = 1.0 / search.step
        for total in sorted({int(np.floor(target)), int(np.ceil(target))}):
            n = _compositions(total, d)
            n = n[np.all(n < m, axis=1)]
            for start in range(0, len(n), search.chunk):
                yield n[start:start + search.chunk] * search.step
        return
    total = m**d
    for start in range(0, total, search.chunk):
        idx = np.arange(start, min(total, start + search.chunk))
        yield np.stack(np.unravel_index(idx, (m,) * d), axis=-1) * search.step


def dual_evaluate(rho: ComplexRiskStatistic, X: ScenarioVector, search: DualSearch | None = None) -> DualResult:
    """Best value of ``<Xhat, X> - alpha(yhat, Xhat)`` over the candidate set.

    For each candidate ``yhat`` the block-sum variable is the one that is
    tight at ``X`` (gradient of ``s -> <yhat, phi(s)>``).  Ties go to the
    lexicographically smallest ``(yhat, shat)``.
    """
    search = search or DualSearch()
    d = rho.space.d
    s = block_sum(X)
    phiX = rho.clustering(X)
    best_val, best_y, best_s, best_a = -np.inf, None, None, np.inf
    n_finite = 0

    def consider(Y):
        nonlocal best_val, best_y, best_s, best_a, n_finite
        S = rho.clustering.block_dual(Y, s)
        alpha = _alpha_batch(rho, Y, S)
        obj = S @ s - alpha
        fin = np.isfinite(alpha)
        n_finite += int(fin.sum())
        if not fin.any():
            return
        obj = np.where(fin, obj, -np.inf)
        j = int(np.argmax(obj))
        if obj[j] > best_val or (obj[j] == best_val and _lex_less(Y[j], S[j], best_y, best_s)):
            best_val, best_y, best_s, best_a = float(obj[j]), Y[j].copy(), S[j].copy(), float(alpha[j])

    for Y in _lattice_candidates(rho.simple, search, d):
        consider(Y)
    if search.analytic:
        try:
            consider(rho.simple.subgradient(phiX)[None, :])
        except NotImplementedError:
            pass
    diagnostics = [] if n_finite else ["no candidate pair has a finite penalty"]
    argmax = None if best_y is None else DualPair(best_y, best_s)
    return DualResult(best_val, argmax, best_a, "closed-form", n_finite, diagnostics)


def _lex_less(y1, s1, y2, s2) -> bool:
    if y2 is None:
        return True
    a = tuple(np.concatenate([y1, s1]))
    b = tuple(np.concatenate([y2, s2]))
    return a < b


def duality_gap(rho: ComplexRiskStatistic, X: ScenarioVector, search: DualSearch | None = None) -> GapResult:
    """Primal value minus best dual value, clamped at zero (raw difference kept)."""
    primal = primal_evaluate(rho, X, PrimalGrid(extent=0.0)).value
    dual = dual_evaluate(rho, X, search)
    with np.errstate(invalid="ignore"):
        raw = primal - dual.value
    raw = float(raw) if not np.isnan(raw) else np.inf
    return GapResult(max(raw, 0.0), raw, primal, dual)


# -- weak duality -----------------------------------------------------------

def _sample_simplex_lattice(rng, n, d, m):
    """Uniform-ish points of ``{n/m : sum n = m}`` via sorted cut points."""
    cuts = np.sort(rng.integers(0, m + 1, (n, d - 1)), axis=-1)
    edges = np.concatenate([np.zeros((n, 1), int), cuts, np.full((n, 1), m)], axis=-1)
    return np.diff(edges, axis=-1) / m


def _sample_feasible(rho, n, rng, search):
    d = rho.space.d
    simple = rho.simple
    if simple.dual_domain == "point":
        Y = np.tile(simple.weights, (n, 1))
    elif simple.dual_domain == "simplex":
        m = int(round(1 / search.step))
        half = n // 2
        Y = np.concatenate([_sample_simplex_lattice(rng, half, d, m), rng.dirichlet(np.ones(d), n - half)])
    else:
        raise ValueError(f"{simple.family} has no conjugate, cannot sample dual pairs")
    # tight block dual at a random block-sum vector; for linear links this is
    # the only finite choice, for curved links it sweeps the finite region
    s_ref = rng.uniform(-SAMPLE_BOX, SAMPLE_BOX, (n, d)) * rho.space.k_array
    S = rho.clustering.block_dual(Y, s_ref)
    return Y, S


def weak_duality_check(rho: ComplexRiskStatistic, X: ScenarioVector | Sequence[ScenarioVector],
                       trials: int = 10_000, seed: int = 0, tolerance: float = 1e-9,
                       search: DualSearch | None = None) -> AxiomReport:
    """Every finite-penalty pair must give a lower bound on ``rho`` at every input.

    ``trials`` pairs are drawn inside the dual domain, plus ``trials // 10``
    unconstrained pairs; pairs with infinite penalty are counted as skipped.
    A violation is a pair that overshoots ``rho`` at some input.
    """
    search = search or DualSearch()
    inputs = [X] if isinstance(X, ScenarioVector) else list(X)
    rng = np.random.default_rng(seed)
    d = rho.space.d
    Y, S = _sample_feasible(rho, int(trials), rng, search)
    n_free = int(trials) // 10
    Y = np.concatenate([Y, rng.uniform(-1, 4, (n_free, d))])
    S = np.concatenate([S, rng.uniform(-5, 5, (n_free, d))])
    alpha = _alpha_batch(rho, Y, S)
    fin = np.isfinite(alpha)
    Y, S, alpha = Y[fin], S[fin], alpha[fin]
    if not inputs or not len(Y):
        return AxiomReport("weak-duality", int(fin.sum()), 0, -np.inf, seed, tolerance,
                           skipped=int((~fin).sum()), details={"inputs": len(inputs)})
    sums = np.stack([block_sum(x) for x in inputs])        # (m, d)
    values = np.array([rho(x) for x in inputs])             # (m,)
    margins = (S @ sums.T - alpha[:, None]) - values[None, :]
    per_pair = margins.max(axis=1)
    viol = per_pair > tolerance
    details = {"inputs": len(inputs)}
    if viol.any():
        j = int(np.argmax(per_pair))
        details["example"] = {"yhat": Y[j].tolist(), "xhat_block_sums": S[j].tolist()}
    return AxiomReport("weak-duality", int(len(Y)), int(viol.sum()), float(per_pair.max()), seed,
                       tolerance, skipped=int((~fin).sum()), details=details)


# -- indicator functions and their conjugates --------------------------------

def indicator_acceptance_simple(r: SimpleRiskStatistic, c: float, x) -> float:
    return 0.0 if r(x) <= c else np.inf


def indicator_acceptance_clustering(f: ClusteringFunction, y, X: ScenarioVector) -> float:
    return 0.0 if np.all(f(X) <= np.asarray(y, dtype=float)) else np.inf


def support_acceptance_simple(r: SimpleRiskStatistic, chat: float, xhat) -> float:
    """``sup {chat c + <xhat, x> : (c, x) in A_rho}`` for finite-valued ``r``."""
    xhat = np.asarray(xhat, dtype=float)
    if chat > 0:
        return np.inf
    if chat == 0:
        return 0.0 if np.all(xhat == 0) else np.inf
    return float(-chat * r.conjugate(xhat / -chat))


def support_acceptance_clustering(f: ClusteringFunction, yhat, shat) -> float:
    """``sup {<yhat, y> + <Xhat, X> : (y, X) in A_phi}`` with ``Xhat`` given by its block sums."""
    yhat = np.asarray(yhat, dtype=float)
    if np.any(yhat > 0):
        return np.inf
    return float(f.block_conjugate(np.asarray(shat, dtype=float), -yhat).sum())


def biconjugate_indicator_simple(r: SimpleRiskStatistic, c: float, x, scales=None, yhats=None,
                                 step: float = 0.05) -> float:
    """Numerical biconjugate of the indicator of ``A_rho`` at ``(c, x)``.

    Dual points are ``(chat, xhat) = (-t, t yhat)`` with ``t`` from ``scales``
    and ``yhat`` in the conjugate's domain, plus the origin; on those points
    the support function equals ``t * conjugate(yhat)``.  Members give 0,
    non-members give roughly ``max(scales) * (rho(x) - c)``.
    """
    x = np.asarray(x, dtype=float)
    scales = np.logspace(-3, 8, 45) if scales is None else np.asarray(scales, dtype=float)
    if yhats is None:
        if r.dual_domain == "point":
            yhats = r.weights[None, :]
        elif r.dual_domain == "simplex":
            m = int(round(1 / step))
            grid = np.stack(np.meshgrid(*[np.arange(m + 1)] * r.d, indexing="ij"), -1).reshape(-1, r.d)
            yhats = grid[grid.sum(axis=-1) == m] / m
        else:
            raise ValueError(f"{r.family} has no conjugate")
    yhats = np.asarray(yhats, dtype=float)
    conj = r.conjugate(yhats)
    fin = np.isfinite(conj)
    inner = yhats[fin] @ x - conj[fin] - c                 # per yhat
    vals = scales[:, None] * inner[None, :]
    return float(max(0.0, vals.max())) if vals.size else 0.0
