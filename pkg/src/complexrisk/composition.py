"""Complex risk statistics: composition, reconstruction and axiom checks.

``compose(simple, clustering)`` gives ``rho = simple o clustering``.  Going
the other way, ``reconstruct_clustering`` evaluates ``rho`` on every block
embedding, and ``reconstruct_simple`` evaluates ``rho`` at a constant-block
preimage found by bisection along the rays ``t -> rho((t, ..., t)_[k_i])``.

All randomised checks draw entries uniformly from [-5, 5] and ``lambda``
uniformly from [0, 1] with a seeded ``numpy`` generator, vectorised over
trials.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from . import _roots
from ._roots import NotInImageError, SectionUnavailableError
from .catalog import ClusteringFunction, SimpleRiskStatistic
from .report import AxiomReport
from .scenario import ScenarioSpace, ScenarioVector, block_embed

__all__ = [
    "ComplexRiskStatistic",
    "compose",
    "eval_complex",
    "reconstruct_clustering",
    "reconstruct_simple",
    "construct_c3_witness",
    "check_axiom",
    "check_level_set_constancy",
    "check_round_trip",
    "NotInImageError",
    "SectionUnavailableError",
    "AXIOMS",
    "SAMPLE_BOX",
    "WITNESS_RESIDUAL",
]

SAMPLE_BOX = 5.0
WITNESS_RESIDUAL = 1e-9
AXIOMS = ("A1", "A2", "B1", "B2", "B3", "C1", "C2", "C3")


@dataclass(frozen=True)
class ComplexRiskStatistic:
    clustering: ClusteringFunction
    simple: SimpleRiskStatistic
    provenance: str = "composed"

    def __post_init__(self):
        if self.simple.d != self.clustering.d:
            raise ValueError(
                f"dimension mismatch: simple statistic has d={self.simple.d}, "
                f"clustering function has d={self.clustering.d}"
            )

    @property
    def space(self) -> ScenarioSpace:
        return self.clustering.space

    def evaluate_flat(self, flat) -> np.ndarray:
        return self.simple(self.clustering.evaluate_flat(flat))

    def __call__(self, X: ScenarioVector) -> float:
        if X.space != self.space:
            raise ValueError(f"space mismatch: {X.space} vs {self.space}")
        return float(self.evaluate_flat(X.flat))

    def describe(self) -> str:
        return f"{self.simple.family} o {self.clustering.family}"


def compose(r: SimpleRiskStatistic, f: ClusteringFunction) -> ComplexRiskStatistic:
    return ComplexRiskStatistic(clustering=f, simple=r, provenance="composed")


def eval_complex(rho: ComplexRiskStatistic, X: ScenarioVector) -> float:
    return rho(X)


# -- reconstruction ---------------------------------------------------------

def _embed_flat(space: ScenarioSpace, flat: np.ndarray, i: int) -> np.ndarray:
    """Zero every block but block ``i`` (0-based) of a batch of flat vectors."""
    lo = sum(space.k[:i])
    out = np.zeros_like(flat)
    out[..., lo:lo + space.k[i]] = flat[..., lo:lo + space.k[i]]
    return out


def _embedded_values(rho: ComplexRiskStatistic, flat: np.ndarray) -> np.ndarray:
    """``(rho(X_[k_1]), ..., rho(X_[k_d]))`` for a batch of flat vectors."""
    space = rho.space
    return np.stack([rho.evaluate_flat(_embed_flat(space, flat, i)) for i in range(space.d)], axis=-1)


def reconstruct_clustering(rho: ComplexRiskStatistic) -> Callable[[ScenarioVector], np.ndarray]:
    """The clustering function read off ``rho`` through block embeddings."""

    def phi(X: ScenarioVector) -> np.ndarray:
        return np.array([rho(block_embed(X, i)) for i in range(1, X.space.d + 1)])

    return phi


def _ray(rho: ComplexRiskStatistic, i: int) -> Callable[[np.ndarray], np.ndarray]:
    space = rho.space
    lo = sum(space.k[:i])

    def f(t):
        t = np.asarray(t, dtype=float)
        flat = np.zeros(t.shape + (space.dim,))
        flat[..., lo:lo + space.k[i]] = t[..., None]
        return rho.evaluate_flat(flat)

    return f


def _solve_rays(rho: ComplexRiskStatistic, targets: np.ndarray):
    """Constant-block levels ``t`` with ``rho((t_i 1)_[k_i]) = targets_i``."""
    targets = np.asarray(targets, dtype=float)
    t = np.empty_like(targets)
    status = np.empty(targets.shape, dtype=np.int8)
    resid = np.empty_like(targets)
    for i in range(rho.space.d):
        t[..., i], status[..., i], resid[..., i] = _roots.solve_monotone(_ray(rho, i), targets[..., i])
    return t, status, resid


def reconstruct_simple(rho: ComplexRiskStatistic, x) -> float:
    """Value of the simple statistic rebuilt from ``rho`` at ``x``.

    Raises :class:`NotInImageError` when some ``x_i`` cannot be reached along
    its ray and :class:`SectionUnavailableError` when the ray is flat at the
    requested level.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != rho.space.d:
        raise ValueError(f"dimension mismatch: expected {rho.space.d}, got {x.size}")
    t, status, _ = _solve_rays(rho, x)
    _roots.raise_for_status(status)
    X = ScenarioVector.from_flat(rho.space, rho.space.constant_blocks(t))
    return rho(X)


def construct_c3_witness(rho: ComplexRiskStatistic, X: ScenarioVector, Y: ScenarioVector, lam: float) -> ScenarioVector:
    """Constant-block ``Z`` with ``rho(Z_[k_i]) = lam rho(X_[k_i]) + (1 - lam) rho(Y_[k_i])`` for all i."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lambda must lie in [0, 1]")
    target = _combine(lam, _embedded_values(rho, X.flat), _embedded_values(rho, Y.flat))
    t, status, resid = _solve_rays(rho, target)
    _roots.raise_for_status(status)
    return ScenarioVector.from_flat(rho.space, rho.space.constant_blocks(t))


# -- randomised checks ------------------------------------------------------

def _combine(lam, a, b):
    """``lam a + (1 - lam) b`` with the convention ``0 * inf = 0``."""
    lam = np.asarray(lam, dtype=float)
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    with np.errstate(invalid="ignore"):
        return np.where(lam == 0, 0.0, lam * a) + np.where(lam == 1, 0.0, (1 - lam) * b)


def _excess(lhs, rhs):
    """``lhs - rhs`` in the extended reals; ``-inf`` whenever ``rhs`` is ``+inf``."""
    lhs, rhs = np.asarray(lhs, dtype=float), np.asarray(rhs, dtype=float)
    with np.errstate(invalid="ignore"):
        m = lhs - rhs
    return np.where(rhs == np.inf, -np.inf, m)


def _finish(axiom, margins, seed, tolerance, skipped=0, details=None, example=None):
    margins = np.asarray(margins, dtype=float)
    margins = margins[~np.isnan(margins)] if margins.size else margins
    viol = margins > tolerance
    details = dict(details or {})
    if viol.any() and example is not None:
        details["example"] = example(int(np.argmax(margins)))
    return AxiomReport(
        axiom=axiom,
        trials=int(margins.size) + skipped,
        violations=int(viol.sum()),
        worst_margin=float(margins.max()) if margins.size else -np.inf,
        seed=seed,
        tolerance=tolerance,
        skipped=skipped,
        details=details,
    )


def _sparse_nonneg(rng, shape):
    """Nonnegative perturbations, zero on about half the coordinates."""
    return rng.uniform(0, SAMPLE_BOX, shape) * (rng.random(shape) < 0.5)


def _check_A(r: SimpleRiskStatistic, axiom, n, rng, seed, tol):
    x = rng.uniform(-SAMPLE_BOX, SAMPLE_BOX, (n, r.d))
    if axiom == "A1":
        y = x - _sparse_nonneg(rng, x.shape)
        m = _excess(r(y), r(x))
        return _finish(axiom, m, seed, tol, example=lambda j: {"x": x[j].tolist(), "y": y[j].tolist()})
    y = rng.uniform(-SAMPLE_BOX, SAMPLE_BOX, (n, r.d))
    lam = rng.random(n)
    m = _excess(r(lam[:, None] * x + (1 - lam[:, None]) * y), _combine(lam, r(x), r(y)))
    return _finish(axiom, m, seed, tol,
                   example=lambda j: {"x": x[j].tolist(), "y": y[j].tolist(), "lambda": float(lam[j])})


def _check_B(f: ClusteringFunction, axiom, n, rng, seed, tol):
    space = f.space
    X = rng.uniform(-SAMPLE_BOX, SAMPLE_BOX, (n, space.dim))
    phiX = f.evaluate_flat(X)
    if axiom == "B1":
        # raising entries raises block sums, so X >= Y in the scenario order
        Y = X + _sparse_nonneg(rng, X.shape)
        m = (f.evaluate_flat(Y) - phiX).max(axis=-1)
        return _finish(axiom, m, seed, tol, example=lambda j: {"X": X[j].tolist(), "Y": Y[j].tolist()})
    if axiom == "B2":
        Y = rng.uniform(-SAMPLE_BOX, SAMPLE_BOX, (n, space.dim))
        lam = rng.random(n)
        lhs = f.evaluate_flat(lam[:, None] * X + (1 - lam[:, None]) * Y)
        m = (lhs - (lam[:, None] * phiX + (1 - lam[:, None]) * f.evaluate_flat(Y))).max(axis=-1)
        return _finish(axiom, m, seed, tol,
                       example=lambda j: {"X": X[j].tolist(), "Y": Y[j].tolist(), "lambda": float(lam[j])})
    # B3: witness applied to phi of each block embedding must give back phi(X)
    recon = np.stack([f.witness(f.evaluate_flat(_embed_flat(space, X, i))) for i in range(space.d)], axis=-1)
    m = np.abs(recon - phiX).max(axis=-1)
    return _finish(axiom, m, seed, tol, details={"witness": f.witness.descriptor()},
                   example=lambda j: {"X": X[j].tolist()})


def _check_C(rho: ComplexRiskStatistic, axiom, n, rng, seed, tol):
    space = rho.space
    X = rng.uniform(-SAMPLE_BOX, SAMPLE_BOX, (n, space.dim))
    rX = rho.evaluate_flat(X)
    if axiom == "C1":
        Y = X + _sparse_nonneg(rng, X.shape)
        m = _excess(rho.evaluate_flat(Y), rX)
        return _finish(axiom, m, seed, tol, example=lambda j: {"X": X[j].tolist(), "Y": Y[j].tolist()})
    Y = rng.uniform(-SAMPLE_BOX, SAMPLE_BOX, (n, space.dim))
    lam = rng.random(n)
    rY = rho.evaluate_flat(Y)
    if axiom == "C2":
        lhs = rho.evaluate_flat(lam[:, None] * X + (1 - lam[:, None]) * Y)
        m = _excess(lhs, _combine(lam, rX, rY))
        return _finish(axiom, m, seed, tol,
                       example=lambda j: {"X": X[j].tolist(), "Y": Y[j].tolist(), "lambda": float(lam[j])})
    # C3
    target = _combine(lam[:, None], _embedded_values(rho, X), _embedded_values(rho, Y))
    t, status, resid = _solve_rays(rho, target) if n else (np.empty((0, space.d)),) * 3
    built = np.all(status == _roots.OK, axis=-1) & np.all(resid <= WITNESS_RESIDUAL, axis=-1)
    Z = space.constant_blocks(t[built])
    m = _excess(rho.evaluate_flat(Z), _combine(lam[built], rX[built], rY[built]))
    idx = np.flatnonzero(built)
    details = {
        "max_witness_residual": float(resid[built].max()) if built.any() else 0.0,
        "not_in_image": int(np.any(status == _roots.NOT_IN_IMAGE, axis=-1).sum()),
        "not_strict": int(np.any(status == _roots.NOT_STRICT, axis=-1).sum()),
    }

    def example(j):
        k = idx[j]
        return {"X": X[k].tolist(), "Y": Y[k].tolist(), "lambda": float(lam[k]), "Z": Z[j].tolist()}

    return _finish(axiom, m, seed, tol, skipped=int((~built).sum()), details=details, example=example)


Subject = Union[SimpleRiskStatistic, ClusteringFunction, ComplexRiskStatistic]


def check_axiom(subject: Subject, axiom: str, trials: int = 10_000, seed: int = 0,
                tolerance: float = 1e-9) -> AxiomReport:
    """Randomised check of one axiom.

    A-axioms take a simple statistic, B-axioms a clustering function and
    C-axioms a complex statistic.  Order-conditioned axioms (A1, B1, C1)
    draw comparable pairs directly.  For C3 the third point is the
    constant-block witness from :func:`construct_c3_witness`; trials where
    it cannot be built are counted as skipped.
    """
    if axiom not in AXIOMS:
        raise ValueError(f"unknown axiom {axiom!r}")
    expected = {"A": SimpleRiskStatistic, "B": ClusteringFunction, "C": ComplexRiskStatistic}[axiom[0]]
    if not isinstance(subject, expected):
        raise TypeError(f"{axiom} applies to {expected.__name__}, got {type(subject).__name__}")
    rng = np.random.default_rng(seed)
    check = {"A": _check_A, "B": _check_B, "C": _check_C}[axiom[0]]
    return check(subject, axiom, int(trials), rng, seed, tolerance)


def _redistribute(space: ScenarioSpace, X: np.ndarray, rng) -> np.ndarray:
    """Shuffle each block and add zero-sum noise inside it."""
    out = X.copy()
    lo = 0
    for k in space.k:
        blk = out[:, lo:lo + k]
        blk = np.take_along_axis(blk, rng.permuted(np.tile(np.arange(k), (len(X), 1)), axis=1), axis=1)
        noise = rng.uniform(-SAMPLE_BOX, SAMPLE_BOX, blk.shape)
        out[:, lo:lo + k] = blk + noise - noise.mean(axis=1, keepdims=True)
        lo += k
    return out


def check_level_set_constancy(rho: ComplexRiskStatistic, trials: int = 1000, seed: int = 0,
                              tolerance: float = 1e-9) -> AxiomReport:
    """``rho`` must agree on vectors whose block sums agree."""
    rng = np.random.default_rng(seed)
    X = rng.uniform(-SAMPLE_BOX, SAMPLE_BOX, (trials, rho.space.dim))
    Xp = _redistribute(rho.space, X, rng)
    m = np.abs(rho.evaluate_flat(X) - rho.evaluate_flat(Xp))
    return _finish("level-set", m, seed, tolerance,
                   example=lambda j: {"X": X[j].tolist(), "X_prime": Xp[j].tolist()})


def check_round_trip(rho: ComplexRiskStatistic, trials: int = 1000, seed: int = 0,
                     tolerance: float = 1e-6) -> AxiomReport:
    """Compare ``rho(X)`` with the rebuilt simple statistic at the rebuilt ``phi(X)``.

    Inputs whose rebuilt value cannot be computed (no strict preimage) count
    as violations with margin ``+inf``.
    """
    rng = np.random.default_rng(seed)
    space = rho.space
    X = rng.uniform(-SAMPLE_BOX, SAMPLE_BOX, (trials, space.dim))
    x_hat = _embedded_values(rho, X)
    t, status, _ = _solve_rays(rho, x_hat)
    ok = np.all(status == _roots.OK, axis=-1)
    rebuilt = np.full(trials, np.nan)
    if ok.any():
        rebuilt[ok] = rho.evaluate_flat(space.constant_blocks(t[ok]))
    m = np.where(ok, np.abs(rebuilt - rho.evaluate_flat(X)), np.inf)
    details = {"unavailable": int((~ok).sum())}
    return _finish("round-trip", m, seed, tolerance, details=details,
                   example=lambda j: {"X": X[j].tolist(), "phi_hat": x_hat[j].tolist()})
