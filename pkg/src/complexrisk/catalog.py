"""Catalog of simple risk statistics and clustering functions.

Every member is monotone and convex by construction, comes with a closed-form
Fenchel conjugate, and (for clustering functions) an explicit right inverse.
Evaluators accept arrays with arbitrary leading batch axes; the trailing axis
is the component axis of length ``d`` (or the flat scenario axis).

``+inf`` is an ordinary float value here and propagates through numpy
arithmetic; only black-box statistics can produce it.
"""
from __future__ import annotations

from typing import Callable, Mapping

import numpy as np

from .scenario import ScenarioSpace, ScenarioVector

__all__ = [
    "SimpleRiskStatistic",
    "WeightedSum",
    "Max",
    "LogSumExp",
    "BlackBoxStatistic",
    "ClusteringFunction",
    "NegAverage",
    "Expm1Link",
    "OutOfRangeError",
    "SIMPLEX_ATOL",
    "eval_simple",
    "eval_clustering",
    "conjugate_simple",
    "section_clustering",
    "simple_from_descriptor",
    "clustering_from_descriptor",
]

# Slack on sum(yhat) == 1 when deciding simplex membership.
SIMPLEX_ATOL = 1e-12


class OutOfRangeError(ValueError):
    """A requested value lies outside the image of a clustering link."""


def _as_float(v):
    v = np.asarray(v, dtype=float)
    return float(v) if v.ndim == 0 else v


def _on_simplex(y: np.ndarray) -> np.ndarray:
    return np.all(y >= 0, axis=-1) & (np.abs(y.sum(axis=-1) - 1.0) <= SIMPLEX_ATOL)


class SimpleRiskStatistic:
    """Monotone convex functional on R^d with values in R or +inf."""

    family: str = ""
    # "point" (single yhat), "simplex", or None when no conjugate is known
    dual_domain: str | None = None

    def __init__(self, d: int):
        if d < 1:
            raise ValueError("dimension must be >= 1")
        self.d = int(d)

    def _check(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1:] != (self.d,):
            raise ValueError(f"dimension mismatch: expected {self.d}, got {x.shape[-1:]}")
        return x

    def __call__(self, x):
        return _as_float(self._evaluate(self._check(x)))

    def conjugate(self, yhat):
        """``sup_x <yhat, x> - rho(x)`` in closed form."""
        return _as_float(self._conjugate(self._check(yhat)))

    def subgradient(self, x) -> np.ndarray:
        """A maximiser of ``<y, x> - conjugate(y)``; the analytic dual candidate."""
        return self._subgradient(self._check(x))

    def _evaluate(self, x):
        raise NotImplementedError

    def _conjugate(self, y):
        raise NotImplementedError(f"{self.family} has no closed-form conjugate")

    def _subgradient(self, x):
        raise NotImplementedError(f"{self.family} has no analytic dual candidate")

    @property
    def params(self) -> dict:
        return {}

    def descriptor(self) -> dict:
        return {"family": self.family, "params": self.params}

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"{type(self).__name__}(d={self.d}{', ' + args if args else ''})"


class WeightedSum(SimpleRiskStatistic):
    """``<w, x>`` with nonnegative weights."""

    family = "weighted-sum"
    dual_domain = "point"

    def __init__(self, weights):
        w = np.array(weights, dtype=float).reshape(-1)
        if w.size == 0 or not np.all(np.isfinite(w)):
            raise ValueError("weights must be a nonempty finite vector")
        if np.any(w < 0):
            raise ValueError("weighted-sum weights must be >= 0")
        super().__init__(w.size)
        w.setflags(write=False)
        self.weights = w

    def _evaluate(self, x):
        return x @ self.weights

    def _conjugate(self, y):
        return np.where(np.all(y == self.weights, axis=-1), 0.0, np.inf)

    def _subgradient(self, x):
        return np.broadcast_to(self.weights, x.shape).copy()

    @property
    def params(self):
        return {"weights": self.weights.tolist()}


class Max(SimpleRiskStatistic):
    family = "max"
    dual_domain = "simplex"

    def _evaluate(self, x):
        return x.max(axis=-1)

    def _conjugate(self, y):
        return np.where(_on_simplex(y), 0.0, np.inf)

    def _subgradient(self, x):
        out = np.zeros_like(x)
        np.put_along_axis(out, np.argmax(x, axis=-1)[..., None], 1.0, axis=-1)
        return out


class LogSumExp(SimpleRiskStatistic):
    """``tau * log(sum_i exp(x_i / tau))``."""

    family = "log-sum-exp"
    dual_domain = "simplex"

    def __init__(self, d: int, tau: float = 1.0):
        super().__init__(d)
        if not tau > 0:
            raise ValueError("log-sum-exp temperature must be > 0")
        self.tau = float(tau)

    def _evaluate(self, x):
        z = x / self.tau
        m = z.max(axis=-1, keepdims=True)
        m = np.where(np.isfinite(m), m, 0.0)
        return self.tau * (m[..., 0] + np.log(np.exp(z - m).sum(axis=-1)))

    def _conjugate(self, y):
        with np.errstate(divide="ignore", invalid="ignore"):
            ent = np.where(y > 0, y * np.log(np.where(y > 0, y, 1.0)), 0.0).sum(axis=-1)
        return np.where(_on_simplex(y), self.tau * ent, np.inf)

    def _subgradient(self, x):
        z = x / self.tau
        e = np.exp(z - z.max(axis=-1, keepdims=True))
        return e / e.sum(axis=-1, keepdims=True)

    @property
    def params(self):
        return {"tau": self.tau}


class BlackBoxStatistic(SimpleRiskStatistic):
    """Wrap a user function of one component vector.

    Nothing is verified about ``func``; this exists so arbitrary (possibly
    broken) statistics can be pushed through the axiom checks.  There is no
    conjugate support.
    """

    family = "black-box"

    def __init__(self, func: Callable[[np.ndarray], float], d: int, name: str = "black-box"):
        super().__init__(d)
        self.func = func
        self.name = name

    def _evaluate(self, x):
        flat = x.reshape(-1, self.d)
        out = np.array([float(self.func(row)) for row in flat])
        return out.reshape(x.shape[:-1])

    @property
    def params(self):
        return {"name": self.name}


class ClusteringFunction:
    """``phi(X)_i = gamma_i * h(s_i / k_i)`` with ``s`` the block sums of ``X``.

    ``h`` is convex, strictly decreasing and vanishes at 0, which gives the
    three clustering axioms: order monotonicity, convexity, and the
    correlation identity certified by the all-ones weighted-sum witness.
    """

    family: str = ""
    # infimum of the link's image; values u = x_i / gamma_i must exceed it
    link_lower: float = -np.inf

    def __init__(self, space: ScenarioSpace, gamma=None):
        self.space = space
        g = np.ones(space.d) if gamma is None else np.array(gamma, dtype=float).reshape(-1)
        if g.size == 1 and space.d > 1:
            g = np.full(space.d, float(g[0]))
        if g.size != space.d:
            raise ValueError(f"gamma has length {g.size}, expected {space.d}")
        if not np.all(g > 0) or not np.all(np.isfinite(g)):
            raise ValueError("every gamma_i must be a finite number > 0")
        g.setflags(write=False)
        self.gamma = g
        self.witness = WeightedSum(np.ones(space.d))

    @property
    def d(self) -> int:
        return self.space.d

    # link and its calculus, all elementwise
    def link(self, u):
        raise NotImplementedError

    def link_inverse(self, v):
        raise NotImplementedError

    def link_derivative(self, u):
        raise NotImplementedError

    def from_block_sums(self, s):
        s = np.asarray(s, dtype=float)
        with np.errstate(over="ignore"):
            return self.gamma * self.link(s / self.space.k_array)

    def evaluate_flat(self, flat):
        return self.from_block_sums(self.space.block_sums_flat(flat))

    def __call__(self, X: ScenarioVector) -> np.ndarray:
        if X.space != self.space:
            raise ValueError(f"space mismatch: {X.space} vs {self.space}")
        return self.evaluate_flat(X.flat)

    def in_image(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return x / self.gamma > self.link_lower

    def section(self, x) -> ScenarioVector:
        """Constant-block preimage of ``x``."""
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.size != self.d:
            raise ValueError(f"dimension mismatch: expected {self.d}, got {x.size}")
        bad = np.flatnonzero(~self.in_image(x))
        if bad.size:
            i = int(bad[0])
            raise OutOfRangeError(
                f"component {i + 1}: value {x[i]} is outside the image of the "
                f"{self.family} link (need x/gamma > {self.link_lower})"
            )
        t = self.link_inverse(x / self.gamma)
        return ScenarioVector.from_flat(self.space, self.space.constant_blocks(t))

    def block_dual(self, yhat, s) -> np.ndarray:
        """Block-sum dual variable that makes ``yhat`` tight at block sums ``s``.

        This is the gradient of ``s -> <yhat, phi(s)>``.
        """
        k = self.space.k_array
        return np.asarray(yhat, dtype=float) * self.gamma * self.link_derivative(np.asarray(s) / k) / k

    def block_conjugate(self, shat, yhat) -> np.ndarray:
        """Per block, ``sup_s shat_i * s - yhat_i * gamma_i * h(s / k_i)``.

        Requires ``yhat >= 0``; vectorised over leading axes.
        """
        raise NotImplementedError

    @property
    def params(self) -> dict:
        return {"gamma": self.gamma.tolist()}

    def descriptor(self) -> dict:
        return {"family": self.family, "params": self.params}

    def __repr__(self) -> str:
        return f"{type(self).__name__}(k={list(self.space.k)}, gamma={self.gamma.tolist()})"


class NegAverage(ClusteringFunction):
    """``phi(X)_i = -gamma_i * mean(X^i)``."""

    family = "neg-average"

    def link(self, u):
        return 0.0 - np.asarray(u, dtype=float)  # no negative zero

    def link_inverse(self, v):
        return -np.asarray(v, dtype=float)

    def link_derivative(self, u):
        return -np.ones_like(np.asarray(u, dtype=float))

    def block_conjugate(self, shat, yhat):
        shat = np.asarray(shat, dtype=float)
        yhat = np.asarray(yhat, dtype=float)
        # linear in s: finite only where the slope cancels
        expected = -(self.gamma * yhat) / self.space.k_array
        ok = np.abs(shat - expected) <= 1e-12 * np.maximum(1.0, np.abs(expected))
        return np.where(ok, 0.0, np.inf)


class Expm1Link(ClusteringFunction):
    """``phi(X)_i = gamma_i * (exp(-mean(X^i)) - 1)``; image is ``(-gamma_i, inf)``."""

    family = "expm1-link"
    link_lower = -1.0

    def link(self, u):
        return np.expm1(0.0 - np.asarray(u, dtype=float))

    def link_inverse(self, v):
        return -np.log1p(np.asarray(v, dtype=float))

    def link_derivative(self, u):
        return -np.exp(-np.asarray(u, dtype=float))

    def block_conjugate(self, shat, yhat):
        shat = np.asarray(shat, dtype=float)
        yhat = np.asarray(yhat, dtype=float)
        shat, a, k = np.broadcast_arrays(shat, yhat * self.gamma, self.space.k_array)
        out = np.full(shat.shape, np.inf)
        flat_a = a == 0
        out[flat_a & (shat == 0)] = 0.0
        # shat == 0: supremum approached as s -> +inf
        edge = (a > 0) & (shat == 0)
        out[edge] = a[edge]
        inner = (a > 0) & (shat < 0)
        sh, aa, kk = shat[inner], a[inner], k[inner]
        s_star = -kk * np.log(-sh * kk / aa)
        out[inner] = sh * s_star + sh * kk + aa
        return out


_SIMPLE = {"weighted-sum", "max", "log-sum-exp"}
_CLUSTERING = {"neg-average": NegAverage, "expm1-link": Expm1Link}


def simple_from_descriptor(desc: Mapping, d: int) -> SimpleRiskStatistic:
    """Build a simple statistic from a ``{family, params}`` record."""
    family = desc.get("family")
    params = dict(desc.get("params") or {})
    if family not in _SIMPLE:
        raise ValueError(f"family: unknown simple statistic {family!r}, expected one of {sorted(_SIMPLE)}")
    if family == "weighted-sum":
        if "weights" not in params:
            raise ValueError("params.weights: required for weighted-sum")
        w = params.pop("weights")
        if len(w) != d:
            raise ValueError(f"params.weights: length {len(w)} does not match d={d}")
        r = WeightedSum(w)
    elif family == "max":
        r = Max(d)
    else:
        r = LogSumExp(d, params.pop("tau", 1.0))
    params.pop("d", None)
    if params:
        raise ValueError(f"params: unexpected keys {sorted(params)} for {family}")
    return r


def clustering_from_descriptor(desc: Mapping, space: ScenarioSpace) -> ClusteringFunction:
    family = desc.get("family")
    params = dict(desc.get("params") or {})
    if family not in _CLUSTERING:
        raise ValueError(f"family: unknown clustering function {family!r}, expected one of {sorted(_CLUSTERING)}")
    gamma = params.pop("gamma", None)
    if params:
        raise ValueError(f"params: unexpected keys {sorted(params)} for {family}")
    return _CLUSTERING[family](space, gamma)


def eval_simple(r: SimpleRiskStatistic, x):
    return r(x)


def eval_clustering(f: ClusteringFunction, X: ScenarioVector) -> np.ndarray:
    return f(X)


def conjugate_simple(r: SimpleRiskStatistic, yhat):
    return r.conjugate(yhat)


def section_clustering(f: ClusteringFunction, x) -> ScenarioVector:
    return f.section(x)
