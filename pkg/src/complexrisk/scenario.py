"""Product scenario spaces R^{k_1} x ... x R^{k_d} and their blockwise arithmetic.

A :class:`ScenarioVector` stores one block of observations per component.
Everything the rest of the package needs from a scenario vector factors
through its per-block sums, so :func:`block_sum` is the workhorse here.

Order convention
----------------
``preorder_geq(X, Y)`` is true when every block sum of ``X`` is *at most*
the matching block sum of ``Y``.  This is inverted with respect to the usual
"bigger loss is worse" reading, and it is deliberate: clustering functions
are decreasing in the block sums, so ``X >= Y`` in this order gives
``phi(X) >= phi(Y)``.  The relation is only a preorder; two different
vectors with equal block sums compare both ways.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "ScenarioSpace",
    "ScenarioVector",
    "block_sum",
    "preorder_geq",
    "inner_block",
    "inner_component",
    "block_embed",
]


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ScenarioSpace:
    """Shape ``(k_1, ..., k_d)`` of a product scenario space."""

    k: tuple[int, ...]

    def __init__(self, k: Iterable[int]):
        k = tuple(int(v) for v in k)
        if len(k) < 1:
            raise ValueError("a scenario space needs at least one component")
        if any(v < 1 for v in k):
            raise ValueError(f"every block length must be >= 1, got {k}")
        object.__setattr__(self, "k", k)

    @property
    def d(self) -> int:
        return len(self.k)

    @property
    def dim(self) -> int:
        """Total number of scalar coordinates, sum of the k_i."""
        return sum(self.k)

    @property
    def offsets(self) -> np.ndarray:
        return np.concatenate(([0], np.cumsum(self.k)[:-1])).astype(np.intp)

    @property
    def k_array(self) -> np.ndarray:
        return np.asarray(self.k, dtype=float)

    def block_sums_flat(self, flat: np.ndarray) -> np.ndarray:
        """Block sums of flat arrays, vectorised over leading axes."""
        flat = np.asarray(flat, dtype=float)
        if flat.shape[-1] != self.dim:
            raise ValueError(f"expected trailing axis of length {self.dim}, got {flat.shape[-1]}")
        # summing each block in sorted order makes the result independent of
        # the order of observations inside a block, bit for bit
        bounds = np.cumsum((0,) + self.k)
        sums = [np.sort(flat[..., a:b], axis=-1).sum(axis=-1) for a, b in zip(bounds[:-1], bounds[1:])]
        return np.stack(sums, axis=-1)

    def constant_blocks(self, t: np.ndarray) -> np.ndarray:
        """Flat arrays whose block i is filled with ``t[..., i]``."""
        t = np.asarray(t, dtype=float)
        return np.repeat(t, self.k, axis=-1)

    def zeros(self) -> "ScenarioVector":
        return ScenarioVector.from_flat(self, np.zeros(self.dim))

    def __repr__(self) -> str:
        return f"ScenarioSpace(k={list(self.k)})"


@dataclass(frozen=True, eq=False)
class ScenarioVector:
    """One element of a product scenario space, stored block by block.

    The flat serialisation order is block 1 left to right, then block 2, and
    so on.
    """

    space: ScenarioSpace
    blocks: tuple[np.ndarray, ...]

    def __init__(self, space: ScenarioSpace, blocks: Sequence[Sequence[float]]):
        if len(blocks) != space.d:
            raise ValueError(f"expected {space.d} blocks, got {len(blocks)}")
        out = []
        for i, (b, ki) in enumerate(zip(blocks, space.k)):
            arr = np.array(b, dtype=float).reshape(-1)
            if arr.size != ki:
                raise ValueError(f"block {i + 1} has length {arr.size}, expected {ki}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"block {i + 1} contains non-finite entries")
            out.append(_readonly(arr))
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "blocks", tuple(out))

    @classmethod
    def from_flat(cls, space: ScenarioSpace, flat: Sequence[float]) -> "ScenarioVector":
        flat = np.asarray(flat, dtype=float).reshape(-1)
        if flat.size != space.dim:
            raise ValueError(f"flat vector has length {flat.size}, space needs {space.dim}")
        return cls(space, np.split(flat, np.cumsum(space.k)[:-1]))

    @property
    def flat(self) -> np.ndarray:
        return np.concatenate(self.blocks)

    def tolist(self) -> list[list[float]]:
        return [b.tolist() for b in self.blocks]

    def __add__(self, other: "ScenarioVector") -> "ScenarioVector":
        _check_same_space(self, other)
        return ScenarioVector.from_flat(self.space, self.flat + other.flat)

    def __sub__(self, other: "ScenarioVector") -> "ScenarioVector":
        _check_same_space(self, other)
        return ScenarioVector.from_flat(self.space, self.flat - other.flat)

    def __mul__(self, scalar: float) -> "ScenarioVector":
        return ScenarioVector.from_flat(self.space, float(scalar) * self.flat)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ScenarioVector):
            return NotImplemented
        return self.space == other.space and bool(np.array_equal(self.flat, other.flat))

    def __hash__(self) -> int:
        return hash((self.space, self.flat.tobytes()))

    def __repr__(self) -> str:
        return f"ScenarioVector({self.tolist()})"


def _check_same_space(X: ScenarioVector, Y: ScenarioVector) -> None:
    if X.space != Y.space:
        raise ValueError(f"shape mismatch: {X.space} vs {Y.space}")


def _component(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise ValueError("component vectors are one-dimensional")
    return arr


def block_sum(X: ScenarioVector) -> np.ndarray:
    """Per-block sums ``s_i = sum_j X^i_j`` as a length-d vector."""
    return X.space.block_sums_flat(X.flat)


def preorder_geq(X: ScenarioVector, Y: ScenarioVector) -> bool:
    """``X >= Y`` in the scenario preorder: ``block_sum(X) <= block_sum(Y)`` everywhere.

    The comparison is exact; no tolerance is applied.
    """
    _check_same_space(X, Y)
    return bool(np.all(block_sum(X) <= block_sum(Y)))


def inner_block(X: ScenarioVector, Y: ScenarioVector) -> float:
    """Block-sum inner product ``sum_i s_i(X) s_i(Y)``."""
    _check_same_space(X, Y)
    return float(np.dot(block_sum(X), block_sum(Y)))


def inner_component(x, y) -> float:
    x, y = _component(x), _component(y)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.size} vs {y.size}")
    return float(np.dot(x, y))


def block_embed(X: ScenarioVector, i: int) -> ScenarioVector:
    """Keep block ``i`` (1-based) and zero every other block."""
    if not 1 <= i <= X.space.d:
        raise IndexError(f"component index {i} out of range 1..{X.space.d}")
    blocks = [b if j == i - 1 else np.zeros_like(b) for j, b in enumerate(X.blocks)]
    return ScenarioVector(X.space, blocks)
