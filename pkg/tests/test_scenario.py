import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from complexrisk import (
    ScenarioSpace,
    ScenarioVector,
    block_embed,
    block_sum,
    inner_block,
    inner_component,
    preorder_geq,
)


def vec(k, blocks):
    return ScenarioVector(ScenarioSpace(k), blocks)


def test_space_validation():
    assert ScenarioSpace([2, 1]).dim == 3
    assert ScenarioSpace([2, 1]).d == 2
    with pytest.raises(ValueError):
        ScenarioSpace([])
    with pytest.raises(ValueError):
        ScenarioSpace([2, 0])


def test_vector_validation():
    with pytest.raises(ValueError, match="block 2"):
        vec((2, 1), [[1, 2], [3, 4]])
    with pytest.raises(ValueError):
        vec((2, 1), [[1, 2]])
    with pytest.raises(ValueError, match="non-finite"):
        vec((1,), [[np.inf]])


def test_vectors_are_immutable():
    X = vec((2, 1), [[1, 2], [5]])
    with pytest.raises(ValueError):
        X.blocks[0][0] = 7.0


def test_flat_round_trip():
    space = ScenarioSpace((2, 1))
    X = ScenarioVector.from_flat(space, [1, 3, 2])
    assert X.tolist() == [[1, 3], [2]]
    assert X.flat.tolist() == [1, 3, 2]


@pytest.mark.parametrize(
    "k, blocks, expected",
    [((2, 1), [[1, 2], [5]], [3, 5]), ((2, 2), [[0, 0], [0, 0]], [0, 0]), ((3,), [[-1, 0, 1]], [0])],
)
def test_block_sum(k, blocks, expected):
    assert block_sum(vec(k, blocks)).tolist() == expected


def test_preorder_examples():
    assert not preorder_geq(vec((2, 1), [[0, 1], [5]]), vec((2, 1), [[2, 3], [4]]))
    X = vec((2, 1), [[0.3, -1], [2]])
    assert preorder_geq(X, X)
    assert preorder_geq(vec((2,), [[0, 0]]), vec((2,), [[1, 0]]))


def test_preorder_shape_mismatch():
    with pytest.raises(ValueError, match="shape mismatch"):
        preorder_geq(vec((2,), [[0, 0]]), vec((1, 1), [[0], [0]]))


def test_inner_products():
    assert inner_block(vec((2,), [[1, 2]]), vec((2,), [[3, 4]])) == 21
    assert inner_block(vec((2,), [[0, 0]]), vec((2,), [[3, 4]])) == 0
    assert inner_block(vec((1, 1), [[2], [-1]]), vec((1, 1), [[3], [5]])) == 1
    assert inner_component([1, 2], [3, 4]) == 11
    assert inner_component([1, 2], [0, 0]) == 0
    assert inner_component([1, -1], [1, 1]) == 0
    with pytest.raises(ValueError):
        inner_component([1, 2], [1, 2, 3])


def test_block_embed():
    X = vec((2, 1), [[1, 3], [2]])
    assert block_embed(X, 2).tolist() == [[0, 0], [2]]
    assert block_embed(ScenarioSpace((2, 1)).zeros(), 1) == ScenarioSpace((2, 1)).zeros()
    Y = vec((3,), [[1, 2, 3]])
    assert block_embed(Y, 1) == Y
    with pytest.raises(IndexError):
        block_embed(X, 3)
    with pytest.raises(IndexError):
        block_embed(X, 0)


def test_block_sum_is_permutation_invariant_bitwise():
    rng = np.random.default_rng(3)
    space = ScenarioSpace((7, 5))
    for _ in range(200):
        flat = rng.uniform(-5, 5, space.dim) * 10 ** rng.uniform(-3, 3, space.dim)
        perm = np.concatenate([rng.permutation(7), 7 + rng.permutation(5)])
        a = block_sum(ScenarioVector.from_flat(space, flat))
        b = block_sum(ScenarioVector.from_flat(space, flat[perm]))
        assert a.tobytes() == b.tobytes()


# -- property tests ---------------------------------------------------------

shapes = st.lists(st.integers(1, 4), min_size=1, max_size=4)
reals = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


@st.composite
def vectors(draw, n=1, k=None):
    k = k or draw(shapes)
    space = ScenarioSpace(k)
    out = [ScenarioVector.from_flat(space, draw(st.lists(reals, min_size=space.dim, max_size=space.dim)))
           for _ in range(n)]
    return out


@given(vectors(n=3))
@settings(max_examples=200)
def test_preorder_reflexive_transitive(xs):
    X, Y, Z = xs
    assert preorder_geq(X, X)
    if preorder_geq(X, Y) and preorder_geq(Y, Z):
        assert preorder_geq(X, Z)


@given(vectors(n=2))
@settings(max_examples=200)
def test_mutual_comparability_iff_equal_block_sums(xs):
    X, Y = xs
    both = preorder_geq(X, Y) and preorder_geq(Y, X)
    assert both == bool(np.array_equal(block_sum(X), block_sum(Y)))


@given(vectors(n=1))
def test_mutual_comparability_of_permuted_blocks(xs):
    (X,) = xs
    Y = ScenarioVector(X.space, [b[::-1] for b in X.blocks])
    assert preorder_geq(X, Y) and preorder_geq(Y, X)


@given(vectors(n=2))
@settings(max_examples=200)
def test_inner_block_factors_through_block_sums(xs):
    X, Y = xs
    a = inner_block(X, Y)
    b = inner_component(block_sum(X), block_sum(Y))
    assert a == pytest.approx(b, rel=1e-12, abs=1e-12)


@given(vectors(n=1))
def test_block_embeddings_sum_to_vector(xs):
    (X,) = xs
    total = X.space.zeros()
    for i in range(1, X.space.d + 1):
        total = total + block_embed(X, i)
    assert total == X


@given(vectors(n=3), st.floats(-10, 10), st.floats(-10, 10))
@settings(max_examples=200)
def test_inner_block_symmetric_bilinear(xs, a, b):
    X, Y, Z = xs
    scale = 1 + abs(inner_block(X, X)) + abs(inner_block(Y, Y)) + abs(inner_block(Z, Z))
    assert inner_block(X, Y) == pytest.approx(inner_block(Y, X), rel=1e-12)
    lhs = inner_block(a * X + b * Y, Z)
    rhs = a * inner_block(X, Z) + b * inner_block(Y, Z)
    assert abs(lhs - rhs) <= 1e-12 * scale * (1 + abs(a) + abs(b))
