import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qtmlab.errors import InputError
from qtmlab.hilbert import SparseVector, add, distance, inner_product, norm, normalize, prune, scale

finite = st.floats(-10, 10, allow_nan=False)
amps = st.builds(complex, finite, finite)
vectors = st.dictionaries(st.integers(0, 6), amps, max_size=6).map(SparseVector)


def test_zero_entries_dropped():
    v = SparseVector({1: 0j, 2: 1 + 0j})
    assert list(v) == [2]
    assert v.get(1) == 0j
    assert v.support() == frozenset({2})


def test_basis_and_norm():
    v = SparseVector.basis("x", 3 + 4j)
    assert norm(v) == pytest.approx(5)
    assert normalize(v)["x"] == pytest.approx(0.6 + 0.8j)


def test_non_finite_rejected():
    with pytest.raises((InputError, ValueError)):
        SparseVector({1: complex(math.nan, 0)})


def test_immutable_and_hashable():
    v = SparseVector({1: 1j})
    with pytest.raises(TypeError):
        v[1] = 2  # type: ignore[index]
    assert hash(v) == hash(SparseVector({1: 1j}))


def test_prune():
    v = SparseVector({1: 1e-12, 2: 1.0})
    assert list(prune(v, 1e-9)) == [2]


@given(vectors, vectors, amps)
def test_inner_product_sesquilinear(x, y, a):
    lhs = inner_product(x, scale(a, y))
    assert abs(lhs - a * inner_product(x, y)) <= 1e-9 * (1 + abs(lhs))
    assert abs(inner_product(x, y) - inner_product(y, x).conjugate()) <= 1e-9


@given(vectors, vectors)
def test_triangle_and_distance(x, y):
    assert norm(add(x, y)) <= norm(x) + norm(y) + 1e-9
    assert distance(x, x) == 0
    assert distance(x, y) == pytest.approx(norm(x - y))


@given(vectors)
def test_norm_matches_inner_product(x):
    assert norm(x) ** 2 == pytest.approx(inner_product(x, x).real, rel=1e-9, abs=1e-12)
