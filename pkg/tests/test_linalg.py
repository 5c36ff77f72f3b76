import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fimhom.linalg import (
    DimensionMismatchError,
    PrimeField,
    Subspace,
    image_basis,
    kernel_basis,
    matmul,
    quotient_data,
    rank,
    rref,
    sum_and_close,
)


PRIMES = [2, 3, 5, 7]


@st.composite
def matrices(draw, max_rows=5, max_cols=5):
    p = draw(st.sampled_from(PRIMES))
    rows = draw(st.integers(0, max_rows))
    cols = draw(st.integers(1, max_cols))
    values = draw(
        st.lists(
            st.lists(st.integers(0, p - 1), min_size=cols, max_size=cols),
            min_size=rows,
            max_size=rows,
        )
    )
    return PrimeField(p), np.array(values, dtype=np.int64).reshape(rows, cols)


@st.composite
def square_maps(draw, max_dim=4):
    p = draw(st.sampled_from(PRIMES))
    d = draw(st.integers(1, max_dim))
    field = PrimeField(p)
    entry = st.integers(0, p - 1)
    square = st.lists(st.lists(entry, min_size=d, max_size=d), min_size=d, max_size=d)
    maps = [np.array(m, dtype=np.int64) for m in draw(st.lists(square, min_size=0, max_size=3))]
    seed_rows = draw(st.lists(st.lists(entry, min_size=d, max_size=d), min_size=0, max_size=2))
    seed = Subspace.from_rows(np.array(seed_rows, dtype=np.int64).reshape(-1, d), d, field)
    return field, d, seed, maps


def test_field_must_be_prime():
    with pytest.raises(ValueError, match="field must be prime"):
        PrimeField(4)
    assert PrimeField(3).inv(2) == 2


def test_rref_examples(f2):
    R, pivots = rref(np.array([[1, 1], [1, 1]]), f2)
    assert R.tolist() == [[1, 1], [0, 0]]
    assert pivots == [0]

    R, pivots = rref(np.zeros((2, 3), dtype=np.int64), f2)
    assert not R.any()
    assert pivots == []

    f5 = PrimeField(5)
    R, pivots = rref(np.eye(3, dtype=np.int64), f5)
    assert R.tolist() == np.eye(3, dtype=np.int64).tolist()
    assert pivots == [0, 1, 2]


def test_kernel_examples(f3):
    K = kernel_basis(np.array([[1, 1]]), f3)
    assert K.rank == 1
    assert K.basis.tolist() == [[1, 2]]

    assert kernel_basis(np.array([[1, 2], [0, 1]]), f3).rank == 0
    assert kernel_basis(np.zeros((1, 2), dtype=np.int64), f3).rank == 2


def test_sum_and_close_examples(f2):
    e1 = Subspace.from_rows(np.array([[1, 0]]), 2, f2)
    swap = np.array([[0, 1], [1, 0]])
    assert sum_and_close([e1], [swap], f2).rank == 2
    assert sum_and_close([Subspace.zero(2, f2)], [swap], f2).is_zero()
    assert sum_and_close([e1], [np.eye(2, dtype=np.int64)], f2) == e1


def test_sum_and_close_rejects_mismatched_maps(f2):
    e1 = Subspace.from_rows(np.array([[1, 0]]), 2, f2)
    with pytest.raises(DimensionMismatchError):
        sum_and_close([e1], [np.eye(3, dtype=np.int64)], f2)


def test_quotient_data_examples(f2):
    sub = Subspace.from_rows(np.array([[1, 1]]), 2, f2)
    proj, complement = quotient_data(sub)
    assert complement == [1]
    assert proj.tolist() == [[1, 1]]

    proj, complement = quotient_data(Subspace.zero(3, f2))
    assert complement == [0, 1, 2]
    assert proj.tolist() == np.eye(3, dtype=np.int64).tolist()

    proj, complement = quotient_data(Subspace.full(3, f2))
    assert complement == []
    assert proj.shape == (0, 3)


def test_matmul_falls_back_to_exact_ints():
    field = PrimeField(2**31 - 1)
    a = np.full((2, 3), field.p - 1, dtype=np.int64)
    b = np.full((3, 2), field.p - 2, dtype=np.int64)
    expected = (3 * (field.p - 1) * (field.p - 2)) % field.p
    assert matmul(a, b, field).tolist() == [[expected, expected], [expected, expected]]


def test_matmul_shape_mismatch(f2):
    with pytest.raises(DimensionMismatchError):
        matmul(np.zeros((2, 3), dtype=np.int64), np.zeros((2, 3), dtype=np.int64), f2)


@given(matrices())
def test_rref_is_idempotent(data):
    field, M = data
    R, pivots = rref(M, field)
    R2, pivots2 = rref(R, field)
    assert np.array_equal(R, R2)
    assert pivots == pivots2


@given(matrices())
def test_rank_nullity(data):
    field, M = data
    K = kernel_basis(M, field)
    assert rank(M, field) + K.rank == M.shape[1]
    if K.rank:
        assert not matmul(M, K.basis.T.copy(), field).any()


@given(matrices())
def test_image_rank_equals_rank(data):
    field, M = data
    assert image_basis(M, field).rank == rank(M, field)


@settings(max_examples=50)
@given(square_maps())
def test_sum_and_close_is_invariant(data):
    field, d, seed, maps = data
    closed = sum_and_close([seed], maps, field, ambient_dim=d)
    assert closed.contains(seed.basis)
    for a in maps:
        assert closed.contains(matmul(closed.basis, a.T.copy(), field))


@given(matrices(), st.data())
def test_quotient_lifting(data, draw):
    field, M = data
    d = M.shape[1]
    sub = Subspace.from_rows(M, d, field)
    proj, complement = quotient_data(sub)
    v = np.array(draw.draw(st.lists(st.integers(0, field.p - 1), min_size=d, max_size=d)), dtype=np.int64)
    lifted = np.zeros(d, dtype=np.int64)
    lifted[complement] = matmul(proj, v.reshape(-1, 1), field).ravel()
    assert sub.contains(((v - lifted) % field.p).reshape(1, -1))
    assert np.array_equal(proj[:, complement], np.eye(len(complement), dtype=np.int64))
