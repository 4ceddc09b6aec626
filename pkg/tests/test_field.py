import numpy as np
import pytest
from hypothesis import given, strategies as st

from coopmsr.field import REDUCTION_POLYNOMIALS, FieldError, carryless_mul, field_make


@pytest.mark.parametrize("width", [4, 8, 16])
def test_order(width):
    gf = field_make(width)
    assert gf.order == 2**width
    assert gf.reduction_polynomial == REDUCTION_POLYNOMIALS[width]


@pytest.mark.parametrize("width", [0, 2, 7, 32])
def test_unsupported_width(width):
    with pytest.raises(FieldError):
        field_make(width)


def test_context_is_immutable():
    gf = field_make(8)
    with pytest.raises(AttributeError):
        gf.width = 4


def test_add_examples():
    gf = field_make(8)
    assert gf.add(0x53, 0xCA) == 0x53 ^ 0xCA == 0x99
    assert gf.add(0x37, 0x37) == 0
    assert gf.add(0x37, 0) == 0x37


def test_mul_examples():
    gf = field_make(8)
    assert carryless_mul(0x80, 0x02, 0x11B, 8) == 0x1B
    assert gf.mul(0x80, 0x02) == 0x1B
    assert gf.mul(0x57, 1) == 0x57
    assert gf.mul(0x57, 0) == 0


@pytest.mark.parametrize("width", [4, 8])
def test_mul_matches_shift_and_reduce_exhaustively(width):
    gf = field_make(width)
    a, b = np.meshgrid(np.arange(gf.order), np.arange(gf.order), indexing="ij")
    want = np.array(
        [[carryless_mul(x, y, gf.reduction_polynomial, width) for y in range(gf.order)] for x in range(gf.order)]
    )
    assert np.array_equal(gf.mul_array(a, b), want)


def test_mul_gf16_sampled():
    gf = field_make(16)
    rng = np.random.default_rng(0)
    for x, y in rng.integers(0, gf.order, size=(2000, 2)):
        assert gf.mul(int(x), int(y)) == carryless_mul(int(x), int(y), 0x1100B, 16)


@pytest.mark.parametrize("width", [4, 8])
def test_inverse_exhaustive(width):
    gf = field_make(width)
    for a in range(1, gf.order):
        assert gf.mul(a, gf.inv(a)) == 1
    assert gf.inv(1) == 1
    with pytest.raises(ZeroDivisionError):
        gf.inv(0)


def test_inv_array_matches_scalar():
    gf = field_make(8)
    a = np.arange(1, 256)
    assert list(gf.inv_array(a)) == [gf.inv(int(x)) for x in a]
    with pytest.raises(ZeroDivisionError):
        gf.inv_array([3, 0])


@pytest.mark.parametrize("width", [4, 8, 16])
def test_pow(width):
    gf = field_make(width)
    rng = np.random.default_rng(width)
    for a in rng.integers(1, gf.order, 50):
        a = int(a)
        assert gf.pow(a, 0) == 1
        assert gf.pow(a, 1) == a
        assert gf.pow(a, 3) == gf.mul(a, gf.mul(a, a))
        acc = 1
        for t in range(12):
            assert gf.pow(a, t) == acc
            acc = carryless_mul(acc, a, gf.reduction_polynomial, width)
    assert gf.pow(0, 5) == 0
    with pytest.raises(FieldError):
        gf.pow(0, 0)
    with pytest.raises(FieldError):
        gf.pow_array([1, 0], 0)


def test_field_axioms_exhaustive_gf16():
    gf = field_make(4)
    els = range(gf.order)
    for a in els:
        assert gf.add(gf.add(a, 5), 5) == a
        for b in els:
            assert gf.mul(a, b) == gf.mul(b, a)
            for c in els:
                assert gf.mul(a, gf.add(b, c)) == gf.add(gf.mul(a, b), gf.mul(a, c))
                assert gf.mul(a, gf.mul(b, c)) == gf.mul(gf.mul(a, b), c)


@given(st.integers(0, 255), st.integers(0, 255))
def test_add_involution(x, y):
    gf = field_make(8)
    assert gf.add(gf.add(x, y), y) == x


@given(st.integers(1, 2**16 - 1), st.integers(0, 2**16 - 1))
def test_div_undoes_mul(a, b):
    gf = field_make(16)
    assert gf.div(gf.mul(b, a), a) == b


def test_matmul_against_scalar_loops():
    gf = field_make(8)
    rng = np.random.default_rng(1)
    A = rng.integers(0, 256, (3, 4))
    B = rng.integers(0, 256, (4, 5))
    want = np.zeros((3, 5), dtype=np.int64)
    for i in range(3):
        for j in range(5):
            for t in range(4):
                want[i, j] ^= carryless_mul(int(A[i, t]), int(B[t, j]), 0x11B, 8)
    assert np.array_equal(gf.matmul(A, B), want)


def test_solve_batch_with_pivoting():
    gf = field_make(8)
    rng = np.random.default_rng(2)
    A = rng.integers(0, 256, (40, 3, 3))
    A[0] = [[0, 1, 0], [1, 0, 0], [0, 0, 7]]  # zero leading pivot forces a swap
    X = rng.integers(0, 256, (40, 3, 2))
    B = np.stack([gf.matmul(a, x) for a, x in zip(A, X)])
    keep = []
    for p in range(40):
        try:
            gf.solve_batch(A[p : p + 1], B[p : p + 1])
            keep.append(p)
        except FieldError:
            pass
    assert 0 in keep
    assert np.array_equal(gf.solve_batch(A[keep], B[keep]), X[keep])


def test_solve_batch_singular():
    gf = field_make(4)
    with pytest.raises(FieldError):
        gf.solve_batch([[[1, 2], [1, 2]]], [[[1], [1]]])
