"""Arithmetic over GF(2^w) for w in {4, 8, 16} via log/antilog tables.

Elements are plain Python ints (or numpy integer arrays for the vectorised
helpers). Addition is XOR, so it doubles as subtraction.
"""
from __future__ import annotations

import numpy as np

# Fixed per width so shard files written on one machine decode on another.
REDUCTION_POLYNOMIALS = {
    4: 0x13,  # x^4 + x + 1
    8: 0x11B,  # x^8 + x^4 + x^3 + x + 1
    16: 0x1100B,  # x^16 + x^12 + x^3 + x + 1
}

SUPPORTED_WIDTHS = tuple(sorted(REDUCTION_POLYNOMIALS))


class FieldError(ValueError):
    pass


def carryless_mul(a: int, b: int, poly: int, width: int) -> int:
    """Shift-and-reduce product; slow, used to build tables and as a test oracle."""
    top = 1 << width
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= poly
    return out


def _find_generator(poly: int, width: int) -> int:
    # x^8+x^4+x^3+x+1 is irreducible but not primitive (2 has order 51), so
    # the table generator is searched for rather than assumed to be 2.
    order = (1 << width) - 1
    for g in range(2, order + 1):
        x, period = g, 1
        while x != 1:
            x = carryless_mul(x, g, poly, width)
            period += 1
        if period == order:
            return g
    raise FieldError(f"no generator for polynomial {poly:#x}")


class FieldCtx:
    """GF(2^width) with precomputed exp/log tables. Immutable after construction."""

    __slots__ = ("width", "order", "reduction_polynomial", "generator", "exp_table", "log_table")

    def __init__(self, width: int):
        if width not in REDUCTION_POLYNOMIALS:
            raise FieldError(f"unsupported field width {width}; expected one of {SUPPORTED_WIDTHS}")
        poly = REDUCTION_POLYNOMIALS[width]
        order = 1 << width
        gen = _find_generator(poly, width)

        # exp table is doubled so log[a] + log[b] never needs a modulo
        exp = np.zeros(2 * order, dtype=np.int64)
        log = np.zeros(order, dtype=np.int64)
        x = 1
        for i in range(order - 1):
            exp[i] = x
            log[x] = i
            x = carryless_mul(x, gen, poly, width)
        exp[order - 1 : 2 * order - 2] = exp[: order - 1]
        exp.flags.writeable = False
        log.flags.writeable = False

        object.__setattr__(self, "width", width)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "reduction_polynomial", poly)
        object.__setattr__(self, "generator", gen)
        object.__setattr__(self, "exp_table", exp)
        object.__setattr__(self, "log_table", log)

    def __setattr__(self, name, value):
        raise AttributeError("FieldCtx is immutable")

    def __repr__(self):
        return f"FieldCtx(width={self.width}, poly={self.reduction_polynomial:#x})"

    def __eq__(self, other):
        return isinstance(other, FieldCtx) and other.width == self.width

    def __hash__(self):
        return hash(("FieldCtx", self.width))

    @property
    def symbol_bytes(self) -> int:
        return (self.width + 7) // 8

    def check(self, a: int) -> int:
        if not 0 <= a < self.order:
            raise FieldError(f"{a} is not an element of GF(2^{self.width})")
        return a

    # -- scalar arithmetic -------------------------------------------------

    def add(self, a: int, b: int) -> int:
        return a ^ b

    sub = add

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp_table[self.log_table[a] + self.log_table[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return int(self.exp_table[(self.order - 1 - self.log_table[a]) % (self.order - 1)])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, t: int) -> int:
        if t < 0:
            raise FieldError("negative exponent")
        if a == 0:
            if t == 0:
                raise FieldError("pow(0, 0) is undefined here")
            return 0
        return int(self.exp_table[(int(self.log_table[a]) * t) % (self.order - 1)])

    # -- vectorised helpers ------------------------------------------------

    def mul_array(self, a, b) -> np.ndarray:
        """Elementwise product of broadcastable integer arrays."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = self.exp_table[self.log_table[a] + self.log_table[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def pow_array(self, a, t: int) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if t == 0:
            if np.any(a == 0):
                raise FieldError("pow(0, 0) is undefined here")
            return np.ones_like(a)
        out = self.exp_table[(self.log_table[a] * t) % (self.order - 1)]
        return np.where(a == 0, 0, out)

    def inv_array(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("zero has no inverse")
        return self.exp_table[(self.order - 1 - self.log_table[a]) % (self.order - 1)]

    def matmul(self, A, B) -> np.ndarray:
        """Matrix product over the field; B may be 1-D or 2-D."""
        A = np.asarray(A, dtype=np.int64)
        B = np.asarray(B, dtype=np.int64)
        if B.ndim == 1:
            return self.matmul(A, B[:, None])[:, 0]
        if A.shape[1] == 0:
            return np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
        prod = self.mul_array(A[:, :, None], B[None, :, :])
        return np.bitwise_xor.reduce(prod, axis=1)

    def solve_batch(self, A, B) -> np.ndarray:
        """Solve ``A[p] X[p] = B[p]`` for a stack of square systems.

        A has shape (P, r, r); B has shape (P, r, c). Gauss-Jordan with a
        per-system row swap when the pivot vanishes.
        """
        A = np.array(A, dtype=np.int64)
        X = np.array(B, dtype=np.int64)
        P, r = A.shape[0], A.shape[1]
        rows = np.arange(P)
        for col in range(r):
            nz = A[:, col:, col] != 0
            if not nz.any(axis=1).all():
                raise FieldError("singular matrix in batch")
            piv = col + np.argmax(nz, axis=1)
            swap = piv != col
            if swap.any():
                w = rows[swap]
                A[w, col], A[w, piv[swap]] = A[w, piv[swap]], A[w, col].copy()
                X[w, col], X[w, piv[swap]] = X[w, piv[swap]], X[w, col].copy()
            scale = self.inv_array(A[:, col, col])[:, None]
            A[:, col] = self.mul_array(A[:, col], scale)
            X[:, col] = self.mul_array(X[:, col], scale)
            f = A[:, :, col].copy()
            f[:, col] = 0
            A ^= self.mul_array(f[:, :, None], A[:, None, col, :])
            X ^= self.mul_array(f[:, :, None], X[:, None, col, :])
        return X


_CACHE: dict[int, FieldCtx] = {}


def field_make(width: int) -> FieldCtx:
    """Return the (cached) field context for ``width`` bits per symbol."""
    if width not in _CACHE:
        _CACHE[width] = FieldCtx(width)
    return _CACHE[width]
