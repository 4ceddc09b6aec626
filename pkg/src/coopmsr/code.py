"""Code parameters, s-ary coordinate indexing, encoding and erasure decoding.

Conventions used throughout the package:

* Node indices and failed-node ranks are 1-based (nodes live in ``[n]``).
* Array axes are 0-based. A node vector is a length-``l`` array laid out
  plane-major, so ``node.reshape(m, s**n)[b - 1, a]`` is the symbol at plane
  ``b`` and index ``a``. A codeword is an ``(n, l)`` array.
* The digit ``a_1`` of an index ``a`` is its least-significant s-ary digit.

Every (plane, index) slice ``(c[1,b,a], ..., c[n,b,a])`` satisfies the
Vandermonde parity checks ``sum_i lam[i, a_i]**t * c[i,b,a] = 0`` for
``t = 0 .. n-k-1``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .field import SUPPORTED_WIDTHS, FieldCtx, field_make

DEFAULT_MAX_SYMBOLS = 1 << 26


class ParamsError(ValueError):
    pass


# -- s-ary indexing ---------------------------------------------------------


def digits(a: int, s: int, n: int) -> tuple[int, ...]:
    """s-ary digits ``(a_1, ..., a_n)`` of ``a``, least significant first."""
    if not 0 <= a < s**n:
        raise ValueError(f"index {a} out of range for s={s}, n={n}")
    out = []
    for _ in range(n):
        a, r = divmod(a, s)
        out.append(r)
    return tuple(out)


def from_digits(ds: Sequence[int], s: int) -> int:
    return sum(d * s**pos for pos, d in enumerate(ds))


def replace_digit(a: int, i: int, u: int, s: int, n: int) -> int:
    """``a(i, u)``: ``a`` with its i-th digit (1-based) replaced by ``u``."""
    if not 1 <= i <= n:
        raise ValueError(f"digit position {i} outside [1, {n}]")
    if not 0 <= u < s:
        raise ValueError(f"digit {u} outside [0, {s})")
    ds = list(digits(a, s, n))
    ds[i - 1] = u
    return from_digits(ds, s)


# -- parameters -------------------------------------------------------------


def check_inequalities(n: int, k: int, h: int, d: int) -> None:
    """Raise ParamsError naming the first violated parameter inequality."""
    checks = [
        (1 <= k, "k >= 1"),
        (k < n, "k < n"),
        (k <= d, "k <= d"),
        (1 <= h, "h >= 1"),
        (h + d <= n, "h + d <= n"),
        (h <= n - k, "h <= n - k"),
    ]
    for ok, text in checks:
        if not ok:
            raise ParamsError(f"invalid parameters (n={n}, k={k}, h={h}, d={d}): requires {text}")


@dataclass(frozen=True, eq=False)
class CodeParams:
    n: int
    k: int
    h: int
    d: int
    field: FieldCtx
    eval_points: np.ndarray  # (n, s): eval_points[i-1, j] = lambda_{i,j}
    seed: int | None = None
    _cache: dict = dc_field(default_factory=dict, repr=False, compare=False)

    @property
    def s(self) -> int:
        return self.d + 1 - self.k

    @property
    def m(self) -> int:
        return self.d + self.h - self.k

    @property
    def width(self) -> int:
        """Number of indices per plane, s**n."""
        return self.s**self.n

    @property
    def l(self) -> int:  # noqa: E743
        return self.m * self.width

    @property
    def r(self) -> int:
        return self.n - self.k

    @cached_property
    def digit_table(self) -> np.ndarray:
        """(width, n) array; row a holds digits (a_1, ..., a_n)."""
        a = np.arange(self.width)
        return np.stack([(a // self.s**p) % self.s for p in range(self.n)], axis=1)

    @cached_property
    def slice_points(self) -> np.ndarray:
        """(width, n) array; row a holds (lam[1, a_1], ..., lam[n, a_n])."""
        return self.eval_points[np.arange(self.n)[None, :], self.digit_table]

    def shifted(self, i: int, j: int) -> np.ndarray:
        """Index map ``a -> a(i, a_i + j mod s)`` over all a, as an int array."""
        key = ("shift", i, j % self.s)
        if key not in self._cache:
            a = np.arange(self.width)
            place = self.s ** (i - 1)
            digit = (a // place) % self.s
            self._cache[key] = a + (((digit + j) % self.s) - digit) * place
        return self._cache[key]

    def planes(self, vec) -> np.ndarray:
        """View a node vector as an (m, s**n) array."""
        return np.asarray(vec).reshape(self.m, self.width)

    def __eq__(self, other):
        return (
            isinstance(other, CodeParams)
            and (self.n, self.k, self.h, self.d, self.field) == (other.n, other.k, other.h, other.d, other.field)
            and np.array_equal(self.eval_points, other.eval_points)
        )

    def __hash__(self):
        return hash((self.n, self.k, self.h, self.d, self.field, self.eval_points.tobytes()))


def make_params(
    n: int,
    k: int,
    h: int,
    d: int,
    width_hint: int | None = None,
    seed: int | None = None,
    max_symbols: int = DEFAULT_MAX_SYMBOLS,
) -> CodeParams:
    """Build code parameters and the evaluation-point table.

    The field is the smallest supported one with at least ``s*n + 1``
    elements (0 is never an evaluation point) unless ``width_hint`` forces a
    width. Without a seed, ``lam[i, j]`` is the integer ``(i-1)*s + j + 1``;
    with one, the points are ``random.Random(seed).sample`` of the nonzero
    elements, which is reproducible across Python versions.
    """
    check_inequalities(n, k, h, d)
    s = d + 1 - k
    l = (d + h - k) * s**n
    if l * n > max_symbols:
        raise ParamsError(f"node size l={l} with n={n} exceeds the memory guard of {max_symbols} symbols")
    need = s * n + 1
    if width_hint is None:
        width = next((w for w in SUPPORTED_WIDTHS if (1 << w) >= need), None)
        if width is None:
            raise ParamsError(f"no supported field has {need} elements")
    else:
        width = width_hint
    gf = field_make(width)
    if gf.order < need:
        raise ParamsError(f"GF(2^{width}) has {gf.order} elements; need at least s*n+1 = {need}")
    if seed is None:
        pts = list(range(1, s * n + 1))
    else:
        pts = random.Random(seed).sample(range(1, gf.order), s * n)
    table = np.array(pts, dtype=np.int64).reshape(n, s)
    table.flags.writeable = False
    return CodeParams(n, k, h, d, gf, table, seed)


# -- GRS erasure solving ----------------------------------------------------


def vandermonde(gf: FieldCtx, points, rows: int) -> np.ndarray:
    """Stack of powers: entry ``[t, ...]`` is ``points[...]**t`` for t < rows."""
    pts = np.asarray(points, dtype=np.int64)
    if rows == 0:
        return np.zeros((0,) + pts.shape, dtype=np.int64)
    return np.stack([gf.pow_array(pts, t) for t in range(rows)])


def erasure_solve_batch(gf: FieldCtx, points, rho: int, values, unknown: Sequence[int]) -> np.ndarray:
    """Complete a stack of vectors of the code ``{v : sum_j pts[j]**t v_j = 0, t < rho}``.

    ``points`` has shape (P, N): one point set per vector. ``values`` has
    shape (P, N) or (P, N, c) (c vectors sharing a point set); entries at the
    ``unknown`` positions are ignored and overwritten in the returned copy.
    """
    pts = np.asarray(points, dtype=np.int64)
    vals = np.array(values, dtype=np.int64)
    squeeze = vals.ndim == 2
    if squeeze:
        vals = vals[:, :, None]
    P, N = pts.shape
    if vals.shape[:2] != (P, N):
        raise ValueError(f"values of shape {vals.shape[:2]} do not match points {pts.shape}")
    unknown = list(unknown)
    if len(unknown) != rho or len(set(unknown)) != rho:
        raise ValueError(f"expected exactly {rho} distinct unknown positions, got {len(unknown)}")
    if any(not 0 <= j < N for j in unknown):
        raise ValueError("unknown position out of range")
    srt = np.sort(pts, axis=1)
    if np.any(srt[:, 1:] == srt[:, :-1]):
        raise ValueError("evaluation points must be pairwise distinct")
    if rho == 0:
        return vals[:, :, 0] if squeeze else vals
    known = [j for j in range(N) if j not in set(unknown)]
    V = vandermonde(gf, pts, rho)  # (rho, P, N)
    # V_u x_u = V_k x_k in characteristic 2
    syn = np.bitwise_xor.reduce(
        gf.mul_array(V[:, :, known, None], vals[None, :, known, :]), axis=2
    ) if known else np.zeros((rho, P, vals.shape[2]), dtype=np.int64)
    A = V[:, :, unknown].transpose(1, 0, 2)
    vals[:, unknown, :] = gf.solve_batch(A, syn.transpose(1, 0, 2))
    return vals[:, :, 0] if squeeze else vals


def grs_erasure_solve(gf: FieldCtx, points, rho: int, values: Sequence[int | None]) -> list[int]:
    """Fill the ``None`` entries of ``values`` so all ``rho`` parity checks hold."""
    if len(points) != len(values):
        raise ValueError("points and values differ in length")
    unknown = [j for j, v in enumerate(values) if v is None]
    filled = [0 if v is None else v for v in values]
    out = erasure_solve_batch(gf, [points], rho, [filled], unknown)
    return [int(v) for v in out[0]]


# -- encoding / decoding ----------------------------------------------------


def _complete(params: CodeParams, word: np.ndarray, known_nodes: Sequence[int]) -> np.ndarray:
    """Fill nodes outside ``known_nodes`` (0-based rows) of an (n, m, width) array."""
    unknown = [i for i in range(params.n) if i not in set(known_nodes)]
    if not unknown:
        return word
    # one system per index a, shared by all m planes
    solved = erasure_solve_batch(params.field, params.slice_points, params.r, word.transpose(2, 0, 1), unknown)
    return solved.transpose(1, 2, 0)


def encode(params: CodeParams, message) -> np.ndarray:
    """Systematic encoding: nodes 1..k hold ``message`` verbatim.

    ``message`` holds ``k*l`` symbols in node-major order. Returns an
    ``(n, l)`` codeword.
    """
    msg = np.asarray(message, dtype=np.int64).ravel()
    if msg.size != params.k * params.l:
        raise ValueError(f"message must have k*l = {params.k * params.l} symbols, got {msg.size}")
    if msg.size and (msg.min() < 0 or msg.max() >= params.field.order):
        raise ValueError("message symbol outside the field")
    word = np.zeros((params.n, params.m, params.width), dtype=np.int64)
    word[: params.k] = msg.reshape(params.k, params.m, params.width)
    return _complete(params, word, range(params.k)).reshape(params.n, params.l)


def parity_residual(params: CodeParams, word) -> np.ndarray:
    """Residual table indexed ``[t, b-1, a]``; all-zero iff ``word`` is a codeword."""
    w = np.asarray(word, dtype=np.int64)
    if w.shape != (params.n, params.l):
        raise ValueError(f"codeword must have shape {(params.n, params.l)}, got {w.shape}")
    w = w.reshape(params.n, params.m, params.width)
    gf = params.field
    pts = params.slice_points.T  # (n, width)
    out = np.zeros((params.r, params.m, params.width), dtype=np.int64)
    for t in range(params.r):
        coef = gf.pow_array(pts, t)
        out[t] = np.bitwise_xor.reduce(gf.mul_array(coef[:, None, :], w), axis=0)
    return out


def is_codeword(params: CodeParams, word) -> bool:
    return not parity_residual(params, word).any()


def mds_decode(params: CodeParams, available: Mapping[int, Sequence[int]] | Iterable[tuple[int, Sequence[int]]]) -> np.ndarray:
    """Recover the full codeword from at least k nodes.

    ``available`` maps 1-based node index to node vector (a mapping or an
    iterable of pairs). When more than k nodes are given, the k lowest
    indices are used.
    """
    pairs = list(available.items()) if isinstance(available, Mapping) else list(available)
    idx = [i for i, _ in pairs]
    if len(set(idx)) != len(idx):
        raise ValueError("duplicate node indices")
    if len(idx) < params.k:
        raise ValueError(f"need at least k={params.k} nodes, got {len(idx)}")
    for i in idx:
        if not 1 <= i <= params.n:
            raise ValueError(f"node index {i} outside [1, {params.n}]")
    use = sorted(pairs, key=lambda p: p[0])[: params.k]
    word = np.zeros((params.n, params.m, params.width), dtype=np.int64)
    for i, vec in use:
        vec = np.asarray(vec, dtype=np.int64)
        if vec.size != params.l:
            raise ValueError(f"node {i} has {vec.size} symbols, expected l={params.l}")
        word[i - 1] = vec.reshape(params.m, params.width)
    return _complete(params, word, [i - 1 for i, _ in use]).reshape(params.n, params.l)
