"""Params text files, binary shard files and raw message files.

Shard layout (all integers little-endian)::

    offset  size  field
    0       4     magic b"CMSR"
    4       1     format version (1)
    5       1     field width w in bits
    6       2     node index (1-based)
    8       2     plane count m
    10      2     number of digits n
    12      2     digit base s
    14      8     blake2b-64 digest of the canonical params text
    22      ...   l symbols of ceil(w/8) bytes each, plane-major then index a
"""
from __future__ import annotations

import hashlib
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from .code import DEFAULT_MAX_SYMBOLS, CodeParams, make_params
from .field import REDUCTION_POLYNOMIALS

FORMAT_VERSION = 1
MAGIC = b"CMSR"
HEADER = struct.Struct("<4sBBHHHH8s")
PARAMS_KEYS = ("format_version", "n", "k", "h", "d", "field_width", "reduction_polynomial", "lambda_seed")


class FormatError(ValueError):
    pass


def atomic_write(path, data: bytes) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- params files -----------------------------------------------------------


def params_to_text(params: CodeParams) -> str:
    seed = "canonical" if params.seed is None else str(params.seed)
    values = {
        "format_version": FORMAT_VERSION,
        "n": params.n,
        "k": params.k,
        "h": params.h,
        "d": params.d,
        "field_width": params.field.width,
        "reduction_polynomial": f"{params.field.reduction_polynomial:#x}",
        "lambda_seed": seed,
    }
    return "".join(f"{key} = {values[key]}\n" for key in PARAMS_KEYS)


def params_from_text(text: str, max_symbols: int = DEFAULT_MAX_SYMBOLS) -> CodeParams:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = (part.strip() for part in line.partition("="))
        if not sep:
            raise FormatError(f"line {lineno}: expected 'key = value'")
        if key not in PARAMS_KEYS:
            raise FormatError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise FormatError(f"line {lineno}: duplicate key {key!r}")
        values[key] = value
    missing = [key for key in PARAMS_KEYS if key not in values]
    if missing:
        raise FormatError(f"params file lacks {', '.join(missing)}")
    try:
        version = int(values["format_version"])
        n, k, h, d, width = (int(values[key]) for key in ("n", "k", "h", "d", "field_width"))
        poly = int(values["reduction_polynomial"], 16)
        seed = None if values["lambda_seed"] == "canonical" else int(values["lambda_seed"])
    except ValueError as exc:
        raise FormatError(f"malformed params value: {exc}") from None
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported params format version {version}")
    if REDUCTION_POLYNOMIALS.get(width) != poly:
        raise FormatError(f"reduction polynomial {poly:#x} is not the fixed polynomial for width {width}")
    return make_params(n, k, h, d, width_hint=width, seed=seed, max_symbols=max_symbols)


def params_digest(params_or_text: CodeParams | str) -> bytes:
    text = params_or_text if isinstance(params_or_text, str) else params_to_text(params_or_text)
    return hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest()


def write_params(path, params: CodeParams) -> None:
    atomic_write(path, params_to_text(params).encode("utf-8"))


def read_params(path, max_symbols: int = DEFAULT_MAX_SYMBOLS) -> CodeParams:
    return params_from_text(Path(path).read_text(encoding="utf-8"), max_symbols=max_symbols)


# -- symbols <-> bytes ------------------------------------------------------


def _dtype(width: int) -> np.dtype:
    return np.dtype("<u2") if width > 8 else np.dtype("u1")


def symbols_to_bytes(symbols, width: int) -> bytes:
    return np.asarray(symbols, dtype=np.int64).astype(_dtype(width)).tobytes()


def bytes_to_symbols(data: bytes, width: int) -> np.ndarray:
    dt = _dtype(width)
    if len(data) % dt.itemsize:
        raise FormatError("byte length is not a whole number of symbols")
    out = np.frombuffer(data, dtype=dt).astype(np.int64)
    if out.size and out.max() >= 1 << width:
        raise FormatError(f"symbol value exceeds GF(2^{width})")
    return out


def shard_path(directory, node: int) -> Path:
    return Path(directory) / f"node{node:03d}.shard"


def write_shard(path, node: int, vec, params: CodeParams) -> None:
    vec = np.asarray(vec, dtype=np.int64).ravel()
    if vec.size != params.l:
        raise FormatError(f"node vector has {vec.size} symbols, expected l={params.l}")
    if not 1 <= node <= params.n:
        raise FormatError(f"node index {node} outside [1, {params.n}]")
    header = HEADER.pack(MAGIC, FORMAT_VERSION, params.field.width, node, params.m, params.n, params.s, params_digest(params))
    atomic_write(path, header + symbols_to_bytes(vec, params.field.width))


def read_shard(path, params: CodeParams) -> tuple[int, np.ndarray]:
    """Return ``(node_index, node_vector)`` after checking the header against ``params``."""
    data = Path(path).read_bytes()
    if len(data) < HEADER.size:
        raise FormatError(f"{path}: truncated header")
    magic, version, width, node, m, n, s, digest = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise FormatError(f"{path}: unsupported shard version {version}")
    if digest != params_digest(params):
        raise FormatError(f"{path}: params digest mismatch")
    if (width, m, n, s) != (params.field.width, params.m, params.n, params.s):
        raise FormatError(f"{path}: header geometry disagrees with params")
    if not 1 <= node <= params.n:
        raise FormatError(f"{path}: node index {node} outside [1, {params.n}]")
    payload = data[HEADER.size :]
    expect = params.l * params.field.symbol_bytes
    if len(payload) != expect:
        raise FormatError(f"{path}: payload is {len(payload)} bytes, expected {expect}")
    return node, bytes_to_symbols(payload, params.field.width)


def read_message(path, params: CodeParams) -> np.ndarray:
    data = Path(path).read_bytes()
    expect = params.k * params.l * params.field.symbol_bytes
    if len(data) != expect:
        raise FormatError(f"message file is {len(data)} bytes; k*l symbols need {expect}")
    return bytes_to_symbols(data, params.field.width)


def write_message(path, message, params: CodeParams) -> None:
    atomic_write(path, symbols_to_bytes(message, params.field.width))
