"""Text (``.ht``) and binary (``.htb``) tensor serialization.

Text layout::

    htensor 1
    order <m>
    dims <d1> ... <dm>
    layout row-major
    <entries, whitespace separated>

Binary layout: ``b"HTSR"``, then little-endian uint32 version (1),
uint32 order, ``order`` uint32 extents, then float64 entries, row-major.
"""

from __future__ import annotations

import math
import struct
from pathlib import Path

import numpy as np

from htensor.core import DenseTensor, as_tensor
from htensor.errors import EntryCountError, FormatError, MalformedHeaderError, NonFiniteEntryError

MAGIC = b"HTSR"
VERSION = 1


def format_float(x: float) -> str:
    """Shortest decimal that round-trips to the same float64."""
    s = repr(float(x))
    if s.endswith(".0"):
        s = s[:-2]
    return s


def encode_text(A) -> bytes:
    A = as_tensor(A)
    lines = [
        f"htensor {VERSION}",
        f"order {A.order}",
        "dims " + " ".join(str(d) for d in A.shape),
        "layout row-major",
    ]
    lines.extend(format_float(x) for x in A.flat.tolist())
    return ("\n".join(lines) + "\n").encode("ascii")


def _parse_int(token: str, what: str) -> int:
    try:
        value = int(token)
    except ValueError:
        raise MalformedHeaderError(f"malformed header: {what} {token!r} is not an integer") from None
    return value


def _check_entries(values: np.ndarray, allow_nonfinite: bool):
    if not allow_nonfinite and not np.all(np.isfinite(values)):
        raise NonFiniteEntryError("non-finite entry rejected")


def decode_text(payload: bytes | str, allow_nonfinite: bool = False) -> DenseTensor:
    if isinstance(payload, bytes):
        try:
            payload = payload.decode("ascii")
        except UnicodeDecodeError:
            raise MalformedHeaderError("malformed header: text tensor is not ASCII") from None
    lines = payload.split("\n", 4)
    if len(lines) < 4:
        raise MalformedHeaderError("malformed header: expected 4 header lines")
    magic, order_line, dims_line, layout_line = (ln.strip() for ln in lines[:4])
    body = lines[4] if len(lines) > 4 else ""

    if magic.split() != ["htensor", str(VERSION)]:
        raise MalformedHeaderError(f"malformed header: bad magic line {magic!r}")
    parts = order_line.split()
    if len(parts) != 2 or parts[0] != "order":
        raise MalformedHeaderError(f"malformed header: bad order line {order_line!r}")
    order = _parse_int(parts[1], "order")
    parts = dims_line.split()
    if not parts or parts[0] != "dims":
        raise MalformedHeaderError(f"malformed header: bad dims line {dims_line!r}")
    dims = [_parse_int(p, "extent") for p in parts[1:]]
    if order < 1 or len(dims) != order or any(d < 1 for d in dims):
        raise MalformedHeaderError(f"malformed header: order {order} with dims {dims}")
    if layout_line != "layout row-major":
        raise MalformedHeaderError(f"malformed header: bad layout line {layout_line!r}")

    tokens = body.split()
    if len(tokens) != math.prod(dims):
        raise EntryCountError(
            f"entry count mismatch: header promises {math.prod(dims)}, found {len(tokens)}"
        )
    try:
        values = np.array([float(t) for t in tokens], dtype=np.float64)
    except ValueError as exc:
        raise FormatError(f"unparseable entry: {exc}") from None
    _check_entries(values, allow_nonfinite)
    return DenseTensor(values, dims)


def encode_bin(A) -> bytes:
    A = as_tensor(A)
    header = MAGIC + struct.pack(f"<II{A.order}I", VERSION, A.order, *A.shape)
    return header + A.flat.astype("<f8").tobytes()


def decode_bin(payload: bytes, allow_nonfinite: bool = False) -> DenseTensor:
    if len(payload) < 12 or payload[:4] != MAGIC:
        raise MalformedHeaderError("malformed header: missing HTSR magic")
    version, order = struct.unpack_from("<II", payload, 4)
    if version != VERSION:
        raise MalformedHeaderError(f"malformed header: unsupported version {version}")
    if order < 1:
        raise MalformedHeaderError("malformed header: order must be >= 1")
    start = 12 + 4 * order
    if len(payload) < start:
        raise MalformedHeaderError("malformed header: truncated extents")
    dims = struct.unpack_from(f"<{order}I", payload, 12)
    if any(d < 1 for d in dims):
        raise MalformedHeaderError(f"malformed header: zero extent in {dims}")
    body = payload[start:]
    count = math.prod(dims)
    if len(body) != 8 * count:
        raise EntryCountError(
            f"entry count mismatch: header promises {count}, payload holds {len(body) / 8:g}"
        )
    values = np.frombuffer(body, dtype="<f8").astype(np.float64)
    _check_entries(values, allow_nonfinite)
    return DenseTensor(values, dims)


def decode(payload: bytes, allow_nonfinite: bool = False) -> DenseTensor:
    """Decode either format, sniffing the binary magic."""
    if payload[:4] == MAGIC:
        return decode_bin(payload, allow_nonfinite)
    return decode_text(payload, allow_nonfinite)


def is_binary_path(path) -> bool:
    return Path(path).suffix.lower() == ".htb"


def read_tensor(path, allow_nonfinite: bool = False) -> DenseTensor:
    return decode(Path(path).read_bytes(), allow_nonfinite)


def write_tensor(path, A) -> None:
    payload = encode_bin(A) if is_binary_path(path) else encode_text(A)
    Path(path).write_bytes(payload)
