"""Bit-exact named-tensor container serialization (the GRAW byte format).

Layout, all little-endian:

    magic "GRAW" | u32 version=1 | u32 tensor_count
    per tensor: u16 name_len | name (UTF-8) | u8 dtype | u8 ndim
                | ndim x u64 dims | row-major payload

dtype codes: 0 = float32, 1 = float64. Writing is deterministic, so equal
containers produce identical byte streams.
"""

from __future__ import annotations

import struct
from typing import BinaryIO, Mapping

import numpy as np

MAGIC = b"GRAW"
VERSION = 1
FILE_EXTENSION = ".graw"

# product(dims) * itemsize must stay below this (2**63) to be addressable
_MAX_PAYLOAD_BYTES = 1 << 63

_CODE_FOR_DTYPE = {np.dtype("<f4"): 0, np.dtype("<f8"): 1}
_DTYPE_FOR_CODE = {0: np.dtype("<f4"), 1: np.dtype("<f8")}


class GrawError(ValueError):
    """Malformed or unwritable GRAW data."""


class BadMagicError(GrawError):
    pass


class BadVersionError(GrawError):
    pass


class TruncatedError(GrawError):
    pass


class SizeOverflowError(GrawError):
    pass


class DuplicateNameError(GrawError):
    pass


def write_container(tensors: Mapping[str, np.ndarray], sink: BinaryIO) -> int:
    """Serialize an ordered name->tensor map; returns the byte count written."""
    count = 0

    def put(data: bytes) -> None:
        nonlocal count
        sink.write(data)
        count += len(data)

    put(MAGIC)
    put(struct.pack("<II", VERSION, len(tensors)))
    for name, tensor in tensors.items():
        if not name:
            raise GrawError("tensor names must be nonempty")
        encoded = name.encode("utf-8")
        if len(encoded) > 0xFFFF:
            raise GrawError(f"tensor name exceeds 65535 bytes: {name[:32]!r}...")
        arr = np.asarray(tensor)
        code = _CODE_FOR_DTYPE.get(arr.dtype.newbyteorder("<"))
        if code is None:
            raise GrawError(f"tensor {name!r} has unsupported dtype {arr.dtype}")
        if arr.ndim > 0xFF:
            raise GrawError(f"tensor {name!r} has too many axes ({arr.ndim})")
        if any(d <= 0 for d in arr.shape):
            raise GrawError(f"tensor {name!r} has a nonpositive extent {arr.shape}")
        put(struct.pack("<H", len(encoded)))
        put(encoded)
        put(struct.pack("<BB", code, arr.ndim))
        put(struct.pack(f"<{arr.ndim}Q", *arr.shape))
        put(np.ascontiguousarray(arr, dtype=_DTYPE_FOR_CODE[code]).tobytes())
    return count


def read_container(source: BinaryIO) -> dict[str, np.ndarray]:
    """Parse a GRAW stream back into an ordered name->tensor map."""
    def take(nbytes: int, what: str) -> bytes:
        data = source.read(nbytes)
        if len(data) != nbytes:
            raise TruncatedError(f"stream truncated while reading {what}")
        return data

    magic = take(4, "magic")
    if magic != MAGIC:
        raise BadMagicError(f"bad magic {magic!r}, expected {MAGIC!r}")
    version, tensor_count = struct.unpack("<II", take(8, "header"))
    if version != VERSION:
        raise BadVersionError(f"unsupported version {version}, expected {VERSION}")
    out: dict[str, np.ndarray] = {}
    for i in range(tensor_count):
        (name_len,) = struct.unpack("<H", take(2, f"name length of tensor {i}"))
        if name_len == 0:
            raise GrawError(f"tensor {i} has an empty name")
        try:
            name = take(name_len, f"name of tensor {i}").decode("utf-8")
        except UnicodeDecodeError as e:
            raise GrawError(f"tensor {i} name is not valid UTF-8: {e}") from None
        code, ndim = struct.unpack("<BB", take(2, f"descriptor of {name!r}"))
        if code not in _DTYPE_FOR_CODE:
            raise GrawError(f"tensor {name!r} has unknown dtype code {code}")
        dims = struct.unpack(f"<{ndim}Q", take(8 * ndim, f"dims of {name!r}"))
        if any(d == 0 for d in dims):
            raise GrawError(f"tensor {name!r} has a zero extent {dims}")
        dtype = _DTYPE_FOR_CODE[code]
        nelems = 1
        for d in dims:
            nelems *= d
        nbytes = nelems * dtype.itemsize
        if nbytes >= _MAX_PAYLOAD_BYTES:
            raise SizeOverflowError(
                f"tensor {name!r} dims {dims} overflow addressable size"
            )
        if name in out:
            raise DuplicateNameError(f"duplicate tensor name {name!r}")
        payload = take(nbytes, f"payload of tensor {name!r}")
        out[name] = np.frombuffer(payload, dtype=dtype).reshape(dims).copy()
    trailing = source.read(1)
    if trailing:
        raise GrawError("trailing bytes after final tensor")
    return out


def write_container_file(tensors: Mapping[str, np.ndarray], path) -> int:
    with open(path, "wb") as f:
        return write_container(tensors, f)


def read_container_file(path) -> dict[str, np.ndarray]:
    with open(path, "rb") as f:
        return read_container(f)
