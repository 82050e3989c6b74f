"""Little-endian primitives for the versioned binary file formats."""

from __future__ import annotations

import struct
from typing import BinaryIO

import numpy as np

from .errors import SchemaError


def write_u16(fh: BinaryIO, value: int) -> None:
    fh.write(struct.pack("<H", value))


def write_u32(fh: BinaryIO, value: int) -> None:
    fh.write(struct.pack("<I", value))


def write_i32(fh: BinaryIO, value: int) -> None:
    fh.write(struct.pack("<i", value))


def write_u64(fh: BinaryIO, value: int) -> None:
    fh.write(struct.pack("<Q", value))


def write_f64(fh: BinaryIO, value: float) -> None:
    fh.write(struct.pack("<d", value))


def write_str(fh: BinaryIO, value: str) -> None:
    data = value.encode("utf-8")
    write_u32(fh, len(data))
    fh.write(data)


def write_f64_array(fh: BinaryIO, values: np.ndarray) -> None:
    fh.write(np.ascontiguousarray(values, dtype="<f8").tobytes())


def _read(fh: BinaryIO, n: int) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise SchemaError("truncated binary file")
    return data


def read_u16(fh: BinaryIO) -> int:
    return struct.unpack("<H", _read(fh, 2))[0]


def read_u32(fh: BinaryIO) -> int:
    return struct.unpack("<I", _read(fh, 4))[0]


def read_i32(fh: BinaryIO) -> int:
    return struct.unpack("<i", _read(fh, 4))[0]


def read_u64(fh: BinaryIO) -> int:
    return struct.unpack("<Q", _read(fh, 8))[0]


def read_f64(fh: BinaryIO) -> float:
    return struct.unpack("<d", _read(fh, 8))[0]


def read_str(fh: BinaryIO) -> str:
    return _read(fh, read_u32(fh)).decode("utf-8")


def read_f64_array(fh: BinaryIO, count: int) -> np.ndarray:
    return np.frombuffer(_read(fh, count * 8), dtype="<f8").astype(np.float64)


def expect_magic(fh: BinaryIO, magic: bytes, version: int) -> None:
    got = _read(fh, len(magic))
    if got != magic:
        raise SchemaError(f"bad magic {got!r}, expected {magic!r}")
    got_version = read_u16(fh)
    if got_version != version:
        raise SchemaError(f"unsupported version {got_version}, expected {version}")
