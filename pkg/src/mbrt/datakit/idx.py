"""IDX file reader/writer (big-endian, MNIST-family layout).

Magic: two zero bytes, a dtype byte (0x08 = unsigned byte, the only dtype
supported here), and a dimension-count byte; 0x00000803 is a 3-d image stack,
0x00000801 a 1-d label vector, and 0x00000804 a 4-d color image stack.
Malformed files are rejected with the offending byte offset.
"""

from __future__ import annotations

import struct

import numpy as np

from mbrt.errors import FormatError

UBYTE = 0x08


def read_idx(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 4:
        raise FormatError(f"file too short for an IDX magic ({len(data)} bytes)", 0)
    if data[0] != 0 or data[1] != 0:
        raise FormatError(f"bad IDX magic prefix {data[:2].hex()}", 0)
    if data[2] != UBYTE:
        raise FormatError(f"unsupported IDX dtype byte {data[2]:#04x} (only ubyte 0x08)", 2)
    ndim = data[3]
    if not 1 <= ndim <= 4:
        raise FormatError(f"unsupported IDX dimension count {ndim}", 3)
    header_end = 4 + 4 * ndim
    if len(data) < header_end:
        raise FormatError(f"truncated IDX header: need {header_end} bytes", len(data))
    dims = struct.unpack(f">{ndim}I", data[4:header_end])
    expected = int(np.prod(dims))
    payload = data[header_end:]
    if len(payload) < expected:
        raise FormatError(
            f"truncated IDX payload: expected {expected} bytes, found {len(payload)}",
            header_end + len(payload),
        )
    if len(payload) > expected:
        raise FormatError(f"{len(payload) - expected} trailing bytes after IDX payload",
                          header_end + expected)
    return np.frombuffer(payload, dtype=np.uint8).reshape(dims).copy()


def write_idx(path, array: np.ndarray) -> None:
    array = np.asarray(array)
    if array.dtype != np.uint8:
        raise FormatError(f"IDX writer takes uint8 arrays, got {array.dtype}")
    if not 1 <= array.ndim <= 4:
        raise FormatError(f"IDX writer supports 1-4 dimensions, got {array.ndim}")
    with open(path, "wb") as fh:
        fh.write(bytes([0, 0, UBYTE, array.ndim]))
        fh.write(struct.pack(f">{array.ndim}I", *array.shape))
        fh.write(np.ascontiguousarray(array).tobytes())
