"""Checkpoint file format.

Little-endian binary layout, version 1:

    magic           4 bytes  b"MBRT"
    version         u32      1 (plain) or 2 (adds a section table)
    descriptor      u32 length + UTF-8 bytes (architecture descriptor)
    param count     u64
    payload         count * f32
    [version 2 only]
    section count   u32
    per section:    u32 name length + UTF-8 name, u64 offset, u64 length
                    (offsets/lengths index into the payload, in floats)
    crc32           u32 over every preceding byte

Version 2 is used for translation-model snapshots, whose flat payload is the
concatenation of encoder/decoder/discriminator sub-vectors; the section table
records each sub-range.
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass, field

import numpy as np

from mbrt.errors import FormatError

MAGIC = b"MBRT"


@dataclass
class Checkpoint:
    descriptor: str
    params: np.ndarray  # float32, flat
    sections: dict = field(default_factory=dict)  # name -> (offset, length)

    @property
    def version(self) -> int:
        return 2 if self.sections else 1


def save_checkpoint(path, descriptor: str, params: np.ndarray, sections: dict | None = None) -> None:
    params32 = np.ascontiguousarray(np.asarray(params), dtype="<f4")
    desc = descriptor.encode("utf-8")
    out = bytearray()
    out += MAGIC
    out += struct.pack("<I", 2 if sections else 1)
    out += struct.pack("<I", len(desc)) + desc
    out += struct.pack("<Q", params32.size)
    out += params32.tobytes()
    if sections:
        out += struct.pack("<I", len(sections))
        for name, (offset, length) in sections.items():
            nb = name.encode("utf-8")
            out += struct.pack("<I", len(nb)) + nb
            out += struct.pack("<QQ", offset, length)
    out += struct.pack("<I", zlib.crc32(bytes(out)))
    with open(path, "wb") as fh:
        fh.write(bytes(out))


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int, what: str) -> bytes:
        if self.pos + n > len(self.data):
            raise FormatError(f"truncated checkpoint: need {n} bytes for {what}", self.pos)
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def u32(self, what: str) -> int:
        return struct.unpack("<I", self.take(4, what))[0]

    def u64(self, what: str) -> int:
        return struct.unpack("<Q", self.take(8, what))[0]


def load_checkpoint(path) -> Checkpoint:
    with open(path, "rb") as fh:
        data = fh.read()
    r = _Reader(data)
    if r.take(4, "magic") != MAGIC:
        raise FormatError(f"bad magic, expected {MAGIC!r}", 0)
    version = r.u32("version")
    if version not in (1, 2):
        raise FormatError(f"unsupported checkpoint version {version}", 4)
    desc = r.take(r.u32("descriptor length"), "descriptor").decode("utf-8")
    count = r.u64("parameter count")
    payload_pos = r.pos
    params = np.frombuffer(r.take(4 * count, "parameter payload"), dtype="<f4").copy()
    sections = {}
    if version == 2:
        for _ in range(r.u32("section count")):
            name = r.take(r.u32("section name length"), "section name").decode("utf-8")
            offset, length = r.u64("section offset"), r.u64("section length")
            if offset + length > count:
                raise FormatError(f"section {name!r} exceeds payload of {count} floats", payload_pos)
            sections[name] = (offset, length)
    body_end = r.pos
    stored = r.u32("crc32")
    if r.pos != len(data):
        raise FormatError(f"{len(data) - r.pos} trailing bytes after checksum", r.pos)
    actual = zlib.crc32(data[:body_end])
    if stored != actual:
        raise FormatError(f"checksum mismatch: stored {stored:#010x}, computed {actual:#010x}", body_end)
    return Checkpoint(desc, params, sections)
