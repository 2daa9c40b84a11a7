"""Deterministic RNG substreams.

Every random decision in the toolkit draws from a generator obtained via
``substream(seed, *tags)``.  Streams are derived by key, not by consumption
order, so two runs that share a (seed, tag) prefix see identical draws even
when they consume different amounts of randomness elsewhere.  This is what
makes e.g. the first MRT candidate at k=20 equal the single candidate at k=1.
"""

from __future__ import annotations

import zlib

import numpy as np


def _tag_to_int(tag) -> int:
    if isinstance(tag, str):
        return zlib.crc32(tag.encode("utf-8"))
    if isinstance(tag, (int, np.integer)):
        return int(tag) & 0xFFFFFFFF
    raise TypeError(f"substream tags must be str or int, got {type(tag).__name__}")


def seed_sequence(seed: int, *tags) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(_tag_to_int(t) for t in tags))


def substream(seed: int, *tags) -> np.random.Generator:
    """Generator for the stream keyed by (seed, tags...)."""
    return np.random.Generator(np.random.PCG64(seed_sequence(seed, *tags)))
