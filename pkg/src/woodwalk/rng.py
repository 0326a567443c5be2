"""Seeded substreams.

A stream is named by ``(seed, tag, substream)``.  The tag string is hashed
with CRC-32 and the triple feeds ``numpy.random.SeedSequence`` as
``entropy=seed, spawn_key=(crc32(tag), substream)``; the generator is PCG64.
Results depend only on that triple, never on how work is scheduled.
"""

from __future__ import annotations

import random
import zlib
from dataclasses import dataclass

import numpy as np

MASK64 = (1 << 64) - 1


def tag_hash(tag: str) -> int:
    return zlib.crc32(tag.encode("utf-8"))


@dataclass(frozen=True)
class SeedSpec:
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.seed <= MASK64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def sequence(self, tag: str, substream: int = 0) -> np.random.SeedSequence:
        return np.random.SeedSequence(entropy=self.seed, spawn_key=(tag_hash(tag), int(substream)))

    def generator(self, tag: str, substream: int = 0) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.sequence(tag, substream)))

    def py_random(self, tag: str, substream: int = 0) -> random.Random:
        state = self.sequence(tag, substream).generate_state(4, dtype=np.uint64)
        return random.Random(int.from_bytes(state.tobytes(), "little"))


def raw_bits(gen: np.random.Generator, nwords: int) -> np.ndarray:
    """``nwords`` uniform 64-bit words, each carrying 32 two-bit draws."""
    return gen.bit_generator.random_raw(int(nwords)).astype(np.uint64, copy=False)


def as_seedspec(seed: int | SeedSpec) -> SeedSpec:
    return seed if isinstance(seed, SeedSpec) else SeedSpec(int(seed))
