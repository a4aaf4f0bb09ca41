# src/rng.py
"""Deterministic random number generator with named substreams.

Every random decision of the pipeline is drawn from an ``Rng`` seeded by the
user's 32-bit seed, so equal seeds give equal outputs on every platform.
Draws: ``next_u32`` (upper half of one PCG64 output), ``range(n)`` =
``next_u32 % n``, Fisher-Yates ``shuffle`` from the last index down.
"""
import hashlib
from typing import List, MutableSequence, Sequence, TypeVar

import numpy as np

T = TypeVar("T")

SEED_MASK = 0xFFFFFFFF


class Rng:
    def __init__(self, seed: int):
        self.seed = int(seed) & SEED_MASK
        self._bits = np.random.PCG64(self.seed)

    def split(self, tag: str) -> "Rng":
        """Creates an independent generator for a named substream."""
        digest = hashlib.sha256(f"{self.seed}:{tag}".encode("utf-8")).digest()
        return Rng(int.from_bytes(digest[:4], byteorder="big"))

    def next_u32(self) -> int:
        return int(self._bits.random_raw()) >> 32

    def range(self, n: int) -> int:
        """Uniform-ish integer in [0, n); n must be positive."""
        if n <= 0:
            raise ValueError("range() needs a positive bound")
        return self.next_u32() % n

    def is_even(self) -> bool:
        return self.next_u32() % 2 == 0

    def shuffle(self, items: MutableSequence[T]) -> MutableSequence[T]:
        """Shuffles in place (Fisher-Yates) and returns ``items``."""
        for i in range(len(items) - 1, 0, -1):
            j = self.range(i + 1)
            items[i], items[j] = items[j], items[i]
        return items

    def sample(self, items: Sequence[T], r: int) -> List[T]:
        """``r`` distinct picks in draw order (partial Fisher-Yates)."""
        pool = list(items)
        r = max(0, min(r, len(pool)))
        for i in range(r):
            j = i + self.range(len(pool) - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:r]

    def choice(self, items: Sequence[T]) -> T:
        return items[self.range(len(items))]

    def word(self, nbits: int) -> int:
        """Random integer of ``nbits`` bits, filled 32 bits at a time (LSB chunk first)."""
        value, filled = 0, 0
        while filled < nbits:
            value |= self.next_u32() << filled
            filled += 32
        return value & ((1 << nbits) - 1) if nbits > 0 else 0
