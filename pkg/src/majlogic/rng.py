"""Counter-based random streams.

Every random number is addressed by (seed, purpose, iteration, trial, column),
so any subset of trials can be regenerated independently of how work is
split across blocks or workers. Backed by numpy's Philox-4x64 generator.
"""

from __future__ import annotations

import zlib

import numpy as np

_WORDS_PER_COUNTER = 4  # Philox-4x64 emits four 64-bit words per counter step


def _tag(purpose: str) -> int:
    return zlib.crc32(purpose.encode("ascii"))


class KeyedStream:
    """Uniform draws for one (seed, purpose, iteration) key.

    ``rows(start, count, width)`` returns an array (count, width); row ``i``
    depends only on the key and the trial index ``start + i``.
    """

    def __init__(self, seed: int, purpose: str, iteration: int = 0):
        seq = np.random.SeedSequence(entropy=int(seed), spawn_key=(_tag(purpose), int(iteration)))
        self.key = seq.generate_state(2, dtype=np.uint64)

    def rows(self, start: int, count: int, width: int) -> np.ndarray:
        if count <= 0 or width <= 0:
            return np.zeros((max(count, 0), max(width, 0)))
        padded = -(-width // _WORDS_PER_COUNTER) * _WORDS_PER_COUNTER
        bitgen = np.random.Philox(key=self.key)
        bitgen.advance(start * (padded // _WORDS_PER_COUNTER))
        out = np.random.Generator(bitgen).random(count * padded).reshape(count, padded)
        return out[:, :width]


def stream(seed: int, purpose: str, iteration: int = 0) -> KeyedStream:
    return KeyedStream(seed, purpose, iteration)
