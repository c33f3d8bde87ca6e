"""SplitMix64, the generator behind every seeded sample.

The algorithm is part of the reproducibility contract: a run sampled with
seed ``s`` draws its ``j``-th number (``j = 1, 2, ...``) as
``mix(s + j * GAMMA)`` and turns it into a double in ``[0, 1)`` from the top
53 bits.  :func:`uniform_batch` computes the same numbers for many seeds at
once.
"""
from __future__ import annotations

import numpy as np

MASK = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_TO_UNIT = 2.0**-53


def mix(z: int) -> int:
    z &= MASK
    z = ((z ^ (z >> 30)) * _M1) & MASK
    z = ((z ^ (z >> 27)) * _M2) & MASK
    return z ^ (z >> 31)


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK

    def next_u64(self) -> int:
        self.state = (self.state + GAMMA) & MASK
        return mix(self.state)

    def random(self) -> float:
        return (self.next_u64() >> 11) * _TO_UNIT


def uniform_batch(seeds: np.ndarray, draw: int) -> np.ndarray:
    """The ``draw``-th uniform (1-based) of every generator seeded by ``seeds``."""
    z = seeds.astype(np.uint64) + np.uint64((draw * GAMMA) & MASK)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * _TO_UNIT


def batch_seeds(seed: int, count: int) -> np.ndarray:
    """Seeds ``seed, seed + 1, ...`` (mod 2**64) for a batch of samples."""
    base = np.uint64(seed & MASK)
    return base + np.arange(count, dtype=np.uint64)
