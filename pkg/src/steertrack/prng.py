"""Seeded, portable random streams.

All randomness in the package flows through splitmix64 so identical seeds
reproduce bit-identical tracks and logs on any platform.  The generator uses
only 64-bit integer arithmetic; the uniform and gaussian transforms below use
IEEE-754 operations that round identically everywhere (the gaussian is a sum
of twelve uniforms rather than a log/sqrt transform for exactly that reason).
"""

from __future__ import annotations

import numpy as np

PRNG_ID = "splitmix64"

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_U53 = 1.0 / (1 << 53)


def mix64(z: int) -> int:
    """The splitmix64 output stage: bijective 64-bit scramble."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def stream_seed(master: int, name: str) -> int:
    """Derive an independent child seed from a master seed and a stream name."""
    h = 0xCBF29CE484222325  # FNV-1a over the name bytes
    for b in name.encode("utf-8"):
        h = ((h ^ b) * 0x100000001B3) & _MASK
    return mix64((master & _MASK) ^ h)


class SplitMix64:
    """Scalar generator; see uniform_block/gauss_block for the bulk variants."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        return mix64(self._state)

    def uniform(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * _U53

    def uniform_in(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.uniform()

    def sign(self) -> int:
        """Return -1 or +1 with equal probability."""
        return 1 if (self.next_u64() >> 63) else -1

    def gauss(self) -> float:
        """Standard normal via the sum of 12 uniforms (portable, no libm)."""
        total = 0.0
        for _ in range(12):
            total += self.uniform()
        return total - 6.0

    def choice(self, seq):
        # floor(u * n) is exact for n far below 2**53
        return seq[int(self.uniform() * len(seq))]


def _bulk_u64(seed: int, n: int) -> np.ndarray:
    state = np.uint64(seed & _MASK)
    steps = np.arange(1, n + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = state + steps * np.uint64(_GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))


def uniform_block(seed: int, n: int) -> np.ndarray:
    """Vectorized equivalent of SplitMix64(seed).uniform() called n times."""
    return (_bulk_u64(seed, n) >> np.uint64(11)).astype(np.float64) * _U53


def gauss_block(seed: int, n: int) -> np.ndarray:
    """Vectorized equivalent of SplitMix64(seed).gauss() called n times."""
    u = uniform_block(seed, 12 * n).reshape(n, 12)
    # left-to-right fold so the result is bit-identical to the scalar path
    total = u[:, 0].copy()
    for j in range(1, 12):
        total += u[:, j]
    return total - 6.0
