"""Portable seeded PRNG.

The generator is xorshift64* with state initialised through SplitMix64, so
that any language with 64-bit unsigned arithmetic can reproduce the same
stream from the same seed::

    splitmix64(x):
        x  = (x + 0x9E3779B97F4A7C15) mod 2**64
        z  = x
        z  = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2**64
        z  = ((z ^ (z >> 27)) * 0x94D049BB133111EB) mod 2**64
        return z ^ (z >> 31)

    state0 = splitmix64(seed)   (replaced by 0x9E3779B97F4A7C15 if zero)
    step:  s ^= s >> 12; s ^= s << 25 (mod 2**64); s ^= s >> 27
           out = (s * 0x2545F4914F6CDD1D) mod 2**64

Floats in [0, 1) are ``(out >> 11) * 2**-53``.  Integers in ``[lo, hi]`` use
rejection sampling on ``out`` to avoid modulo bias.

Per-instance streams are split from a root seed with
``instance_seed(root, k) = splitmix64((root + (k + 1) * 0x9E3779B97F4A7C15) mod 2**64)``.
"""

from __future__ import annotations

import math

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    x = (x + GOLDEN) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def instance_seed(root: int, index: int) -> int:
    """Seed of the ``index``-th independent stream derived from ``root``."""
    return splitmix64((root + (index + 1) * GOLDEN) & MASK64)


class XorShiftRng:
    """xorshift64* generator with SplitMix64 seeding."""

    def __init__(self, seed: int):
        state = splitmix64(int(seed) & MASK64)
        self._state = state if state else GOLDEN

    def next_u64(self) -> int:
        s = self._state
        s ^= s >> 12
        s ^= (s << 25) & MASK64
        s ^= s >> 27
        self._state = s
        return (s * 0x2545F4914F6CDD1D) & MASK64

    def random(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / 9007199254740992.0)

    def uniform(self, low: float, high: float) -> float:
        return low + (high - low) * self.random()

    def integers(self, low: int, high: int) -> int:
        """Uniform integer in the closed range ``[low, high]``."""
        if high < low:
            raise ValueError("empty integer range")
        span = high - low + 1
        limit = (1 << 64) - ((1 << 64) % span)
        while True:
            x = self.next_u64()
            if x < limit:
                return low + x % span

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.integers(0, i)
            items[i], items[j] = items[j], items[i]

    def complex_vector(self, n: int, max_modulus: float = 1.0) -> np.ndarray:
        """Complex entries, modulus uniform in ``[0, max_modulus]``, uniform phase."""
        out = np.empty(n, dtype=complex)
        for i in range(n):
            r = self.uniform(0.0, max_modulus)
            phi = self.uniform(0.0, 2.0 * math.pi)
            out[i] = complex(r * math.cos(phi), r * math.sin(phi))
        return out
