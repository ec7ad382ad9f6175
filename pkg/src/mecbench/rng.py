"""Pinned pseudo-randomness for reproducible experiments.

Every stochastic step in this package (splits, sampling, bootstrap,
forest training, tie-break shuffles, cost noise) draws from SplitMix64,
a public-domain 64-bit generator with a one-word state:

    state += 0x9E3779B97F4A7C15                 (mod 2^64)
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9    (mod 2^64)
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB    (mod 2^64)
    output = z ^ (z >> 31)

The algorithm is pinned here, in pure Python, so streams are identical
across platforms, Python versions, and library upgrades. Bounded draws
use rejection sampling (no modulo bias); shuffles are Fisher-Yates.
"""

from __future__ import annotations

import hashlib
from fractions import Fraction
from typing import Sequence, TypeVar

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

T = TypeVar("T")


def derive_seed(base: int, *labels: object) -> int:
    """Derive an independent child seed from a named base seed.

    Folds the base seed and the labels through SHA-256, so per-cell seeds
    do not depend on execution order. Labels are stringified; use stable
    identifiers (names, indices), never memory addresses.
    """
    text = repr(int(base)) + "\x1f" + "\x1f".join(str(l) for l in labels)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


class SplitMix64:
    """Deterministic 64-bit generator; see module docstring for the algorithm."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n), unbiased via rejection."""
        if n <= 0:
            raise ValueError("below() requires n > 0")
        limit = _MASK64 - (_MASK64 + 1) % n
        while True:
            z = self.next_u64()
            if z <= limit:
                return z % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample_without_replacement(self, items: Sequence[T], k: int) -> list[T]:
        """k distinct elements, by partial Fisher-Yates over a copy."""
        if k > len(items):
            raise ValueError(f"cannot sample {k} from {len(items)} items")
        pool = list(items)
        for i in range(k):
            j = i + self.below(len(pool) - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]

    def indices_with_replacement(self, n: int, k: int) -> list[int]:
        """k uniform draws from [0, n) with replacement (bootstrap indices)."""
        return [self.below(n) for _ in range(k)]

    def fraction_on_grid(self, low: Fraction, high: Fraction, denominator: int = 100) -> Fraction:
        """Uniform rational on the 1/denominator grid within [low, high]."""
        lo = low * denominator
        hi = high * denominator
        if lo.denominator != 1 or hi.denominator != 1:
            raise ValueError("bounds must lie on the grid")
        span = int(hi) - int(lo) + 1
        return Fraction(int(lo) + self.below(span), denominator)
