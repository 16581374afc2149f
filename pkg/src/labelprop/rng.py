"""Deterministic 64-bit random streams.

Every source of randomness in this package (tie breaks, update
permutations, trial seeds, initial labelings) is derived from splitmix64
so that results are reproducible bit-for-bit across platforms and Python
versions, independent of hash randomization and of the stdlib Mersenne
Twister internals.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _finalize(z: int) -> int:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK
    return z ^ (z >> 31)


def mix64(*parts: int) -> int:
    """Fold integers into a single 64-bit value (order-sensitive)."""
    acc = 0
    for part in parts:
        acc = _finalize((acc + _GOLDEN + (part & _MASK)) & _MASK)
    return acc


class Stream:
    """A splitmix64 sequence with uniform-draw helpers."""

    __slots__ = ("_state",)

    def __init__(self, seed: int) -> None:
        self._state = seed & _MASK

    def next64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK
        return _finalize(self._state)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n); multiply-shift bias is < n / 2**64."""
        if n <= 0:
            raise ValueError("below() needs a positive bound")
        return (self.next64() * n) >> 64

    def permutation(self, n: int) -> list[int]:
        """Fisher-Yates permutation of range(n)."""
        items = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
        return items
