"""Portable deterministic random number generation.

Dataset generation must be byte-identical across platforms and runs, so all
randomness goes through SplitMix64, a well-known 64-bit generator with a
trivially portable integer implementation. Streams are derived from a master
seed plus string/integer tokens (variant, split, line index, augmentation
index), which makes any single output line reproducible in isolation.
"""

from __future__ import annotations

from typing import List, Sequence, TypeVar

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15

T = TypeVar("T")


def _mix(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def _fnv1a(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for byte in data:
        h = ((h ^ byte) * 0x100000001B3) & _MASK
    return h


class SplitMix64:
    """SplitMix64 stream with rejection-sampled bounded draws."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        return _mix(self._state)

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) without modulo bias."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            k = self.next_u64()
            if k < limit:
                return k % n

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in the closed interval [lo, hi]."""
        if hi < lo:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        return lo + self.randbelow(hi - lo + 1)

    def shuffle(self, items: Sequence[T]) -> List[T]:
        """Fisher-Yates shuffle; returns a new list, input untouched."""
        out = list(items)
        for i in range(len(out) - 1, 0, -1):
            j = self.randbelow(i + 1)
            out[i], out[j] = out[j], out[i]
        return out


def derive_stream(seed: int, *tokens: object) -> SplitMix64:
    """Derive an independent stream from a seed and a token path.

    Tokens are folded in one at a time through FNV-1a byte hashing and a
    SplitMix64 finalizer, so ("a", 1) and ("a1",) land in different streams.
    """
    h = _mix(seed & _MASK)
    for tok in tokens:
        h = _mix(h ^ _fnv1a(str(tok).encode("utf-8")))
    return SplitMix64(h)
