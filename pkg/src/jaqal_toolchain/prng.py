"""Deterministic random number stream for measurement sampling.

The simulator needs a stream whose output is bit-identical for a given
seed across platforms, Python versions, and library upgrades, so the
generator is implemented here rather than borrowed from numpy or
random. The algorithm is xoshiro256** seeded through SplitMix64, both
standard public-domain designs with published reference output.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1

ALGORITHM_NAME = "xoshiro256** (SplitMix64-seeded)"


def _splitmix64(state: int) -> tuple[int, int]:
    """One SplitMix64 step: returns (new_state, output word)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, (z ^ (z >> 31)) & _MASK64


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


class RandomStream:
    """xoshiro256** stream, one 64-bit word or one double per call."""

    def __init__(self, seed: int):
        state = seed & _MASK64
        words = []
        for _ in range(4):
            state, word = _splitmix64(state)
            words.append(word)
        self._state = words
        self.seed = seed & _MASK64

    def next_word(self) -> int:
        s = self._state
        result = (_rotl((s[1] * 5) & _MASK64, 7) * 9) & _MASK64
        t = (s[1] << 17) & _MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def next_double(self) -> float:
        # Top 53 bits give a uniform double in [0, 1).
        return (self.next_word() >> 11) * 2.0**-53
