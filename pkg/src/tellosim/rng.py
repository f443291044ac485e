"""Seeded pseudo-random numbers with reproducible substreams.

The generator is SplitMix64 (Steele, Lea & Flood's 64-bit mixer). It is
pinned here, rather than delegating to the platform RNG, so that datasets
and evaluation runs are byte-identical across machines and Python
versions. Substreams for independent work units (one per flight) are
derived from the stream's *initial* seed and the unit index, so they do
not depend on how much of the parent stream has been consumed.
"""

from __future__ import annotations

import math

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15  # golden-ratio increment


def _mix(z: int) -> int:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK
    return (z ^ (z >> 31)) & _MASK


class Rng:
    """SplitMix64 stream. Single-owner: do not share across threads."""

    __slots__ = ("seed", "_state")

    def __init__(self, seed: int) -> None:
        self.seed = seed & _MASK
        self._state = self.seed

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        return _mix(self._state)

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        """Uniform float in [lo, hi) using the top 53 bits."""
        u = (self.next_u64() >> 11) * (1.0 / (1 << 53))
        return lo + (hi - lo) * u

    def randint(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        if n <= 0:
            raise ValueError("randint needs n > 0")
        return min(int(self.uniform(0.0, float(n))), n - 1)

    def angle(self) -> float:
        return self.uniform(0.0, 2.0 * math.pi)

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randint(i + 1)
            items[i], items[j] = items[j], items[i]

    def derive(self, index: int) -> "Rng":
        """Substream keyed by (initial seed, index), independent of state."""
        if index < 0:
            raise ValueError("substream index must be nonnegative")
        child = _mix((self.seed + _GAMMA * (index + 1)) & _MASK)
        return Rng(_mix(child))
