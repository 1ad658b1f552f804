"""Seeded PRNG used everywhere randomness is needed.

SplitMix64 is used instead of ``random.Random`` so that runs are
reproducible bit-for-bit regardless of interpreter version or platform.
"""

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """Deterministic 64-bit generator (Steele/Lea/Flood splitmix64)."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def bernoulli(self, p: float) -> bool:
        return self.uniform() < p

    def randrange(self, n: int) -> int:
        """Integer in [0, n). Rejection-free multiply-shift; adequate bias
        margin for n far below 2**64."""
        if n <= 0:
            raise ValueError("randrange needs n >= 1")
        return (self.next_u64() * n) >> 64

    def randint(self, lo: int, hi: int) -> int:
        """Integer in [lo, hi] inclusive."""
        return lo + self.randrange(hi - lo + 1)

    def bytes(self, n: int) -> bytes:
        out = bytearray()
        while len(out) < n:
            out += self.next_u64().to_bytes(8, "little")
        return bytes(out[:n])

    def fork(self, label: int) -> "SplitMix64":
        """Independent child stream; label distinguishes siblings."""
        return SplitMix64(self.next_u64() ^ (label * 0x9E3779B97F4A7C15))
