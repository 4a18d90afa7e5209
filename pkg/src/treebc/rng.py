"""Seedable, splittable 64-bit randomness for reproducible pairings.

The generator is SplitMix64 (Steele, Lea & Flood's fixed-increment Weyl
sequence through a 64-bit finalizer).  It is pinned here, in full, so that
every CSV the package emits is reproducible bit-for-bit on any platform and
any Python build, independent of stdlib or numpy stream policies.

Substreams: ``derive_seed(master, k1, k2, ...)`` folds integer keys into the
master seed with the same finalizer; distinct key tuples give independent
streams for all practical purposes.  Sampling below a bound uses rejection,
so draws are exactly uniform.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """SplitMix64 finalizer: a bijective, avalanching mix of a 64-bit word."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, *keys: int) -> int:
    """Derive a substream seed from a master seed and integer keys.

    Defined as s_0 = mix64(master); s_{i+1} = mix64(s_i XOR mix64(k_i + GOLDEN)).
    Fixed forever; changing it would silently break recorded experiment output.
    """
    s = mix64(master & MASK64)
    for k in keys:
        s = mix64(s ^ mix64((k + _GOLDEN) & MASK64))
    return s


class SplitMix64:
    """The SplitMix64 sequence: state += GOLDEN; output = mix64(state)."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & MASK64
        return mix64(self._state)

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection (no modulo bias)."""
        if n <= 0:
            raise ValueError("randbelow needs n >= 1")
        if n == 1:
            return 0
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n

    def shuffle(self, xs: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(xs) - 1, 0, -1):
            j = self.randbelow(i + 1)
            xs[i], xs[j] = xs[j], xs[i]
