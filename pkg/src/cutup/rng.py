"""Counter-based deterministic random streams.

Every random decision the toolkit makes flows through a `Stream` keyed by
(master_seed, *labels).  The construction is fully documented so results can
be reproduced independently:

  key       = first 8 bytes, big-endian, of SHA-256(master_seed as u64 BE ||
              for each label: len(utf8) as u32 BE || utf8 bytes)
  output_i  = mix64((key + (i + 1) * GAMMA) mod 2**64)        (splitmix64)
  uniform_i = (((output_i >> 12) + 0.5) / 2**52)              in open (0, 1)
  normal_i  = mu + sigma * Phi^-1(uniform_i)                  (inverse CDF)

Because each output is a pure function of the key and the counter, streams
for distinct (master_seed, labels) tuples are independent, and any unit of
work keyed by stable identifiers produces identical results regardless of
thread count or processing order.
"""

from __future__ import annotations

import hashlib
import struct
from statistics import NormalDist

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_STD_NORMAL = NormalDist()


def _mix64(z: int) -> int:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK64
    return z ^ (z >> 31)


def derive_key(master_seed: int, *labels: str) -> int:
    """64-bit substream key from the master seed and a tuple of string labels."""
    h = hashlib.sha256()
    h.update(struct.pack(">Q", master_seed & _MASK64))
    for label in labels:
        raw = label.encode("utf-8")
        h.update(struct.pack(">I", len(raw)))
        h.update(raw)
    return int.from_bytes(h.digest()[:8], "big")


class Stream:
    """Deterministic sequence of variates for one unit of work."""

    __slots__ = ("key", "counter")

    def __init__(self, master_seed: int, *labels: str):
        self.key = derive_key(master_seed, *labels)
        self.counter = 0

    def next_u64(self) -> int:
        self.counter += 1
        return _mix64((self.key + self.counter * _GAMMA) & _MASK64)

    def uniform(self) -> float:
        """Uniform float in the open interval (0, 1).

        (x >> 12) + 0.5 is exactly representable, so the extremes 2**-53 and
        1 - 2**-53 are hit exactly and 0.0/1.0 never occur.
        """
        return ((self.next_u64() >> 12) + 0.5) * 2.0 ** -52

    def normal(self, mu: float = 0.0, sigma: float = 1.0) -> float:
        return mu + sigma * _STD_NORMAL.inv_cdf(self.uniform())

    def bernoulli(self, p: float) -> bool:
        return self.uniform() < p

    def below(self, n: int) -> int:
        """Unbiased integer in [0, n) via rejection sampling."""
        if n <= 0:
            raise ValueError("below() requires n >= 1")
        limit = _MASK64 + 1 - ((_MASK64 + 1) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]

    def choose_weighted(self, weights: list[float]) -> int:
        """Index drawn proportionally to nonnegative weights summing to ~1."""
        u = self.uniform() * sum(weights)
        acc = 0.0
        for idx, w in enumerate(weights):
            acc += w
            if u < acc:
                return idx
        return len(weights) - 1
