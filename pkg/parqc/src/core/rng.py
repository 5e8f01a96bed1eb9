"""Splittable SplitMix64 generator.

Seeds are immutable values; every operation returns the advanced seed
alongside its result so testers can own their random state privately.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import List, Tuple

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def _mix_gamma(z: int) -> int:
    z = ((z ^ (z >> 33)) * 0xFF51AFD7ED558CCD) & MASK64
    z = ((z ^ (z >> 33)) * 0xC4CEB9FE1A85EC53) & MASK64
    z = (z ^ (z >> 33)) | 1
    # weak gammas (too few bit transitions) are flipped
    if bin(z ^ (z >> 1)).count("1") < 24:
        z ^= 0xAAAAAAAAAAAAAAAA
    return z


@dataclass(frozen=True)
class Seed:
    state: int
    gamma: int = GOLDEN_GAMMA

    def __post_init__(self) -> None:
        if not 0 <= self.state <= MASK64 or not 0 < self.gamma <= MASK64:
            raise ValueError("seed components must be 64-bit unsigned integers")
        if self.gamma % 2 == 0:
            raise ValueError("seed gamma must be odd")

    @classmethod
    def from_int(cls, n: int) -> "Seed":
        return cls(n & MASK64, GOLDEN_GAMMA)

    @classmethod
    def fresh(cls) -> "Seed":
        return cls.from_int(int.from_bytes(os.urandom(8), "little"))

    @classmethod
    def parse(cls, text: str) -> "Seed":
        """Parse the ``state:gamma`` form written by ``str(seed)``."""
        from .models import ErrorCode, ParqcError

        parts = (text or "").strip().split(":")
        try:
            if len(parts) != 2:
                raise ValueError(text)
            return cls(int(parts[0], 10), int(parts[1], 10))
        except ValueError as exc:
            raise ParqcError(
                code=ErrorCode.INVALID_SEED,
                message=f"Malformed seed: {text!r}",
                hint="Expected two decimal 64-bit integers as 'state:gamma', gamma odd.",
            ) from exc

    def __str__(self) -> str:
        return f"{self.state}:{self.gamma}"


def next_u64(s: Seed) -> Tuple[int, Seed]:
    state = (s.state + s.gamma) & MASK64
    return _mix64(state), Seed(state, s.gamma)


def split(s: Seed) -> Tuple[Seed, Seed]:
    """Return ``(left, right)``; left continues the parent stream, right starts a new one."""
    value, s1 = next_u64(s)
    state2 = (s1.state + s1.gamma) & MASK64
    right = Seed(value, _mix_gamma(state2))
    left = Seed(state2, s.gamma)
    return left, right


def split_n(s: Seed, n: int) -> List[Seed]:
    seeds: List[Seed] = []
    for _ in range(n):
        s, child = split(s)
        seeds.append(child)
    return seeds


def bounded(s: Seed, lo: int, hi: int) -> Tuple[int, Seed]:
    """Uniform integer in ``[lo, hi]`` by rejection sampling."""
    if lo > hi:
        raise ValueError(f"empty range: lo={lo} > hi={hi}")
    span = hi - lo + 1
    if span > 1 << 64:
        raise ValueError("range wider than 64 bits")
    value, s = next_u64(s)
    if span == 1:
        return lo, s
    limit = (1 << 64) - ((1 << 64) % span)
    while value >= limit:
        value, s = next_u64(s)
    return lo + value % span, s


def next_float(s: Seed) -> Tuple[float, Seed]:
    value, s = next_u64(s)
    return (value >> 11) * (1.0 / (1 << 53)), s
