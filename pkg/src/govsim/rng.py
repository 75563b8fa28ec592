"""Deterministic pseudorandom streams: SplitMix64 seed expansion + xoshiro256**.

Every simulation run owns exactly one :class:`RngState`. The generator is
implemented in pure Python with explicit 64-bit masking so that the output
stream is bit-identical on every platform and interpreter.
"""
from __future__ import annotations

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN_GAMMA = 0x9E3779B97F4A7C15

SCENARIO_STRIDE = 1000003
LEVEL_STRIDE = 10007

_TWO_POW_53 = float(1 << 53)


def splitmix64_mix(x: int) -> int:
    """SplitMix64 finalizer: golden-gamma increment followed by the mix rounds."""
    z = (x + GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_run_seed(base_seed: int, scenario_index: int, level_index: int, replicate: int) -> int:
    """Seed for one cell of the experiment grid."""
    if not 0 <= scenario_index <= 4:
        raise ValueError(f"scenario_index out of range: {scenario_index}")
    if not 0 <= level_index <= 4:
        raise ValueError(f"level_index out of range: {level_index}")
    if replicate < 0:
        raise ValueError(f"replicate must be >= 0, got {replicate}")
    x = base_seed + SCENARIO_STRIDE * scenario_index + LEVEL_STRIDE * level_index + replicate
    return splitmix64_mix(x & MASK64)


class RngState:
    """xoshiro256** generator seeded from a 64-bit integer.

    The four state words are successive outputs of a SplitMix64 sequence
    started at ``seed``.
    """

    __slots__ = ("s0", "s1", "s2", "s3")

    def __init__(self, seed: int) -> None:
        x = seed & MASK64
        words = []
        for _ in range(4):
            words.append(splitmix64_mix(x))
            x = (x + GOLDEN_GAMMA) & MASK64
        self.s0, self.s1, self.s2, self.s3 = words

    @property
    def state(self) -> tuple[int, int, int, int]:
        return (self.s0, self.s1, self.s2, self.s3)

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self.s0, self.s1, self.s2, self.s3
        m = (s1 * 5) & MASK64
        result = ((((m << 7) | (m >> 57)) & MASK64) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = ((s3 << 45) | (s3 >> 19)) & MASK64
        self.s0, self.s1, self.s2, self.s3 = s0, s1, s2, s3
        return result

    def next_unit(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) / _TWO_POW_53

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) via floor(u * n)."""
        if n <= 0:
            raise ValueError(f"n must be positive, got {n}")
        return int(self.next_unit() * n)

    def bernoulli(self, p: float) -> bool:
        return self.next_unit() < p
