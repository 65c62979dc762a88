"""Deterministic 64-bit PRNG (splitmix64) used wherever reproducibility
across runs, platforms, and implementations matters (dataset splits,
augmentation draws).

splitmix64 is fully specified by its constants, so a reimplementation in
any language produces identical streams. Documented in docs/determinism.md.
"""

MASK64 = (1 << 64) - 1


class SplitMix64:
    """Sequential splitmix64 generator."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def next_below(self, bound: int) -> int:
        """Uniform integer in [0, bound) via rejection sampling (unbiased)."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = (MASK64 + 1) - ((MASK64 + 1) % bound)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % bound

    def next_unit(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def next_in(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.next_unit()


def shuffled(items: list, seed: int) -> list:
    """Fisher-Yates shuffle driven by splitmix64; pure, returns a new list."""
    rng = SplitMix64(seed)
    out = list(items)
    for i in range(len(out) - 1, 0, -1):
        j = rng.next_below(i + 1)
        out[i], out[j] = out[j], out[i]
    return out
