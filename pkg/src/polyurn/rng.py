"""Counter-based random streams.

Word ``p`` of stream ``s`` under master seed ``k`` is lane ``p % 4`` of
Philox4x64-10 applied to the counter ``(p // 4, s, 0, 0)`` with key
``(k, 0)``.  Streams with distinct ids partition the counter space, so they
never overlap, and any word can be produced without generating the ones
before it.
"""

from dataclasses import dataclass

MASK64 = (1 << 64) - 1

_M0, _M1 = 0xD2E7470EE14C6C93, 0xCA5A826395121157
_W0, _W1 = 0x9E3779B97F4A7C15, 0xBB67AE8584CAA73B


def philox4x64(counter, key):
    """Reference Philox4x64-10 on Python ints. Returns four 64-bit words."""
    x0, x1, x2, x3 = (int(v) & MASK64 for v in counter)
    k0, k1 = (int(v) & MASK64 for v in key)
    for r in range(10):
        if r:
            k0 = (k0 + _W0) & MASK64
            k1 = (k1 + _W1) & MASK64
        p0 = _M0 * x0
        p1 = _M1 * x2
        x0, x1, x2, x3 = (p1 >> 64) ^ x1 ^ k0, p1 & MASK64, (p0 >> 64) ^ x3 ^ k1, p0 & MASK64
    return x0, x1, x2, x3


def check_seed(seed):
    seed = int(seed)
    if not 0 <= seed <= MASK64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


@dataclass
class RandomStream:
    """Position-tracked cursor into one stream.

    Owned by a single simulation at a time; ``position`` counts words
    consumed so far.
    """

    master_seed: int
    stream_id: int = 0
    position: int = 0

    def __post_init__(self):
        self.master_seed = check_seed(self.master_seed)
        self.stream_id = check_seed(self.stream_id)
        if self.position < 0:
            raise ValueError("position must be nonnegative")

    def next_u64(self):
        block, lane = divmod(self.position, 4)
        self.position += 1
        return philox4x64((block, self.stream_id, 0, 0), (self.master_seed, 0))[lane]

    def below(self, bound):
        """Uniform integer in ``[0, bound)`` (Lemire's method, exact)."""
        if bound < 1:
            raise ValueError("bound must be positive")
        prod = self.next_u64() * bound
        low = prod & MASK64
        if low < bound:
            threshold = (-bound) % bound
            while low < threshold:
                prod = self.next_u64() * bound
                low = prod & MASK64
        return prod >> 64

    def bernoulli(self, numerator, denominator):
        """1 with probability numerator/denominator, decided on integers."""
        return int(self.below(denominator) < numerator)

    def split(self, stream_id):
        """A fresh stream with the same master seed."""
        return RandomStream(self.master_seed, stream_id, 0)
