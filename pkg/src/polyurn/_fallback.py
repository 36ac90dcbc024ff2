"""Pure-Python (numpy) urn kernels.

Bit-for-bit mirror of the compiled kernels in ``_urnkernel.h``: the same
Philox4x64-10 word layout and the same Lemire rejection rule, so either
backend reproduces the other's trajectories exactly.  Batches are
vectorised across replicates; single paths loop in Python.
"""

import numpy as np

NAME = "python"

_M32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)
_MUL = (np.uint64(0xD2E7470EE14C6C93), np.uint64(0xCA5A826395121157))
_WEYL = (0x9E3779B97F4A7C15, 0xBB67AE8584CAA73B)
_MASK64 = (1 << 64) - 1


def _mulhilo(a, b):
    """High and low 64-bit halves of the 128-bit products a*b (uint64 arrays)."""
    a_lo, a_hi = a & _M32, a >> _S32
    b_lo, b_hi = b & _M32, b >> _S32
    ll = a_lo * b_lo
    lh = a_lo * b_hi
    hl = a_hi * b_lo
    hh = a_hi * b_hi
    mid = (ll >> _S32) + (lh & _M32) + (hl & _M32)
    hi = hh + (lh >> _S32) + (hl >> _S32) + (mid >> _S32)
    return hi, a * b


def philox_blocks(blocks, streams, key):
    """Philox4x64-10 of counters (block, stream, 0, 0) under key (key, 0).

    Returns a (len, 4) uint64 array.
    """
    with np.errstate(over="ignore"):
        c0 = np.asarray(blocks, dtype=np.uint64).copy()
        c1 = np.broadcast_to(np.asarray(streams, dtype=np.uint64), c0.shape).copy()
        c2 = np.zeros_like(c0)
        c3 = np.zeros_like(c0)
        k0, k1 = int(key) & _MASK64, 0
        for r in range(10):
            if r:
                k0 = (k0 + _WEYL[0]) & _MASK64
                k1 = (k1 + _WEYL[1]) & _MASK64
            hi0, lo0 = _mulhilo(_MUL[0], c0)
            hi1, lo1 = _mulhilo(_MUL[1], c2)
            c0, c1, c2, c3 = hi1 ^ c1 ^ np.uint64(k0), lo1, hi0 ^ c3 ^ np.uint64(k1), lo0
        return np.stack([c0, c1, c2, c3], axis=-1)


def words(key, stream, pos, count):
    p = np.arange(pos, pos + count, dtype=np.uint64)
    blocks = philox_blocks(p >> np.uint64(2), stream, key)
    return blocks[np.arange(count), (p & np.uint64(3)).astype(np.intp)]


class _WordCursor:
    """Sequential reader over one stream, fetching words in bulk."""

    def __init__(self, key, stream, pos, chunk=4096):
        self.key, self.stream, self.pos = key, stream, pos
        self._chunk = chunk
        self._buf = []
        self._i = 0

    def next(self):
        if self._i == len(self._buf):
            self._buf = [int(w) for w in words(self.key, self.stream, self.pos, self._chunk)]
            self._i = 0
        w = self._buf[self._i]
        self._i += 1
        self.pos += 1
        return w

    def below(self, bound):
        prod = self.next() * bound
        low = prod & _MASK64
        if low < bound:
            threshold = (-bound) % bound
            while low < threshold:
                prod = self.next() * bound
                low = prod & _MASK64
        return prod >> 64


def below_many(key, stream, pos, bounds):
    cur = _WordCursor(key, stream, pos, chunk=max(4, min(len(bounds) + 4, 4096)))
    out = np.array([cur.below(int(b)) for b in bounds], dtype=np.uint64)
    return out, cur.pos


def draw_path(x0, tau, S, c, m, horizon, key, stream, pos):
    cur = _WordCursor(key, stream, pos)
    draws = np.empty(horizon, dtype=np.uint8)
    x, total = x0, tau
    for k in range(horizon):
        red = cur.below(total) < x
        draws[k] = red
        x += c + (m if red else 0)
        total += S
    return draws, cur.pos


def batch_counts(x0, tau, S, c, m, horizon, key, stream0, reps, checkpoints):
    checkpoints = np.asarray(checkpoints, dtype=np.int64)
    out = np.empty((reps, len(checkpoints)), dtype=np.int64)
    if reps == 0 or len(checkpoints) == 0:
        return out
    streams = np.arange(stream0, stream0 + reps, dtype=np.uint64)
    pos = np.zeros(reps, dtype=np.uint64)
    cached = np.full(reps, np.iinfo(np.uint64).max, dtype=np.uint64)
    buf = np.empty((reps, 4), dtype=np.uint64)
    x = np.full(reps, x0, dtype=np.int64)
    total = tau
    rows = np.arange(reps)
    j = 0
    while j < len(checkpoints) and checkpoints[j] == 0:
        out[:, j] = x
        j += 1
    last = int(checkpoints[-1])

    def fetch(idx):
        # next word for replicates idx, refreshing stale Philox blocks
        block = pos[idx] >> np.uint64(2)
        stale = block != cached[idx]
        if stale.any():
            s = idx[stale]
            buf[s] = philox_blocks(block[stale], streams[s], key)
            cached[s] = block[stale]
        w = buf[idx, (pos[idx] & np.uint64(3)).astype(np.intp)]
        pos[idx] += np.uint64(1)
        return w

    with np.errstate(over="ignore"):
        for k in range(1, min(horizon, last) + 1):
            bound = np.uint64(total)
            hi, low = _mulhilo(fetch(rows), bound)
            if (low < bound).any():
                threshold = np.uint64((-total) % total)
                redo = np.flatnonzero(low < threshold)
                while redo.size:
                    h2, l2 = _mulhilo(fetch(redo), bound)
                    hi[redo], low[redo] = h2, l2
                    redo = redo[l2 < threshold]
            red = hi < x.astype(np.uint64)
            x += c + m * red
            total += S
            while j < len(checkpoints) and checkpoints[j] == k:
                out[:, j] = x
                j += 1
    return out
