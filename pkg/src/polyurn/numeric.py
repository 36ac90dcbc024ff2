"""Small numerical helpers."""

import math

import numpy as np


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def compensated_cumsum(x, chunk=1024):
    """Prefix sums of ``x`` whose rounding error does not grow with length.

    Chunk totals are exactly rounded (``math.fsum``) and carried as an
    unevaluated pair ``hi + lo`` updated by error-free TwoSum; inside a chunk
    ``np.cumsum`` runs on top of that carry, so the error never exceeds that
    of one chunk and the last prefix of every chunk is the rounded carry.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    hi = lo = 0.0
    for start in range(0, len(x), chunk):
        block = x[start : start + chunk]
        out[start : start + chunk] = hi + (lo + np.cumsum(block))
        hi, err = _two_sum(hi, math.fsum(block))
        lo += err
        out[start + len(block) - 1] = hi + lo
    return out
