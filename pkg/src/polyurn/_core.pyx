# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled urn kernels. Same contract as ``polyurn._fallback``."""

import numpy as np

cimport numpy as cnp
from libc.stdint cimport int64_t, uint8_t, uint64_t

cnp.import_array()

cdef extern from "_urnkernel.h" nogil:
    void pu_words(uint64_t key, uint64_t stream, uint64_t pos, int64_t count, uint64_t *out)
    void pu_below_many(uint64_t key, uint64_t stream, uint64_t pos, const uint64_t *bounds,
                       int64_t count, uint64_t *out, uint64_t *end_pos)
    uint64_t pu_draw_path(int64_t x0, int64_t tau, int64_t S, int64_t c, int64_t m,
                          int64_t horizon, uint64_t key, uint64_t stream, uint64_t pos,
                          uint8_t *draws)
    void pu_batch(int64_t x0, int64_t tau, int64_t S, int64_t c, int64_t m,
                  int64_t horizon, uint64_t key, uint64_t stream0, int64_t reps,
                  const int64_t *checkpoints, int64_t ncheck, int64_t *out)

NAME = "compiled"


def words(uint64_t key, uint64_t stream, uint64_t pos, int64_t count):
    cdef cnp.ndarray[uint64_t, ndim=1] out = np.empty(count, dtype=np.uint64)
    if count:
        with nogil:
            pu_words(key, stream, pos, count, &out[0])
    return out


def below_many(uint64_t key, uint64_t stream, uint64_t pos, bounds):
    cdef cnp.ndarray[uint64_t, ndim=1] b = np.ascontiguousarray(bounds, dtype=np.uint64)
    cdef int64_t count = b.shape[0]
    cdef cnp.ndarray[uint64_t, ndim=1] out = np.empty(count, dtype=np.uint64)
    cdef uint64_t end = pos
    if count:
        with nogil:
            pu_below_many(key, stream, pos, &b[0], count, &out[0], &end)
    return out, end


def draw_path(int64_t x0, int64_t tau, int64_t S, int64_t c, int64_t m, int64_t horizon,
              uint64_t key, uint64_t stream, uint64_t pos):
    cdef cnp.ndarray[uint8_t, ndim=1] draws = np.empty(horizon, dtype=np.uint8)
    cdef uint64_t end = pos
    if horizon:
        with nogil:
            end = pu_draw_path(x0, tau, S, c, m, horizon, key, stream, pos, &draws[0])
    return draws, end


def batch_counts(int64_t x0, int64_t tau, int64_t S, int64_t c, int64_t m, int64_t horizon,
                 uint64_t key, uint64_t stream0, int64_t reps, checkpoints):
    cdef cnp.ndarray[int64_t, ndim=1] ck = np.ascontiguousarray(checkpoints, dtype=np.int64)
    cdef int64_t ncheck = ck.shape[0]
    cdef cnp.ndarray[int64_t, ndim=2] out = np.empty((reps, ncheck), dtype=np.int64)
    if reps and ncheck:
        with nogil:
            pu_batch(x0, tau, S, c, m, horizon, key, stream0, reps, &ck[0], ncheck, &out[0, 0])
    return out
