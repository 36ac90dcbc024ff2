/* Hot loops for the urn simulator.
 *
 * Random words come from Philox4x64-10: word p of stream s under key k is
 * lane (p & 3) of philox(counter = {p >> 2, s, 0, 0}, key = {k, 0}).
 * Uniform integers below a bound use Lemire's multiply-and-reject method,
 * one word per attempt.  Both choices are mirrored exactly by _fallback.py.
 */
#ifndef POLYURN_URNKERNEL_H
#define POLYURN_URNKERNEL_H

#include <stdint.h>

typedef unsigned __int128 pu_u128;

#define PU_PHILOX_M0 0xD2E7470EE14C6C93ULL
#define PU_PHILOX_M1 0xCA5A826395121157ULL
#define PU_PHILOX_W0 0x9E3779B97F4A7C15ULL
#define PU_PHILOX_W1 0xBB67AE8584CAA73BULL

typedef struct {
    uint64_t key;
    uint64_t stream;
    uint64_t pos;
    uint64_t block;
    int have_block;
    uint64_t buf[4];
} pu_stream;

static inline void pu_philox(uint64_t c0, uint64_t c1, uint64_t c2, uint64_t c3,
                             uint64_t k0, uint64_t k1, uint64_t out[4])
{
    int r;
    for (r = 0; r < 10; r++) {
        pu_u128 p0, p1;
        uint64_t n0, n1, n2, n3;
        if (r) {
            k0 += PU_PHILOX_W0;
            k1 += PU_PHILOX_W1;
        }
        p0 = (pu_u128)PU_PHILOX_M0 * c0;
        p1 = (pu_u128)PU_PHILOX_M1 * c2;
        n0 = (uint64_t)(p1 >> 64) ^ c1 ^ k0;
        n1 = (uint64_t)p1;
        n2 = (uint64_t)(p0 >> 64) ^ c3 ^ k1;
        n3 = (uint64_t)p0;
        c0 = n0; c1 = n1; c2 = n2; c3 = n3;
    }
    out[0] = c0; out[1] = c1; out[2] = c2; out[3] = c3;
}

static inline void pu_stream_init(pu_stream *s, uint64_t key, uint64_t stream, uint64_t pos)
{
    s->key = key;
    s->stream = stream;
    s->pos = pos;
    s->block = 0;
    s->have_block = 0;
}

static inline uint64_t pu_next(pu_stream *s)
{
    uint64_t block = s->pos >> 2;
    if (!s->have_block || block != s->block) {
        pu_philox(block, s->stream, 0, 0, s->key, 0, s->buf);
        s->block = block;
        s->have_block = 1;
    }
    return s->buf[s->pos++ & 3];
}

/* Uniform integer in [0, bound), bound >= 1. */
static inline uint64_t pu_below(pu_stream *s, uint64_t bound)
{
    pu_u128 prod = (pu_u128)pu_next(s) * bound;
    uint64_t low = (uint64_t)prod;
    if (low < bound) {
        uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            prod = (pu_u128)pu_next(s) * bound;
            low = (uint64_t)prod;
        }
    }
    return (uint64_t)(prod >> 64);
}

static void pu_words(uint64_t key, uint64_t stream, uint64_t pos, int64_t count, uint64_t *out)
{
    pu_stream s;
    int64_t i;
    pu_stream_init(&s, key, stream, pos);
    for (i = 0; i < count; i++)
        out[i] = pu_next(&s);
}

static void pu_below_many(uint64_t key, uint64_t stream, uint64_t pos, const uint64_t *bounds,
                          int64_t count, uint64_t *out, uint64_t *end_pos)
{
    pu_stream s;
    int64_t i;
    pu_stream_init(&s, key, stream, pos);
    for (i = 0; i < count; i++)
        out[i] = pu_below(&s, bounds[i]);
    *end_pos = s.pos;
}

/* One trajectory: draws[k] = 1 when the (k+1)-th ball drawn is red. */
static uint64_t pu_draw_path(int64_t x0, int64_t tau, int64_t S, int64_t c, int64_t m,
                             int64_t horizon, uint64_t key, uint64_t stream, uint64_t pos,
                             uint8_t *draws)
{
    pu_stream s;
    int64_t k, x = x0, total = tau;
    pu_stream_init(&s, key, stream, pos);
    for (k = 0; k < horizon; k++) {
        uint8_t red = pu_below(&s, (uint64_t)total) < (uint64_t)x;
        draws[k] = red;
        x += c + (red ? m : 0);
        total += S;
    }
    return s.pos;
}

/* Red counts of `reps` independent replicates (streams stream0, stream0+1, ...)
 * recorded at the sorted checkpoints; out is row-major reps x ncheck. */
static void pu_batch(int64_t x0, int64_t tau, int64_t S, int64_t c, int64_t m,
                     int64_t horizon, uint64_t key, uint64_t stream0, int64_t reps,
                     const int64_t *checkpoints, int64_t ncheck, int64_t *out)
{
    int64_t r;
    for (r = 0; r < reps; r++) {
        pu_stream s;
        int64_t k = 0, j = 0, x = x0, total = tau;
        int64_t *row = out + r * ncheck;
        pu_stream_init(&s, key, stream0 + (uint64_t)r, 0);
        while (j < ncheck && checkpoints[j] == 0)
            row[j++] = x;
        for (k = 1; k <= horizon && j < ncheck; k++) {
            uint8_t red = pu_below(&s, (uint64_t)total) < (uint64_t)x;
            x += c + (red ? m : 0);
            total += S;
            while (j < ncheck && checkpoints[j] == k)
                row[j++] = x;
        }
    }
}

#endif
