import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from polyurn.errors import GammaPole
from polyurn.numeric import compensated_cumsum
from polyurn.special import (gamma_ratio, log_poch, log_poch_large, poch, ratio_expansion)

mp.mp.dps = 40


def mp_poch(y, d):
    return mp.gamma(mp.mpf(y) + mp.mpf(d)) / mp.gamma(mp.mpf(y))


@given(y=st.floats(0.01, 1e7), d=st.floats(-3, 3))
def test_poch_matches_mpmath(y, d):
    assume(y + d > 0.01)
    ref = mp_poch(y, d)
    assert poch(y, d) == pytest.approx(float(ref), rel=1e-13)


@given(y=st.floats(-8.9, -0.1), d=st.floats(-1, 1))
def test_negative_arguments_track_sign(y, d):
    x = y + d
    assume(abs(x - round(x)) > 1e-3 and abs(y - round(y)) > 1e-3)
    ref = float(mp_poch(y, d))
    assert poch(y, d) == pytest.approx(ref, rel=1e-11)
    assert math.copysign(1, poch(y, d)) == math.copysign(1, ref)


def test_small_gap_at_large_argument():
    # the gap is passed exactly, so nothing is lost to cancellation
    y, d = 1e6 + 1 / 3, 1 / 3
    assert poch(y, d) == pytest.approx(float(mp_poch(mp.mpf(10**6) + mp.mpf(1) / 3, mp.mpf(1) / 3)),
                                       rel=2e-15)


@pytest.mark.parametrize("y,d", [(0, 1), (-2, 0.5), (1.5, -2.5)])
def test_poles(y, d):
    with pytest.raises(GammaPole):
        log_poch(y, d)


def test_gamma_ratio():
    assert gamma_ratio(5 / 3, 2 / 3) == pytest.approx(2 / 3, rel=1e-15)
    assert gamma_ratio(1, 0.5) == pytest.approx(1 / math.sqrt(math.pi), rel=1e-15)


def test_vectorised_form():
    y = np.array([15.0, 100.5, 1e5 + 0.25])
    got = log_poch_large(y, 0.6)
    ref = [float(mp.log(mp_poch(v, 0.6))) for v in y]
    assert np.allclose(got, ref, rtol=1e-14, atol=0)
    with pytest.raises(ValueError):
        log_poch_large(np.array([3.0]), 0.5)


@pytest.mark.parametrize("a,b", [(0.0, 0.6), (0.4, 1.6), (1.0, 0.5)])
def test_ratio_expansion(a, b):
    e = ratio_expansion(a, b, 8)
    x = 40.0
    approx = x ** (a - b) * sum(c * x**-j for j, c in enumerate(e))
    ref = float(mp.gamma(x + a) / mp.gamma(x + b))
    assert approx == pytest.approx(ref, rel=1e-13)


def test_compensated_cumsum_exact_at_chunk_ends():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(200_000) * 10.0 ** rng.integers(-8, 8, 200_000)
    cs = compensated_cumsum(x, chunk=1024)
    for i in (1023, 12 * 1024 - 1, len(x) - 1):
        assert cs[i] == pytest.approx(math.fsum(x[: i + 1]), rel=1e-15)


def test_compensated_cumsum_long_positive_sum():
    # the quadratic-variation use case: 10^6 small positive terms
    k = np.arange(1, 10**6 + 1, dtype=float)
    x = 1.0 / k**1.2 * (1 + 0.1 * np.sin(k))
    cs = compensated_cumsum(x)
    idx = np.array([10, 5000, 333_333, 10**6 - 1])
    ref = np.array([math.fsum(x[: i + 1]) for i in idx])
    assert np.max(np.abs(cs[idx] / ref - 1)) < 1e-15
