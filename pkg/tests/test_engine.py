import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from polyurn import engine, formulas
from polyurn.engine import Functional, MomentAccumulator, SimConfig
from polyurn.errors import OverflowHorizon, RegimeMismatch
from polyurn.model import build_model, simulate
from polyurn.rng import RandomStream

SMALL = build_model(2, 1, 1, 2, 1, 1)
CRIT = build_model(3, 1, 1, 3, 1, 1)
LARGE = build_model(4, 1, 1, 4, 1, 1)
TRAD = build_model(1, 0, 0, 1, 1, 1)


# -- accumulator --------------------------------------------------------------------


def test_accumulator_matches_numpy_and_scipy():
    x = np.random.default_rng(1).gamma(2.0, size=(5000, 3))
    acc = MomentAccumulator.from_samples(x)
    assert acc.count == 5000
    assert np.allclose(acc.mean, x.mean(0), rtol=1e-14)
    assert np.allclose(acc.var, x.var(0, ddof=1), rtol=1e-12)
    assert np.allclose(acc.skewness, stats.skew(x), rtol=1e-10)
    assert np.allclose(acc.kurtosis, stats.kurtosis(x, fisher=False), rtol=1e-10)


@given(st.lists(st.integers(1, 400), min_size=1, max_size=8), st.integers(0, 2**32 - 1))
def test_merge_is_partition_independent(sizes, seed):
    x = np.random.default_rng(seed).standard_normal(sum(sizes)) * 3 + 1
    whole = MomentAccumulator.from_samples(x)
    parts = MomentAccumulator()
    start = 0
    for s in sizes:
        parts.merge(MomentAccumulator.from_samples(x[start:start + s]))
        start += s
    assert parts.count == whole.count
    assert np.allclose(parts.mean, whole.mean, rtol=1e-12, atol=1e-15)
    assert np.allclose(parts.m2, whole.m2, rtol=1e-12)
    assert np.allclose(parts.m3, whole.m3, rtol=1e-9, atol=1e-9 * whole.m2.max() ** 1.5)
    assert np.allclose(parts.m4, whole.m4, rtol=1e-10)


def test_merge_empty_and_push():
    acc = MomentAccumulator(2)
    acc.merge(MomentAccumulator(2))
    assert acc.count == 0
    acc.push(np.ones((3, 2)))
    assert acc.count == 3 and np.array_equal(acc.mean, [1, 1]) and np.array_equal(acc.m2, [0, 0])


# -- config -----------------------------------------------------------------------------


@pytest.mark.parametrize("kwargs", [dict(reps=0), dict(horizon=0), dict(checkpoints=(5, 3)),
                                    dict(checkpoints=(10, 10**4))])
def test_config_validation(kwargs):
    base = dict(model=SMALL, horizon=100, reps=10, master_seed=1)
    base.update(kwargs)
    with pytest.raises(ValueError):
        SimConfig(**base)


def test_config_overflow():
    with pytest.raises(OverflowHorizon):
        SimConfig(SMALL, 2**62, 1, 1)


def test_config_regime_checks():
    with pytest.raises(RegimeMismatch):
        SimConfig(SMALL, 100, 1, 1, Functional.W_ESTIMATE)
    with pytest.raises(RegimeMismatch):
        SimConfig(TRAD, 100, 1, 1, Functional.SCALED_DEVIATION)
    with pytest.raises(RegimeMismatch):
        SimConfig(LARGE, 100, 1, 1, Functional.QSL_SUM)
    with pytest.raises(ValueError):
        SimConfig(CRIT, 100, 1, 1, Functional.SCALED_DEVIATION, (1, 100))


# -- run ---------------------------------------------------------------------------------


def test_single_replicate_equals_simulate():
    res = engine.run(SimConfig(SMALL, 2000, 1, 77, checkpoints=(10, 500, 2000)))
    traj = simulate(SMALL, 2000, RandomStream(77, 0))
    assert np.array_equal(res.counts[0], traj.X[[10, 500, 2000]])


def test_replicate_r_uses_stream_r():
    res = engine.run(SimConfig(SMALL, 300, 20, 5, chunk=7))
    for r in (0, 6, 7, 19):
        assert res.counts[r, 0] == simulate(SMALL, 300, RandomStream(5, r)).X[-1]


def test_deterministic_and_thread_independent():
    cfg = dict(model=CRIT, horizon=500, reps=3000, master_seed=9,
               functional=Functional.SCALED_DEVIATION, checkpoints=(50, 500), chunk=256)
    a = engine.run(SimConfig(**cfg))
    b = engine.run(SimConfig(**cfg))
    c = engine.run(SimConfig(**cfg, workers=4))
    for other in (b, c):
        assert np.array_equal(a.values, other.values)
        assert np.array_equal(a.stats.mean, other.stats.mean)
        assert np.array_equal(a.stats.m4, other.stats.m4)


def test_chunking_changes_only_rounding():
    a = engine.run(SimConfig(SMALL, 200, 1000, 3, chunk=1000))
    b = engine.run(SimConfig(SMALL, 200, 1000, 3, chunk=37))
    assert np.array_equal(a.values, b.values)
    assert np.allclose(a.stats.m2, b.stats.m2, rtol=1e-12)


def test_traditional_symmetry():
    res = engine.run(SimConfig(TRAD, 1000, 10**5, 2))
    assert abs(res.mean()[0] - 0.5) <= 3 * res.sem()[0]


def test_ecdf():
    res = engine.run(SimConfig(TRAD, 50, 400, 2))
    x, p = res.ecdf()
    assert np.all(np.diff(x) >= 0) and p[-1] == 1 and len(x) == 400


def test_functional_values():
    X = np.array([[4, 100]])
    ns = np.array([1, 40])
    fs = engine.functional_values(SMALL, Functional.FINAL_STATE, X, ns)
    assert fs.tolist() == [[4 / 5, 100 / 122]]
    sd = engine.functional_values(SMALL, Functional.SCALED_DEVIATION, X, ns)
    # U_n - n v1 = (X - 1.5 n, Y - 1.5 n); project on (1,-1)/sqrt2 and scale by sqrt n
    y = SMALL.total(40) - 100
    assert sd[0, 1] == pytest.approx(((100 - 60) - (y - 60)) / np.sqrt(2) / np.sqrt(40), rel=1e-14)
    w = engine.functional_values(LARGE, Functional.W_ESTIMATE, X, ns)
    assert w[0, 1] == pytest.approx((100 - 2.5 * 40) / 40**0.6 / 2.5, rel=1e-14)


def test_qsl_functional_matches_single_path():
    from polyurn.pathstats import qsl_curve

    res = engine.run(SimConfig(SMALL, 3000, 3, 4, Functional.QSL_SUM, (100, 3000)))
    traj = simulate(SMALL, 3000, RandomStream(4, 2))
    assert np.array_equal(res.values[2], qsl_curve(SMALL, traj.X)[[100, 3000]])
    assert res.counts is None


def test_throughput_floor():
    import time

    cfg = SimConfig(SMALL, 10**5, 400, 1)
    engine.run(SimConfig(SMALL, 1000, 10, 1))  # warm up
    t0 = time.perf_counter()
    engine.run(cfg)
    rate = 4e7 / (time.perf_counter() - t0)
    assert rate >= 1e7, f"{rate:.3g} steps/s"


# -- W ---------------------------------------------------------------------------------


def test_w_estimate_requires_large():
    with pytest.raises(RegimeMismatch):
        engine.w_estimate(SimConfig(SMALL, 100, 10, 1))


def test_w_estimate_against_exact_finite_n():
    n, reps = 10**4, 2 * 10**4
    w = engine.w_estimate(SimConfig(LARGE, n, reps, 31))
    e1, e2 = formulas.w_sample_moments_exact(LARGE, n)
    assert abs(w.mean() - e1) <= 3 * w.std(ddof=1) / np.sqrt(reps)
    assert abs((w**2).mean() - e2) <= 3 * (w**2).std(ddof=1) / np.sqrt(reps)


def test_w_mean_zero(large_w_run):
    _, w, _ = large_w_run
    assert abs(w.mean()) <= 3 * w.std(ddof=1) / np.sqrt(len(w))


def test_w_second_moment_against_limit(large_w_run):
    model, w, _ = large_w_run
    _, ew2 = formulas.large_urn_moments(model)
    se = (w**2).std(ddof=1) / np.sqrt(len(w))
    assert abs((w**2).mean() - ew2) <= 3 * se


def test_w_second_moment_stable_under_tenfold_horizon(large_w_run):
    model, w, _ = large_w_run
    w_small = engine.w_estimate(SimConfig(model, 10**4, len(w), 4242))
    se = (w**2).std(ddof=1) / np.sqrt(len(w))
    assert abs((w**2).mean() - (w_small**2).mean()) < 2 * se


def test_w_second_moment_against_exact_finite_n(large_w_run):
    model, w, _ = large_w_run
    _, e2 = formulas.w_sample_moments_exact(model, 10**5)
    se = (w**2).std(ddof=1) / np.sqrt(len(w))
    assert abs((w**2).mean() - e2) <= 3 * se
