from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polyurn import engine, formulas
from polyurn.engine import Functional, SimConfig
from polyurn.errors import RegimeMismatch
from polyurn.martingale import (J, generalized_increments, generalized_mart, martingale,
                                traditional_mart)
from polyurn.model import build_model, simulate, trajectory_from_draws
from polyurn.rng import RandomStream
from polyurn.verify import enumerate_paths, grid_models

SMALL = build_model(2, 1, 1, 2, 1, 1)
CRIT = build_model(3, 1, 1, 3, 1, 1)
TRAD = build_model(1, 0, 0, 1, 1, 1)
GENERALIZED = [m for m in grid_models() if m.b + m.c]


def _path(model, draws):
    return trajectory_from_draws(model, np.array(draws, dtype=np.uint8))


def test_traditional_examples():
    mp = traditional_mart(_path(TRAD, [1]))
    assert mp.values.tolist() == pytest.approx([1 / 2, 2 / 3], rel=1e-15)
    assert mp.qvar[1] == pytest.approx(1 / 36, rel=1e-15)
    assert mp.scalar and mp.qvar[0] == 0


def test_traditional_all_red_path():
    model = build_model(2, 0, 0, 2, 1, 3)
    mp = traditional_mart(_path(model, [1] * 50))
    n = np.arange(51)
    assert np.allclose(mp.values, (1 + 2 * n) / (4 + 2 * n), rtol=1e-15)


def test_generalized_examples():
    mp = generalized_mart(_path(SMALL, [1]))
    assert mp.values[0].tolist() == [0, 0]
    assert np.array_equal(mp.qvar[0], np.zeros((2, 2)))
    assert mp.values[1] == pytest.approx([1 / 3, -1 / 3], rel=1e-15)


def test_regime_checks():
    with pytest.raises(RegimeMismatch):
        traditional_mart(_path(SMALL, [1, 0]))
    with pytest.raises(RegimeMismatch):
        generalized_mart(_path(TRAD, [1, 0]))
    assert martingale(_path(TRAD, [1])).scalar
    assert not martingale(_path(SMALL, [1])).scalar


@pytest.mark.parametrize("model", GENERALIZED, ids=lambda m: m.label())
def test_path_invariants(model):
    traj = simulate(model, 3000, RandomStream(11))
    mp = generalized_mart(traj)
    # M_n is a multiple of (1, -1)
    assert np.max(np.abs(mp.values.sum(axis=1))) <= 1e-9
    # increments rebuilt from draws
    inc = generalized_increments(traj)
    assert np.max(np.abs(np.diff(mp.coefficient) - inc)) <= 1e-9
    # <M> psd, nondecreasing, trace bounded by m^2 w_n
    q = mp.qvar_coefficient
    assert np.all(q >= 0) and np.all(np.diff(q) >= 0)
    assert np.array_equal(mp.qvar[:, 0, 1], -q)
    w = formulas.w_seq(model, traj.horizon)
    assert np.all(2 * q <= model.m**2 * w * (1 + 1e-12))


@given(st.lists(st.integers(0, 1), min_size=1, max_size=30))
def test_qvar_psd_on_any_path(draws):
    mp = generalized_mart(_path(build_model(4, 1, 1, 4, 2, 1), draws))
    for Q in mp.qvar:
        assert np.all(np.linalg.eigvalsh(Q) >= -1e-15)


def test_checkpointed_trajectory_uses_full_resolution():
    traj_full = simulate(SMALL, 5000, RandomStream(3))
    traj_ck = simulate(SMALL, 5000, RandomStream(3), checkpoints=[10, 100, 1000])
    full, ck = generalized_mart(traj_full), generalized_mart(traj_ck)
    assert np.array_equal(ck.n, [0, 10, 100, 1000, 5000])
    assert np.array_equal(ck.qvar, full.qvar[ck.n])
    assert np.array_equal(ck.values, full.values[ck.n])


@pytest.mark.parametrize("model", GENERALIZED, ids=lambda m: m.label())
def test_expected_qvar_equals_second_moment_oracle(model):
    """E<M>_n = E[M_n M_n^T], with the sum index sigma_{k+1} as printed."""
    n = 8
    eq = np.zeros((2, 2))
    for draws, p, _ in enumerate_paths(model, n):
        if p:
            eq += float(p) * generalized_mart(_path(model, draws)).qvar[-1]
    sig = formulas.sigma_n_exact(model, n)
    ex = formulas.mean_Un_exact(model, n)[0]
    second = Fraction(0)
    for draws, p, x in enumerate_paths(model, n):
        second += p * (sig * (x - ex)) ** 2
    assert eq == pytest.approx(float(second) * J, rel=1e-12)


def test_traditional_expected_qvar_oracle():
    model, n = build_model(2, 0, 0, 2, 2, 1), 9
    eq = 0.0
    second = Fraction(0)
    m0 = Fraction(model.alpha, model.tau)
    for draws, p, x in enumerate_paths(model, n):
        if p:
            eq += float(p) * traditional_mart(_path(model, draws)).qvar[-1]
            second += p * (Fraction(x, model.total(n)) - m0) ** 2
    assert eq == pytest.approx(float(second), rel=1e-12)


def test_mean_zero_over_replicates():
    res = engine.run(SimConfig(SMALL, 1000, 10**5, 5, Functional.MARTINGALE_PATH))
    assert abs(res.mean()[0]) <= 3 * res.sem()[0]


@pytest.mark.parametrize("n", [10, 100, 1000])
def test_martingale_property_binned(n):
    """Mean of Delta M_{n+1} given binned X_n / tau_n is zero."""
    res = engine.run(SimConfig(SMALL, n + 1, 10**5, 1234 + n, Functional.MARTINGALE_PATH, (n, n + 1)))
    dm = res.values[:, 1] - res.values[:, 0]
    p = res.counts[:, 0] / SMALL.total(n)
    edges = np.quantile(p, [0.2, 0.4, 0.6, 0.8])
    bins = np.digitize(p, edges)
    for b in np.unique(bins):
        d = dm[bins == b]
        if len(d) > 100:
            assert abs(d.mean()) <= 4 * d.std(ddof=1) / np.sqrt(len(d))


@pytest.mark.parametrize("model", [SMALL, CRIT], ids=["small", "critical"])
def test_qvar_over_w_tends_to_limit(model):
    n = 10**6
    mp = generalized_mart(simulate(model, n, RandomStream(99), checkpoints=[]))
    w = formulas.w_n(model, n)
    g = formulas.clt_gamma(model)
    limit = (1 - 2 * float(model.sigma)) * g if model.sigma < Fraction(1, 2) else g
    assert mp.qvar[-1] / w == pytest.approx(limit * J, rel=0.05)
