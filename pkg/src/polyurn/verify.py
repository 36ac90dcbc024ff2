"""Statistical checks of the limit theorems and an exact enumeration oracle.

Every check is deterministic in its seed and returns a :class:`VerifyReport`.
Gating checks set ``passed`` to a bool; diagnostics set it to ``None``.
"""

import hashlib
import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import stats

from . import engine, formulas
from .engine import Functional, SimConfig
from .errors import DegenerateProxy, DegenerateUrn, RegimeMismatch, TooLarge
from .model import Regime, build_model, simulate
from .pathstats import (lil_ratio, lil_window_start, qsl_constant, qsl_curve, qsl_expected,
                        running_sup)
from .rng import RandomStream

ORACLE_MAX_N = 12
PROXY_RATIO = 100
KS_LEVEL = 0.01

GRID_MATRICES = ((1, 0, 0, 1), (2, 1, 1, 2), (3, 1, 1, 3), (4, 1, 1, 4))
GRID_INITS = ((1, 1), (2, 1))


def grid_models():
    return [build_model(*r, *i) for r in GRID_MATRICES for i in GRID_INITS]


def derive_seed(seed, name):
    """Per-check 64-bit seed from the suite seed and the check name."""
    h = hashlib.blake2b(f"{seed}:{name}".encode(), digest_size=8)
    return int.from_bytes(h.digest(), "little")


def _clean(x):
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


@dataclass
class VerifyReport:
    name: str
    statistic: float
    reference: float
    tolerance: float | None
    passed: bool | None
    seed: int | None = None
    reps: int | None = None
    horizon: int | None = None
    notes: str = ""
    details: dict = field(default_factory=dict)

    @property
    def gating(self):
        return self.passed is not None

    def to_dict(self):
        return _clean({
            "name": self.name,
            "statistic": self.statistic,
            "reference": self.reference,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "seed": self.seed,
            "reps": self.reps,
            "horizon": self.horizon,
            "notes": self.notes,
            "details": self.details,
        })

    def to_json(self):
        return json.dumps(self.to_dict())


def _criterion(name, statistic, reference, tolerance):
    ok = bool(abs(statistic - reference) <= tolerance)
    return {"name": name, "statistic": statistic, "reference": reference,
            "tolerance": tolerance, "pass": ok}


def _ks_critical(n):
    return float(stats.kstwo.ppf(1 - KS_LEVEL, n))


# -- exact oracle -------------------------------------------------------------


def enumerate_paths(model, n):
    """Yield (draws, probability, X_n) for all 2^n draw sequences (zero-probability ones included)."""
    if n > ORACLE_MAX_N:
        raise TooLarge(f"enumeration of 2^{n} paths exceeds the n <= {ORACLE_MAX_N} limit")
    a, c = model.a, model.c
    for draws in itertools.product((1, 0), repeat=n):
        x, prob = model.alpha, Fraction(1)
        for k, e in enumerate(draws):
            tk = model.total(k)
            prob *= Fraction(x, tk) if e else Fraction(tk - x, tk)
            x += a if e else c
        yield draws, prob, x


@dataclass
class OracleDistribution:
    model: object
    n: int
    support: dict  # (X, Y) -> Fraction

    def expect(self, f):
        return sum(p * f(x, y) for (x, y), p in self.support.items())

    def mean(self):
        return (self.expect(lambda x, y: x), self.expect(lambda x, y: y))

    def var_x(self):
        ex = self.expect(lambda x, y: x)
        return self.expect(lambda x, y: (x - ex) ** 2)


def oracle_enumerate(model, n):
    """Exact law of U_n by summing over every draw sequence."""
    support = {}
    tot = model.total(n)
    for _, p, x in enumerate_paths(model, n):
        if p:
            support[(x, tot - x)] = support.get((x, tot - x), 0) + p
    return OracleDistribution(model, n, support)


def check_oracle(models=None, n_max=10):
    models = grid_models() if models is None else models
    mismatches = []
    for model in models:
        for n in range(1, n_max + 1):
            if oracle_enumerate(model, n).mean() != formulas.mean_Un_exact(model, n):
                mismatches.append([model.label(), n])
    return VerifyReport(
        name="oracle", statistic=len(mismatches), reference=0, tolerance=0,
        passed=not mismatches, horizon=n_max,
        notes="closed-form E[U_n] against exhaustive path enumeration, exact rationals",
        details={"models": [m.label() for m in models], "mismatches": mismatches})


# -- traditional urn ----------------------------------------------------------------


def _require(model, *regimes):
    if model.regime not in regimes:
        names = "/".join(r.value for r in regimes)
        raise RegimeMismatch(f"check needs a {names} urn, got {model.regime.value}")


def check_beta_limit(model, n, reps, seed):
    _require(model, Regime.TRADITIONAL)
    p, q = model.alpha / model.S, model.beta / model.S
    res = engine.run(SimConfig(model, n, reps, seed, Functional.FINAL_STATE))
    m = res.values[:, 0]
    ks = stats.kstest(m, stats.beta(p, q).cdf)
    crit = _ks_critical(reps)
    mean_ref = model.alpha / model.tau
    sem = float(res.stats.sem[0])
    return VerifyReport(
        name="beta", statistic=float(ks.statistic), reference=0.0, tolerance=crit,
        passed=bool(ks.statistic <= crit), seed=seed, reps=reps, horizon=n,
        notes=f"KS of M_n against Beta({p:g}, {q:g}) at the 1% level; "
              f"M_n lives on a grid of step 1/tau_n = {1 / model.total(n):.3g}, below the critical value",
        details={"ks_pvalue": float(ks.pvalue), "mean": float(res.mean()[0]),
                 "criteria": [_criterion("mean", float(res.mean()[0]), mean_ref, 3 * sem)]})


def check_traditional_clt(model, n, N, reps, seed):
    _require(model, Regime.TRADITIONAL)
    if N < PROXY_RATIO * n:
        raise DegenerateProxy(f"M_N proxies M_inf only for N >= {PROXY_RATIO} n (got N/n = {N / n:g})")
    res = engine.run(SimConfig(model, N, reps, seed, Functional.FINAL_STATE, (n, N)))
    mn, mN = res.values[:, 0], res.values[:, 1]
    z = math.sqrt(n) * (mN - mn) / np.sqrt(mn * (1 - mn))
    acc = engine.MomentAccumulator.from_samples(z)
    var, mean = float(acc.var[0]), float(acc.mean[0])
    kurt = float(acc.kurtosis[0])
    ks = stats.kstest(z, "norm")
    crit = _ks_critical(reps)
    crit_list = [
        _criterion("ks", float(ks.statistic), 0.0, crit),
        _criterion("variance", var, 1.0, 0.05),
        _criterion("mean", mean, 0.0, 3 * float(acc.sem[0])),
        _criterion("kurtosis", kurt, 3.0, 0.3),
    ]
    return VerifyReport(
        name="tradclt", statistic=var, reference=1.0, tolerance=0.05,
        passed=all(c["pass"] for c in crit_list), seed=seed, reps=reps, horizon=N,
        notes=f"sqrt(n)(M_N - M_n)/sqrt(M_n(1-M_n)) with n={n}, N={N} standing in for M_inf",
        details={"n": n, "N": N, "ks_pvalue": float(ks.pvalue), "criteria": crit_list})


# -- small and critical urns ---------------------------------------------------------


def _require_clt(model):
    _require(model, Regime.SMALL, Regime.CRITICAL)
    if model.b * model.c == 0:
        raise DegenerateUrn("the limit theorems assume bc != 0")


def check_clt(model, n, reps, seed):
    _require_clt(model)
    res = engine.run(SimConfig(model, n, reps, seed, Functional.SCALED_DEVIATION))
    proj = res.values[:, 0]
    ref = 2 * formulas.clt_gamma(model)
    acc = res.stats
    var = float(acc.var[0])
    ks = stats.kstest(proj, stats.norm(scale=math.sqrt(ref)).cdf)
    crit = _ks_critical(reps)
    # (1,1)-projection of U_n - E[U_n] per replicate
    X = res.counts[:, 0].astype(float)
    ex = float(formulas.mean_X(model, np.array([n]), np.array([formulas.sigma_n(model, n)]))[0])
    Y = model.total(n) - res.counts[:, 0]
    ones = np.abs((X - ex) + (Y - (model.total(n) - ex))) / math.sqrt(2)
    crit_list = [
        _criterion("variance", var, ref, 0.05 * ref),
        _criterion("ks", float(ks.statistic), 0.0, crit),
        _criterion("ones_projection", float(ones.max()), 0.0, 1e-9),
    ]
    scale = "sqrt(n)" if model.regime is Regime.SMALL else "sqrt(n log n)"
    return VerifyReport(
        name=f"clt:{model.regime.value.lower()}", statistic=var, reference=ref, tolerance=0.05 * ref,
        passed=all(c["pass"] for c in crit_list), seed=seed, reps=reps, horizon=n,
        notes=f"variance of the (1,-1)/sqrt2 projection of (U_n - n v1)/{scale} against 2 gamma",
        details={"model": model.label(), "mean": float(acc.mean[0]), "sem": float(acc.sem[0]),
                 "ks_pvalue": float(ks.pvalue), "exact_variance_at_n": _exact_proj_var(model, n),
                 "criteria": crit_list})


def _exact_proj_var(model, n):
    _, var = formulas.composition_moments(model, n)
    return 2 * var / float(engine.scale_deviation(model, n)) ** 2


def _single_path(model, horizon, seed):
    return simulate(model, horizon, RandomStream(seed)).full_counts()


def check_qsl(model, horizon, seed):
    _require_clt(model)
    X = _single_path(model, horizon, seed)
    q = float(qsl_curve(model, X)[-1])
    ref = qsl_constant(model)
    return VerifyReport(
        name=f"qsl:{model.regime.value.lower()}", statistic=q, reference=ref, tolerance=0.25 * ref,
        passed=bool(abs(q - ref) <= 0.25 * ref), seed=seed, reps=1, horizon=horizon,
        notes="one path; 25% relative tolerance since the normalisation is logarithmic",
        details={"model": model.label(), "expected_at_n": qsl_expected(model, horizon)})


def lil_diagnostic(model, horizon, seed):
    _require_clt(model)
    X = _single_path(model, horizon, seed)
    ratio = lil_ratio(model, X)
    start = lil_window_start(horizon)
    sup = float(running_sup(ratio, start)[-1])
    return VerifyReport(
        name=f"lil:{model.regime.value.lower()}", statistic=sup, reference=qsl_constant(model),
        tolerance=None, passed=None,
        seed=seed, reps=1, horizon=horizon,
        notes="diagnostic only: iterated-logarithm scales are out of reach at this horizon",
        details={"model": model.label(), "window_start": start, "ratio_at_horizon": float(ratio[-1])})


# -- large urns --------------------------------------------------------------------


def check_large_urn(model, n, reps, seed, path_horizon=10**6):
    _require(model, Regime.LARGE)
    w = engine.w_estimate(SimConfig(model, n, reps, seed))
    ew, ew2 = formulas.large_urn_moments(model)
    m1 = engine.MomentAccumulator.from_samples(w)
    m2 = engine.MomentAccumulator.from_samples(w * w)
    mean, se1 = float(m1.mean[0]), float(m1.sem[0])
    second, se2 = float(m2.mean[0]), float(m2.sem[0])
    path_seed = derive_seed(seed, "path")
    xN = int(_single_path(model, path_horizon, path_seed)[-1])
    v1 = [float(v) for v in model.v1]
    un = (xN / path_horizon, (model.total(path_horizon) - xN) / path_horizon)
    rel = max(abs(un[i] / v1[i] - 1) for i in range(2))
    exact1, exact2 = formulas.w_sample_moments_exact(model, n)
    crit_list = [
        _criterion("mean", mean, ew, 3 * se1),
        _criterion("second_moment", second, ew2, 3 * se2),
        _criterion("un_over_n", rel, 0.0, 0.01),
    ]
    return VerifyReport(
        name="large", statistic=second, reference=ew2, tolerance=3 * se2,
        passed=all(c["pass"] for c in crit_list), seed=seed, reps=reps, horizon=n,
        notes="moments of W_n against the limit moments of W; U_n/n on one path",
        details={"model": model.label(), "mean": mean, "mean_sem": se1, "second_sem": se2,
                 "exact_mean_at_n": exact1, "exact_second_at_n": exact2,
                 "un_over_n": list(un), "path_horizon": path_horizon, "path_seed": path_seed,
                 "criteria": crit_list})


# -- suite ------------------------------------------------------------------------

PROFILES = {
    "full": dict(beta=(10**4, 10**4), tradclt=(10**3, 10**5, 10**4), clt=(10**5, 10**4),
                 qsl=10**6, large=(10**5, 10**5, 10**6), oracle=10),
    "quick": dict(beta=(10**3, 2000), tradclt=(300, 3 * 10**4, 3000), clt=(10**4, 2000),
                  qsl=10**5, large=(10**4, 4000, 10**5), oracle=6),
}

CHECKS = ("oracle", "beta", "tradclt", "clt", "qsl", "lil", "large")


def _suite_plan(profile):
    p = PROFILES[profile]
    trad, small, crit, large = (build_model(*r, 1, 1) for r in GRID_MATRICES)
    return {
        "oracle": [("oracle", lambda s: check_oracle(n_max=p["oracle"]))],
        "beta": [("beta", lambda s: check_beta_limit(trad, *p["beta"], s))],
        "tradclt": [("tradclt", lambda s: check_traditional_clt(trad, *p["tradclt"], s))],
        "clt": [(f"clt:{m.regime.value.lower()}", lambda s, m=m: check_clt(m, *p["clt"], s)) for m in (small, crit)],
        "qsl": [(f"qsl:{m.regime.value.lower()}", lambda s, m=m: check_qsl(m, p["qsl"], s)) for m in (small, crit)],
        "lil": [(f"lil:{m.regime.value.lower()}", lambda s, m=m: lil_diagnostic(m, p["qsl"], s)) for m in (small, crit)],
        "large": [("large", lambda s: check_large_urn(large, *p["large"][:2], s, p["large"][2]))],
    }


def run_suite(seed, checks=CHECKS, profile="full"):
    """Run the selected checks in a fixed order; each gets a seed derived from ``seed``."""
    plan = _suite_plan(profile)
    reports = []
    for group in checks:
        for key, fn in plan[group]:
            reports.append(fn(derive_seed(seed, key)))
    return reports
