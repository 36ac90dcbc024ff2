"""Monte Carlo replication harness.

Replicate ``r`` always consumes stream ``r`` of the master seed, and
replicates are processed in fixed-size chunks whose moment accumulators are
merged in chunk order, so results do not depend on how many worker threads
ran the chunks.
"""

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _backend, formulas
from .errors import RegimeMismatch
from .model import Regime, UrnModel, red_counts
from .pathstats import qsl_curve
from .rng import check_seed


class Functional(enum.Enum):
    FINAL_STATE = "final_state"  # X_n / tau_n
    SCALED_DEVIATION = "scaled_deviation"  # (1,-1)/sqrt2 projection of (U_n - n v1)/scale_n
    MARTINGALE_PATH = "martingale_path"  # M_n (coefficient along (1,-1) when generalized)
    W_ESTIMATE = "w_estimate"  # v2-coordinate of (U_n - n v1)/n^s
    QSL_SUM = "qsl_sum"  # normalised quadratic strong law sum


class MomentAccumulator:
    """Streaming count, mean and central moments M2..M4, column-wise.

    ``merge`` uses the pairwise update formulas, so any partition of the
    data merges to the same moments (up to rounding).
    """

    def __init__(self, width=1):
        self.count = 0
        self.mean = np.zeros(width)
        self.m2 = np.zeros(width)
        self.m3 = np.zeros(width)
        self.m4 = np.zeros(width)

    @classmethod
    def from_samples(cls, x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        acc = cls(x.shape[1])
        if len(x):
            acc.count = len(x)
            acc.mean = x.mean(axis=0)
            d = x - acc.mean
            d2 = d * d
            acc.m2 = d2.sum(axis=0)
            acc.m3 = (d2 * d).sum(axis=0)
            acc.m4 = (d2 * d2).sum(axis=0)
        return acc

    def push(self, x):
        self.merge(MomentAccumulator.from_samples(x))
        return self

    def merge(self, other):
        na, nb = self.count, other.count
        if nb == 0:
            return self
        if na == 0:
            self.count = nb
            self.mean, self.m2, self.m3, self.m4 = (
                other.mean.copy(), other.m2.copy(), other.m3.copy(), other.m4.copy())
            return self
        n = na + nb
        delta = other.mean - self.mean
        d2 = delta * delta
        m4 = (self.m4 + other.m4
              + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / n**3
              + 6 * d2 * (na * na * other.m2 + nb * nb * self.m2) / n**2
              + 4 * delta * (na * other.m3 - nb * self.m3) / n)
        m3 = (self.m3 + other.m3
              + d2 * delta * na * nb * (na - nb) / n**2
              + 3 * delta * (na * other.m2 - nb * self.m2) / n)
        self.m2 = self.m2 + other.m2 + d2 * na * nb / n
        self.mean = self.mean + delta * nb / n
        self.m3, self.m4 = m3, m4
        self.count = n
        return self

    @property
    def var(self):
        return self.m2 / (self.count - 1)

    @property
    def std(self):
        return np.sqrt(self.var)

    @property
    def sem(self):
        return self.std / math.sqrt(self.count)

    @property
    def skewness(self):
        return math.sqrt(self.count) * self.m3 / self.m2**1.5

    @property
    def kurtosis(self):
        """Non-excess kurtosis (3 for a Gaussian)."""
        return self.count * self.m4 / self.m2**2


@dataclass
class SimConfig:
    model: UrnModel
    horizon: int
    reps: int
    master_seed: int
    functional: Functional = Functional.FINAL_STATE
    checkpoints: tuple = ()
    chunk: int = 4096
    workers: int = 1
    stream_offset: int = 0

    def __post_init__(self):
        self.functional = Functional(self.functional)
        self.master_seed = check_seed(self.master_seed)
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        self.model.check_horizon(self.horizon)
        ck = tuple(int(c) for c in self.checkpoints) or (self.horizon,)
        if list(ck) != sorted(set(ck)) or ck[0] < 0 or ck[-1] > self.horizon:
            raise ValueError("checkpoints must be strictly increasing within [0, horizon]")
        self.checkpoints = ck
        if self.chunk < 1 or self.workers < 1:
            raise ValueError("chunk and workers must be positive")
        self._check_functional()

    def _check_functional(self):
        reg = self.model.regime
        f = self.functional
        if f is Functional.W_ESTIMATE and reg is not Regime.LARGE:
            raise RegimeMismatch(f"W is defined for large urns, not {reg}")
        if f is Functional.SCALED_DEVIATION and reg is Regime.TRADITIONAL:
            raise RegimeMismatch("scaled deviation from n v1 needs b + c > 0")
        if f is Functional.QSL_SUM and reg not in (Regime.SMALL, Regime.CRITICAL):
            raise RegimeMismatch(f"quadratic strong law is stated for small/critical urns, not {reg}")
        if f in (Functional.SCALED_DEVIATION, Functional.W_ESTIMATE, Functional.QSL_SUM):
            least = 3 if reg is Regime.CRITICAL else 2 if f is Functional.QSL_SUM else 1
            if self.checkpoints[0] < least:
                raise ValueError(f"{f.value} needs checkpoints >= {least}")


@dataclass
class SimResult:
    config: SimConfig
    checkpoints: np.ndarray
    values: np.ndarray  # reps x checkpoints
    counts: np.ndarray | None  # red counts, reps x checkpoints (None for QSL_SUM)
    stats: MomentAccumulator = field(repr=False)

    def mean(self):
        return self.stats.mean

    def sem(self):
        return self.stats.sem

    def ecdf(self, j=-1):
        """Sorted sample and its empirical CDF at checkpoint column j."""
        x = np.sort(self.values[:, j])
        return x, np.arange(1, len(x) + 1) / len(x)


def scale_deviation(model, ns):
    ns = np.asarray(ns, dtype=float)
    reg = model.regime
    if reg is Regime.SMALL:
        return np.sqrt(ns)
    if reg is Regime.CRITICAL:
        return np.sqrt(ns * np.log(ns))
    if reg is Regime.LARGE:
        return ns ** (model.m / model.S)
    raise RegimeMismatch("no deviation scaling for traditional urns")


def functional_values(model, functional, X, ns):
    """Per-replicate functional values from red counts X (reps x len(ns))."""
    ns = np.asarray(ns, dtype=np.int64)
    tot = model.tau + ns * model.S
    Xf = X.astype(float)
    if functional is Functional.FINAL_STATE:
        return Xf / tot
    if functional is Functional.MARTINGALE_PATH:
        if model.regime is Regime.TRADITIONAL:
            return Xf / tot
        sig = np.array([formulas.sigma_n(model, int(k)) for k in ns])
        return sig * (Xf - formulas.mean_X(model, ns, sig))
    dev = Xf - ns * float(model.v1[0])
    if functional is Functional.SCALED_DEVIATION:
        return (2 * dev - model.tau) / math.sqrt(2) / scale_deviation(model, ns)
    if functional is Functional.W_ESTIMATE:
        return dev * (model.b + model.c) / model.S / scale_deviation(model, ns)
    raise ValueError(f"{functional} is not computed from checkpoint counts")


def _run_chunk(config, start, size):
    model = config.model
    k = _backend.kernels
    ck = np.asarray(config.checkpoints, dtype=np.int64)
    stream0 = config.stream_offset + start
    if config.functional is Functional.QSL_SUM:
        vals = np.empty((size, len(ck)))
        for i in range(size):
            draws, _ = k.draw_path(model.alpha, model.tau, model.S, model.c, model.m,
                                   config.horizon, config.master_seed, stream0 + i, 0)
            vals[i] = qsl_curve(model, red_counts(model, draws))[ck]
        return None, vals
    X = k.batch_counts(model.alpha, model.tau, model.S, model.c, model.m, config.horizon,
                       config.master_seed, stream0, size, ck)
    return X, functional_values(model, config.functional, X, ck)


def run(config):
    """Run all replicates; deterministic in (config, master_seed)."""
    starts = list(range(0, config.reps, config.chunk))
    sizes = [min(config.chunk, config.reps - s) for s in starts]
    if config.workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(config.workers) as pool:
            parts = list(pool.map(lambda a: _run_chunk(config, *a), zip(starts, sizes)))
    else:
        parts = [_run_chunk(config, s, n) for s, n in zip(starts, sizes)]
    stats = MomentAccumulator(len(config.checkpoints))
    for _, vals in parts:
        stats.merge(MomentAccumulator.from_samples(vals))
    values = np.concatenate([v for _, v in parts])
    counts = None if parts[0][0] is None else np.concatenate([x for x, _ in parts])
    return SimResult(config, np.asarray(config.checkpoints), values, counts, stats)


def w_estimate(config):
    """Per-replicate W estimates (X_n - n v1_x)(b+c)/(S n^s) at the horizon."""
    if config.model.regime is not Regime.LARGE:
        raise RegimeMismatch(f"W is defined for large urns, not {config.model.regime}")
    cfg = SimConfig(config.model, config.horizon, config.reps, config.master_seed,
                    Functional.W_ESTIMATE, (config.horizon,), config.chunk, config.workers,
                    config.stream_offset)
    return run(cfg).values[:, 0]
