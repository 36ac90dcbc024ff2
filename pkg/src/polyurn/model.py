"""Balanced two-colour urn: model, states, trajectories and simulation."""

import csv
import enum
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _backend
from .errors import BalanceViolation, EmptyUrn, OverflowHorizon, ZeroGrowth
from .rng import RandomStream

COUNT_LIMIT = 2**63 - 1


class Regime(enum.Enum):
    TRADITIONAL = "Traditional"
    SMALL = "Small"
    CRITICAL = "Critical"
    LARGE = "Large"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class UrnModel:
    """Replacement matrix ``R = [[a, b], [c, d]]`` and initial composition.

    Drawing red adds ``a`` red and ``b`` white balls; drawing white adds
    ``c`` red and ``d`` white.  Use :func:`build_model` or the constructor;
    both validate.
    """

    a: int
    b: int
    c: int
    d: int
    alpha: int
    beta: int

    def __post_init__(self):
        for name in ("a", "b", "c", "d", "alpha", "beta"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v or v < 0:
                raise ValueError(f"{name} must be a nonnegative integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        if self.a + self.b != self.c + self.d:
            raise BalanceViolation(
                f"a+b={self.a + self.b} but c+d={self.c + self.d}; the urn is not balanced"
            )
        if self.a + self.b == 0:
            raise ZeroGrowth("a+b = c+d = 0: no balls are ever added")
        if self.alpha + self.beta == 0:
            raise EmptyUrn("alpha + beta = 0: cannot draw from an empty urn")

    @property
    def S(self):
        return self.a + self.b

    @property
    def m(self):
        return self.a - self.c

    @property
    def tau(self):
        return self.alpha + self.beta

    @property
    def sigma(self):
        return Fraction(self.m, self.S)

    @property
    def v1(self):
        """Eigenvector of R^T for S, or None when b + c = 0."""
        bc = self.b + self.c
        if bc == 0:
            return None
        f = Fraction(self.S, bc)
        return (f * self.c, f * self.b)

    @property
    def v2(self):
        """Eigenvector of R^T for m, or None when b + c = 0."""
        bc = self.b + self.c
        if bc == 0:
            return None
        f = Fraction(self.S, bc)
        return (f, -f)

    @property
    def regime(self):
        s = self.sigma
        if self.b + self.c == 0:
            return Regime.TRADITIONAL
        if s < Fraction(1, 2):
            return Regime.SMALL
        if s == Fraction(1, 2):
            return Regime.CRITICAL
        return Regime.LARGE

    @property
    def rows(self):
        return (self.a, self.b), (self.c, self.d)

    def total(self, n):
        """Number of balls after n draws."""
        return self.tau + n * self.S

    def max_horizon(self):
        return (COUNT_LIMIT - self.tau) // self.S

    def check_horizon(self, horizon):
        if horizon < 0:
            raise ValueError("horizon must be nonnegative")
        if horizon > self.max_horizon():
            raise OverflowHorizon(
                f"tau + N*S = {self.total(horizon)} exceeds the 64-bit count limit"
            )

    def label(self):
        return f"R=({self.a},{self.b};{self.c},{self.d}) U0=({self.alpha},{self.beta})"

    def as_dict(self):
        return {k: getattr(self, k) for k in ("a", "b", "c", "d", "alpha", "beta")}


def build_model(a, b, c, d, alpha, beta):
    """Validated :class:`UrnModel`; raises BalanceViolation, EmptyUrn or ZeroGrowth."""
    return UrnModel(a, b, c, d, alpha, beta)


@dataclass(frozen=True)
class UrnState:
    n: int
    X: int
    Y: int

    @property
    def vector(self):
        return (self.X, self.Y)


def initial_state(model):
    return UrnState(0, model.alpha, model.beta)


def step(state, model, draw):
    """Add row (a, b) to the composition when ``draw`` is 1, else row (c, d)."""
    dx, dy = model.rows[0] if draw else model.rows[1]
    return UrnState(state.n + 1, state.X + dx, state.Y + dy)


@dataclass
class Trajectory:
    """A simulated path.

    ``n``, ``X`` and ``Y`` hold the recorded states (every step, or only the
    checkpoints).  ``draws`` holds all draw bits packed eight per byte, so
    full-resolution quantities can be rebuilt from a checkpointed path.
    """

    model: UrnModel
    n: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    packed_draws: np.ndarray | None
    horizon: int

    @property
    def draws(self):
        if self.packed_draws is None:
            return None
        return np.unpackbits(self.packed_draws, count=self.horizon)

    @property
    def is_full(self):
        return len(self.n) == self.horizon + 1

    def states(self):
        return [UrnState(int(k), int(x), int(y)) for k, x, y in zip(self.n, self.X, self.Y)]

    def full_counts(self):
        """Red counts X_0..X_N at every step (rebuilt from draws if needed)."""
        if self.is_full:
            return self.X
        if self.packed_draws is None:
            raise ValueError("checkpointed trajectory without draws cannot be expanded")
        return red_counts(self.model, self.draws)

    def check(self):
        """Raise AssertionError unless the trajectory invariants hold."""
        mod = self.model
        n = np.asarray(self.n, dtype=np.int64)
        X = np.asarray(self.X, dtype=np.int64)
        Y = np.asarray(self.Y, dtype=np.int64)
        assert len(n) == len(X) == len(Y) and len(n) > 0, "empty or ragged trajectory"
        assert n[0] == 0 and X[0] == mod.alpha and Y[0] == mod.beta, "wrong initial state"
        assert np.all(np.diff(n) > 0), "step indices must increase"
        assert np.all(X >= 0) and np.all(Y >= 0), "negative ball count"
        assert np.all(X + Y == mod.tau + n * mod.S), "X + Y != tau + n*S"
        consecutive = np.diff(n) == 1
        dx, dy = np.diff(X)[consecutive], np.diff(Y)[consecutive]
        red = (dx == mod.a) & (dy == mod.b)
        white = (dx == mod.c) & (dy == mod.d)
        assert np.all(red | white), "increment is not a row of R"
        draws = self.draws
        if draws is not None:
            assert len(draws) == self.horizon
            assert np.array_equal(X, red_counts(mod, draws)[n]), "states disagree with draws"
        return True

    def write_csv(self, path_or_file):
        """Write columns n,X,Y."""
        own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
        fh = open(path_or_file, "w", newline="") if own else path_or_file
        try:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["n", "X", "Y"])
            for row in zip(self.n.tolist(), self.X.tolist(), self.Y.tolist()):
                w.writerow(row)
        finally:
            if own:
                fh.close()

    @classmethod
    def read_csv(cls, path, model):
        """Load an n,X,Y file. Draws are recovered when every step is present and a != c."""
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        n = np.array([int(r["n"]) for r in rows], dtype=np.int64)
        X = np.array([int(r["X"]) for r in rows], dtype=np.int64)
        Y = np.array([int(r["Y"]) for r in rows], dtype=np.int64)
        horizon = int(n[-1]) if len(n) else 0
        packed = None
        if len(n) == horizon + 1 and model.a != model.c:
            draws = (np.diff(X) == model.a).astype(np.uint8)
            packed = np.packbits(draws)
        return cls(model, n, X, Y, packed, horizon)


def red_counts(model, draws):
    """X_0..X_N implied by a draw sequence."""
    draws = np.asarray(draws, dtype=np.int64)
    X = np.empty(len(draws) + 1, dtype=np.int64)
    X[0] = model.alpha
    np.cumsum(model.c + model.m * draws, out=X[1:])
    X[1:] += model.alpha
    return X


def trajectory_from_draws(model, draws, checkpoints=None):
    draws = np.asarray(draws, dtype=np.uint8)
    horizon = len(draws)
    model.check_horizon(horizon)
    X = red_counts(model, draws)
    if checkpoints is None:
        n = np.arange(horizon + 1, dtype=np.int64)
    else:
        n = _normalise_checkpoints(checkpoints, horizon)
        X = X[n]
    Y = model.tau + n * model.S - X
    return Trajectory(model, n, X, Y, np.packbits(draws), horizon)


def _normalise_checkpoints(checkpoints, horizon):
    n = np.unique(np.asarray(list(checkpoints), dtype=np.int64))
    if len(n) and (n[0] < 0 or n[-1] > horizon):
        raise ValueError("checkpoints must lie in [0, horizon]")
    return np.union1d(n, [0, horizon]).astype(np.int64)


def log_checkpoints(horizon, per_decade=20):
    """Roughly log-spaced step indices from 0 to horizon inclusive."""
    if horizon <= 0:
        return np.zeros(1, dtype=np.int64)
    pts = np.logspace(0, np.log10(horizon), int(per_decade * np.log10(horizon)) + 2)
    return np.union1d(np.unique(np.floor(pts).astype(np.int64)), [0, horizon])


def simulate(model, horizon, rng, checkpoints=None):
    """Simulate ``horizon`` draws, advancing ``rng``.

    Draw k+1 is red iff a uniform integer in ``[0, tau_k)`` falls below
    ``X_k``.  With ``checkpoints`` only those states (plus 0 and the horizon)
    are stored; the draw bits are always kept.
    """
    model.check_horizon(horizon)
    if not isinstance(rng, RandomStream):
        raise TypeError("rng must be a RandomStream")
    draws, end = _backend.kernels.draw_path(
        model.alpha, model.tau, model.S, model.c, model.m, horizon,
        rng.master_seed, rng.stream_id, rng.position,
    )
    rng.position = int(end)
    return trajectory_from_draws(model, draws, checkpoints)
