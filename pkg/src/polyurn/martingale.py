"""Martingales attached to a simulated trajectory.

Traditional urns: ``M_n = X_n / tau_n`` with
``<M>_n = sum_{k<n} S^2 M_k (1 - M_k) / tau_{k+1}^2``.

Generalized urns: ``M_n = sigma_n (U_n - E[U_n])``, always a multiple of
``(1, -1)``, with ``<M>_n = m^2 J sum_{k<n} sigma_{k+1}^2 p_k (1 - p_k)``
where ``p_k = X_k / tau_k`` and ``J = [[1, -1], [-1, 1]]``.

Both are accumulated over every step, also for checkpointed trajectories.
"""

from dataclasses import dataclass

import numpy as np

from . import formulas
from .errors import RegimeMismatch
from .model import Regime, Trajectory
from .numeric import compensated_cumsum

J = np.array([[1.0, -1.0], [-1.0, 1.0]])


@dataclass
class MartingalePath:
    base: Trajectory
    n: np.ndarray
    values: np.ndarray  # (K,) traditional, (K, 2) generalized
    qvar: np.ndarray  # (K,) traditional, (K, 2, 2) generalized

    @property
    def scalar(self):
        return self.values.ndim == 1

    @property
    def coefficient(self):
        """Scalar path: M_n itself, or the coordinate of M_n along (1, -1)."""
        return self.values if self.scalar else self.values[:, 0]

    @property
    def qvar_coefficient(self):
        return self.qvar if self.scalar else self.qvar[:, 0, 0]


def _totals(model, horizon):
    return model.tau + np.arange(horizon + 1, dtype=np.int64) * model.S


def traditional_mart(traj):
    model = traj.model
    if model.regime is not Regime.TRADITIONAL:
        raise RegimeMismatch(f"X_n/tau_n is a martingale only for traditional urns, not {model.regime}")
    X = traj.full_counts()
    tot = _totals(model, traj.horizon)
    M = X / tot
    terms = model.S**2 * M[:-1] * (1 - M[:-1]) / tot[1:].astype(float) ** 2
    q = np.concatenate([[0.0], compensated_cumsum(terms)])
    return MartingalePath(traj, traj.n, M[traj.n], q[traj.n])


def _generalized_pieces(traj):
    model = traj.model
    if model.regime is Regime.TRADITIONAL:
        raise RegimeMismatch("generalized martingale needs b + c > 0")
    X = traj.full_counts()
    tot = _totals(model, traj.horizon)
    sig = formulas.sigma_seq(model, traj.horizon)
    ex = formulas.mean_X(model, np.arange(traj.horizon + 1), sig)
    return model, X, tot, sig, ex


def generalized_mart(traj):
    model, X, tot, sig, ex = _generalized_pieces(traj)
    idx = traj.n
    dev_x = X[idx] - ex[idx]
    dev_y = (traj.Y - tot[idx]) + ex[idx]  # Y - E[Y] with E[Y] = tau_n - E[X]
    values = np.stack([sig[idx] * dev_x, sig[idx] * dev_y], axis=1)
    p = X[:-1] / tot[:-1]
    terms = model.m**2 * sig[1:] ** 2 * p * (1 - p)
    q = np.concatenate([[0.0], compensated_cumsum(terms)])
    return MartingalePath(traj, idx, values, q[idx, None, None] * J)


def generalized_increments(traj):
    """Coefficients along (1, -1) of Delta M_{k+1} = m sigma_{k+1} (eps_{k+1} - p_k), k < N."""
    model, X, tot, sig, _ = _generalized_pieces(traj)
    eps = traj.draws.astype(float)
    return model.m * sig[1:] * (eps - X[:-1] / tot[:-1])


def martingale(traj):
    """The martingale appropriate to the trajectory's model."""
    if traj.model.regime is Regime.TRADITIONAL:
        return traditional_mart(traj)
    return generalized_mart(traj)
