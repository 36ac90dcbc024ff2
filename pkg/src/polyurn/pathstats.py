"""Single-path functionals: quadratic strong law sums and LIL ratios."""

import math

import numpy as np

from .errors import DegenerateUrn, RegimeMismatch
from .model import Regime

LIL_MIN_K = 16  # first k with log log k > 1


def deviation_sq_norm(model, X, ns):
    """||U_k - k v1||^2 for red counts X at steps ns."""
    v1x = float(model.v1[0])
    dx = X - ns * v1x
    dy = model.tau - dx  # (X + Y) - k S = tau
    return dx * dx + dy * dy


def _check(model):
    if model.regime not in (Regime.SMALL, Regime.CRITICAL):
        raise RegimeMismatch(f"quadratic strong law is stated for small/critical urns, not {model.regime}")
    if model.b * model.c == 0:
        raise DegenerateUrn("the quadratic strong law assumes bc != 0")


def _qsl_normalise(model, dev):
    """Apply the QSL weights and normalisation to ||U_k - k v1||^2, k = 0..N."""
    N = len(dev) - 1
    k = np.arange(N + 1, dtype=float)
    out = np.full(N + 1, np.nan)
    with np.errstate(divide="ignore", invalid="ignore"):
        if model.regime is Regime.SMALL:
            sums = np.cumsum(dev[1:] / k[1:] ** 2)
            out[2:] = sums[1:] / np.log(k[2:])
        else:
            sums = np.cumsum(dev[2:] / (k[2:] * np.log(k[2:])) ** 2)
            out[3:] = sums[1:] / np.log(np.log(k[3:]))
    return out


def qsl_curve(model, X):
    """Normalised QSL sums Q_n for n = 0..N given X_0..X_N (nan where undefined).

    Small:    Q_n = (1/log n)     sum_{k=1}^n ||U_k - k v1||^2 / k^2
    Critical: Q_n = (1/log log n) sum_{k=2}^n ||U_k - k v1||^2 / (k log k)^2
    """
    _check(model)
    k = np.arange(len(X), dtype=float)
    return _qsl_normalise(model, deviation_sq_norm(model, np.asarray(X, dtype=float), k))


def qsl_expected(model, n):
    """Exact E[Q_n], from the first two moments of X_k."""
    from .formulas import composition_moment_seq

    _check(model)
    E, V = composition_moment_seq(model, n)
    k = np.arange(n + 1, dtype=float)
    dx = E - k * float(model.v1[0])
    # E[dx^2 + (tau - dx)^2]
    dev = 2 * (V + dx * dx) - 2 * model.tau * dx + model.tau**2
    return float(_qsl_normalise(model, dev)[-1])


def qsl_constant(model):
    """Almost-sure limit of Q_n: 2 gamma (small) or 2 bc (critical)."""
    from .formulas import clt_gamma

    _check(model)
    return 2 * clt_gamma(model)


def lil_ratio(model, X):
    """LIL ratio at each step (nan below k = 16).

    Small:    ||U_k - k v1||^2 / (2 k log log k)
    Critical: ||U_k - k v1||^2 / (2 k log k log log log k)

    The critical deviation grows like sqrt(k log k), so the factor k is
    needed for a finite limsup.
    """
    _check(model)
    N = len(X) - 1
    k = np.arange(N + 1, dtype=float)
    dev = deviation_sq_norm(model, np.asarray(X, dtype=float), k)
    out = np.full(N + 1, np.nan)
    if N < LIL_MIN_K:
        return out
    kk = k[LIL_MIN_K:]
    if model.regime is Regime.SMALL:
        norm = 2 * kk * np.log(np.log(kk))
    else:
        norm = 2 * kk * np.log(kk) * np.log(np.log(np.log(kk)))
    out[LIL_MIN_K:] = dev[LIL_MIN_K:] / norm
    return out


def running_sup(x, start):
    """max of x[start..n] for each n >= start (nan before)."""
    out = np.full(len(x), np.nan)
    if start < len(x):
        out[start:] = np.maximum.accumulate(x[start:])
    return out


def lil_window_start(n):
    return max(LIL_MIN_K, math.isqrt(n))
