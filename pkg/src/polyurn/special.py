"""Ratios of Gamma functions without overflow or cancellation.

``lgamma(x) - lgamma(y)`` loses absolute accuracy once the arguments are
large (the individual terms grow like x log x).  Here the difference is
formed directly from Stirling's series, written with ``log1p`` so that
nearby arguments keep full relative accuracy, after shifting small or
negative arguments upward by the recurrence Gamma(z+1) = z Gamma(z).
"""

import math

import numpy as np

from .errors import GammaPole

_SHIFT_TO = 15.0
# B_2k / (2k (2k-1)) for k = 1..8
_STIRLING = (
    1 / 12,
    -1 / 360,
    1 / 1260,
    -1 / 1680,
    1 / 1188,
    -691 / 360360,
    1 / 156,
    -3617 / 122400,
)


def _is_pole(z):
    return z <= 0 and z == math.floor(z)


def _stirling_diff(u, s):
    """log Gamma(u+s) - log Gamma(u) for u, u+s >= _SHIFT_TO (numpy-aware)."""
    v = u + s
    out = (u - 0.5) * np.log1p(s / u) + s * np.log(v) - s
    iu, iv = 1.0 / u, 1.0 / v
    iu2, iv2 = iu * iu, iv * iv
    pu, pv = iu, iv
    for coef in _STIRLING:
        out = out + coef * (pv - pu)
        pu, pv = pu * iu2, pv * iv2
    return out


def log_poch(y, d):
    """Return ``(log|Gamma(y+d)/Gamma(y)|, sign)``.

    The gap ``d`` is passed separately so it never has to be recovered by
    subtracting two large arguments.  Raises GammaPole at nonpositive
    integer arguments.
    """
    y, d = float(y), float(d)
    x = y + d
    if _is_pole(x) or _is_pole(y):
        raise GammaPole(f"Gamma pole in ratio Gamma({x})/Gamma({y})")
    shift = max(0, math.ceil(_SHIFT_TO - min(x, y)))
    logr, sign = 0.0, 1
    # Gamma(y+d)/Gamma(y) = Gamma(y+N+d)/Gamma(y+N) * prod_j (y+j)/(y+j+d)
    for j in range(shift):
        q = d / (y + j)
        if q > -1.0:
            logr -= math.log1p(q)
        else:
            logr -= math.log(abs(1.0 + q))
            if 1.0 + q < 0:
                sign = -sign
    logr += float(_stirling_diff(y + shift, d))
    return logr, sign


def poch(y, d):
    """Gamma(y+d) / Gamma(y) as a float."""
    logr, sign = log_poch(y, d)
    return sign * math.exp(logr)


def log_gamma_ratio(x, y):
    """``(log|Gamma(x)/Gamma(y)|, sign)``; prefer :func:`log_poch` when x - y is known exactly."""
    return log_poch(y, x - y)


def gamma_ratio(x, y):
    """Gamma(x) / Gamma(y) as a float."""
    return poch(y, x - y)


def log_poch_large(y, d):
    """Vectorised log(Gamma(y+d)/Gamma(y)) for arrays with y, y+d >= 15."""
    y = np.asarray(y, dtype=float)
    if np.any(y < _SHIFT_TO) or np.any(y + d < _SHIFT_TO):
        raise ValueError("vectorised ratio needs arguments >= 15; use log_poch")
    return _stirling_diff(y, d)


def _bernoulli_numbers(n):
    """B_0..B_n as exact fractions (B_1 = -1/2)."""
    from fractions import Fraction

    B = [Fraction(0)] * (n + 1)
    B[0] = Fraction(1)
    for m in range(1, n + 1):
        B[m] = -sum(math.comb(m + 1, k) * B[k] for k in range(m)) / (m + 1)
    return B


def _bernoulli_poly(n, a, B):
    return sum(math.comb(n, k) * float(B[k]) * a ** (n - k) for k in range(n + 1))


def ratio_expansion(a, b, order):
    """Coefficients e_0..e_order with
    Gamma(x+a)/Gamma(x+b) ~ x^(a-b) * sum_j e_j x^(-j)  as x -> infinity.
    """
    B = _bernoulli_numbers(order + 1)
    # log of the ratio: (a-b) log x + sum_n (-1)^(n+1) (B_{n+1}(a) - B_{n+1}(b)) / (n(n+1)) x^-n
    logc = [0.0] * (order + 1)
    for n in range(1, order + 1):
        logc[n] = (-1) ** (n + 1) * (_bernoulli_poly(n + 1, a, B) - _bernoulli_poly(n + 1, b, B)) / (
            n * (n + 1)
        )
    # exp of a power series with zero constant term: e' = (log)' e
    e = [0.0] * (order + 1)
    e[0] = 1.0
    for n in range(1, order + 1):
        e[n] = sum(k * logc[k] * e[n - k] for k in range(1, n + 1)) / n
    return e
