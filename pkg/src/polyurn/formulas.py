"""Closed-form quantities of the balanced urn.

Notation: ``t = tau/S`` and ``s = m/S``.  The normalising product

    sigma_n = prod_{k<n} (1 + m/tau_k)^-1
            = Gamma(n+t) Gamma(t+s) / (Gamma(t) Gamma(n+t+s))

makes ``sigma_n (U_n - E[U_n])`` a martingale; ``lambda = Gamma(t+s)/Gamma(t)``
is the limit of ``n^s sigma_n``.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import zeta

from .errors import DegenerateUrn, GammaPole, RegimeMismatch
from .model import Regime
from .numeric import compensated_cumsum
from .special import log_poch, log_poch_large, poch, ratio_expansion

EXACT_PRODUCT_MAX = 10_000
_SEQ_EXACT_HEAD = 64


def _t(model):
    return model.tau / model.S


def _s(model):
    return model.m / model.S


def _product_factors(model, k):
    num, den = model.total(k), model.total(k) + model.m
    if den == 0:
        raise GammaPole(f"sigma_n undefined: tau_{k} + m = 0")
    return num, den


# -- sigma_n ----------------------------------------------------------------


def sigma_n_exact(model, n):
    """sigma_n as an exact Fraction."""
    num = den = 1
    for k in range(n):
        p, q = _product_factors(model, k)
        num *= p
        den *= q
    return Fraction(num, den)


def sigma_product_seq(model, n_max):
    """sigma_0..sigma_{n_max} from the exact integer product, correctly rounded."""
    out = np.empty(n_max + 1)
    out[0] = 1.0
    num = den = 1
    for k in range(n_max):
        p, q = _product_factors(model, k)
        num *= p
        den *= q
        out[k + 1] = num / den
    return out


def sigma_n_product(model, n):
    return float(sigma_n_exact(model, n)) if n < 200 else float(sigma_product_seq(model, n)[-1])


def sigma_n_gamma(model, n):
    """sigma_n from the Gamma-ratio form; GammaPole at nonpositive integer arguments."""
    t, s = _t(model), _s(model)
    l1, g1 = log_poch(t, s)
    l2, g2 = log_poch(n + t, s)
    return g1 * g2 * math.exp(l1 - l2)


def sigma_n(model, n):
    """sigma_n: exact product up to n = 10^4, Gamma form beyond."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n <= EXACT_PRODUCT_MAX:
        return sigma_n_product(model, n)
    try:
        return sigma_n_gamma(model, n)
    except GammaPole:
        return sigma_n_product(model, n)


def lam(model):
    """lambda = Gamma(t+s)/Gamma(t) = lim n^s sigma_n."""
    return poch(_t(model), _s(model))


def sigma_seq(model, n_max):
    """Array sigma_0..sigma_{n_max}, accurate to a few ulps at any length."""
    head = min(n_max, _SEQ_EXACT_HEAD)
    out = np.empty(n_max + 1)
    out[: head + 1] = sigma_product_seq(model, head)
    if n_max > head:
        t, s = _t(model), _s(model)
        l1, g1 = log_poch(t, s)
        x = np.arange(head + 1, n_max + 1) + t
        out[head + 1 :] = g1 * np.exp(l1 - log_poch_large(x, s))
    return out


# -- w_n --------------------------------------------------------------------


def w_n(model, n):
    """w_n = sum_{k=1}^n sigma_k^2 (w_0 = 0)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return math.fsum(sigma_seq(model, n)[1:] ** 2)


def w_seq(model, n_max):
    """Array w_0..w_{n_max}."""
    sig = sigma_seq(model, n_max)
    out = np.empty(n_max + 1)
    out[0] = 0.0
    out[1:] = compensated_cumsum(sig[1:] ** 2)
    return out


def w_limit(model, head=1000, order=8):
    """sum_{k>=1} sigma_k^2 for s > 1/2.

    Exact partial sum to ``head`` plus the tail from the asymptotic
    expansion of sigma_k^2 summed term by term with Hurwitz zeta.
    """
    t, s = _t(model), _s(model)
    if not s > 0.5:
        raise RegimeMismatch("sum of sigma_k^2 diverges unless m/S > 1/2")
    partial = math.fsum(sigma_seq(model, head)[1:] ** 2)
    # sigma_k = lambda * Gamma(x)/Gamma(x+s), x = k + t
    e = ratio_expansion(0.0, s, order)
    sq = [sum(e[i] * e[j - i] for i in range(j + 1)) for j in range(order + 1)]
    q = head + 1 + t
    tail = math.fsum(c * zeta(2 * s + j, q) for j, c in enumerate(sq))
    return partial + lam(model) ** 2 * tail


def w_asymptote(model):
    """Growth constant of w_n for the model's regime.

    Small: lim w_n / n^(1-2s) = lambda^2/(1-2s).  Critical: lim w_n/log n =
    lambda^2.  Large: lim w_n.
    """
    reg = model.regime
    if reg is Regime.SMALL:
        return lam(model) ** 2 / (1 - 2 * _s(model))
    if reg is Regime.CRITICAL:
        return lam(model) ** 2
    if reg is Regime.LARGE:
        return w_limit(model)
    raise RegimeMismatch("w_n asymptotics are stated for generalized (b+c>0) urns")


# -- E[U_n] -------------------------------------------------------------------


def _drift(model):
    """(b alpha - c beta) / S as a Fraction."""
    return Fraction(model.b * model.alpha - model.c * model.beta, model.S)


def mean_Un_exact(model, n):
    """E[U_n] as a pair of Fractions."""
    if model.regime is Regime.TRADITIONAL:
        scale = Fraction(model.total(n), model.tau)
        return (model.alpha * scale, model.beta * scale)
    v1, v2 = model.v1, model.v2
    coef = (n + Fraction(model.tau, model.S), _drift(model) / sigma_n_exact(model, n))
    return tuple(coef[0] * v1[i] + coef[1] * v2[i] for i in range(2))


def mean_X(model, ns, sig=None):
    """E[X_n] for an array of n (``sig`` may supply sigma_n at those n)."""
    ns = np.asarray(ns)
    tot = model.tau + ns * model.S
    if model.regime is Regime.TRADITIONAL:
        return model.alpha * tot / model.tau
    if sig is None:
        sig = sigma_seq(model, int(ns.max()))[ns]
    bc = model.b + model.c
    return (tot * model.c + float(_drift(model)) * model.S / sig) / bc


def mean_Un(model, n):
    """E[U_n] as floats."""
    if model.regime is Regime.TRADITIONAL or n <= 200:
        x, y = mean_Un_exact(model, n)
        return (float(x), float(y))
    x = float(mean_X(model, np.array([n]), np.array([sigma_n(model, n)]))[0])
    return (x, model.total(n) - x)


def composition_moments(model, n, exact=False):
    """(E[X_n], Var[X_n]) from the exact first- and second-moment recursions.

    E[X_{k+1}] = E[X_k] + c + m p_k and
    Var[X_{k+1}] = (1 + 2m/tau_k) Var[X_k] + m^2 p_k (1 - p_k), p_k = E[X_k]/tau_k.
    """
    one = Fraction(1) if exact else 1.0
    ex, var = one * model.alpha, one * 0
    c, m = model.c, model.m
    for k in range(n):
        tk = model.total(k)
        p = ex / tk
        var = (1 + 2 * m * one / tk) * var + m * m * p * (1 - p)
        ex = ex + c + m * p
    return ex, var


def composition_moment_seq(model, n):
    """Arrays (E[X_k], Var[X_k]) for k = 0..n from the same recursion."""
    E, V = np.empty(n + 1), np.empty(n + 1)
    ex, var = float(model.alpha), 0.0
    c, m = model.c, model.m
    E[0], V[0] = ex, var
    for k in range(n):
        tk = model.total(k)
        p = ex / tk
        var = (1 + 2 * m / tk) * var + m * m * p * (1 - p)
        ex = ex + c + m * p
        E[k + 1], V[k + 1] = ex, var
    return E, V


# -- limit theorem constants ------------------------------------------------------


def clt_gamma(model):
    """Scalar gamma with Gamma = gamma * [[1, -1], [-1, 1]]."""
    reg = model.regime
    if reg not in (Regime.SMALL, Regime.CRITICAL):
        raise RegimeMismatch(f"no Gaussian limit with this scaling for a {reg} urn")
    b, c = model.b, model.c
    if b * c == 0:
        raise DegenerateUrn("the limit theorems assume bc != 0")
    if reg is Regime.CRITICAL:
        return float(b * c)
    s = model.sigma
    return float(Fraction(b * c * model.m**2, (b + c) ** 2) / (1 - 2 * s))


def clt_covariance(model):
    g = clt_gamma(model)
    return np.array([[g, -g], [-g, g]])


def _require_large(model):
    if model.regime is not Regime.LARGE:
        raise RegimeMismatch(f"{model.regime} urn: W moments need m/S > 1/2")


def abc_closed(model, n):
    """Closed forms of the sums A_n, B_n, C_n (large urns)."""
    _require_large(model)
    t, s = _t(model), _s(model)
    A = (poch(t + 2 * s, 1 - 2 * s) - poch(n + t + 2 * s, 1 - 2 * s)) / (2 * s - 1)
    B = (1 / poch(t + s, s) - 1 / poch(n + t + s, s)) / s
    q_n = poch(n + t, s) / poch(n + t + s, s)
    q_0 = poch(t, s) / poch(t + s, s)
    C = (q_n - q_0) / s**2
    return A, B, C


def large_urn_moments(model):
    """(E[W], E[W^2]) for the limit (U_n - n v1)/n^s -> W v2."""
    _require_large(model)
    t, s = _t(model), _s(model)
    D = float(_drift(model))
    b, c = model.b, model.c
    ew = D / lam(model)
    bracket = b * c / (2 * s - 1) * t + (b - c) * D / s + D * D / (s * s)
    ew2 = s * s / poch(t, 2 * s) * bracket
    return ew, ew2


def limit_martingale_second_moment(model):
    """E[M^2] where sigma_n (U_n - E[U_n]) -> M v2."""
    _, ew2 = large_urn_moments(model)
    D = float(_drift(model))
    return lam(model) ** 2 * ew2 - D * D


def w_sample_moments_exact(model, n):
    """Exact (E[W_n], E[W_n^2]) of the finite-n estimate
    W_n = (X_n - n v1_x) (b+c) / (S n^s)."""
    ex, var = composition_moments(model, n)
    scale = (model.b + model.c) / (model.S * n ** _s(model))
    dev = ex - n * float(model.v1[0])
    return dev * scale, (var + dev * dev) * scale * scale


# -- report ---------------------------------------------------------------------


@dataclass
class MomentReport:
    model: dict
    horizon: int
    regime: str
    sigma: str
    sigma_n: float
    w_n: float
    mean_Un: tuple
    lambda_: float
    gamma_cov: list | None
    EW: float | None
    EW2: float | None
    regime_asymptote: float | None

    def to_dict(self):
        d = dict(self.__dict__)
        d["lambda"] = d.pop("lambda_")
        d["mean_Un"] = list(self.mean_Un)
        return d


def moment_report(model, n):
    reg = model.regime
    gamma_cov = ew = ew2 = asym = None
    if reg in (Regime.SMALL, Regime.CRITICAL) and model.b * model.c:
        gamma_cov = clt_covariance(model).tolist()
    if reg is Regime.LARGE:
        ew, ew2 = large_urn_moments(model)
    if reg is not Regime.TRADITIONAL:
        asym = w_asymptote(model)
    return MomentReport(
        model=model.as_dict(),
        horizon=n,
        regime=str(reg),
        sigma=str(model.sigma),
        sigma_n=sigma_n(model, n),
        w_n=w_n(model, n),
        mean_Un=mean_Un(model, n),
        lambda_=lam(model),
        gamma_cov=gamma_cov,
        EW=ew,
        EW2=ew2,
        regime_asymptote=asym,
    )
