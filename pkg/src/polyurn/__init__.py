"""Balanced two-colour Pólya urns: simulation, closed forms and limit-theorem checks."""

from . import engine, formulas, martingale, verify
from ._backend import kernels
from .engine import Functional, MomentAccumulator, SimConfig, run, w_estimate
from .errors import (BalanceViolation, DegenerateProxy, DegenerateUrn, EmptyUrn, GammaPole,
                     OverflowHorizon, RegimeMismatch, TooLarge, UrnError, ZeroGrowth)
from .formulas import (clt_covariance, lam, large_urn_moments, mean_Un, mean_Un_exact,
                       moment_report, sigma_n, w_asymptote, w_n)
from .martingale import generalized_mart, martingale, traditional_mart
from .model import Regime, Trajectory, UrnModel, UrnState, build_model, simulate
from .rng import RandomStream
from .verify import VerifyReport, oracle_enumerate

BACKEND = kernels.NAME

__all__ = [
    "BACKEND", "BalanceViolation", "DegenerateProxy", "DegenerateUrn", "EmptyUrn", "Functional",
    "GammaPole", "MomentAccumulator", "OverflowHorizon", "RandomStream", "Regime",
    "RegimeMismatch", "SimConfig", "TooLarge", "Trajectory", "UrnError", "UrnModel", "UrnState",
    "VerifyReport", "ZeroGrowth", "build_model", "clt_covariance", "engine", "formulas",
    "generalized_mart", "lam", "large_urn_moments", "martingale", "mean_Un", "mean_Un_exact",
    "moment_report", "oracle_enumerate", "run", "sigma_n", "simulate", "traditional_mart",
    "verify", "w_asymptote", "w_estimate", "w_n",
]
