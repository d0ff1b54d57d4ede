"""Empirical autocovariance and log-log decay-rate regression."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

__all__ = ["DecayFit", "autocov", "autocov_upto", "lag_cutoff", "logreg_decay"]


def autocov(series, tau):
    """Non-mean-subtracting autocovariance (1/(T-tau)) sum_t x_t x_{t+tau}.

    The series is expected to be centered already (analytic means).
    """
    x = np.asarray(series, dtype=float)
    T = x.size
    if not 1 <= tau <= T - 1:
        raise ValueError(f"lag tau must lie in 1..{T - 1}, got {tau}")
    return float(x[:-tau] @ x[tau:]) / (T - tau)


def autocov_upto(series, max_lag):
    """Autocovariances at lags 1..max_lag as an array."""
    return np.array([autocov(series, tau) for tau in range(1, max_lag + 1)])


def lag_cutoff(T, rule="paper"):
    """Number of lags entering the decay regression.

    ``paper``: min(floor(log10 T), T-1), clamped to at least one lag.
    ``power:x``: floor(T^x) with the same clamps (exploratory override).
    """
    if T < 2:
        raise ValueError("need T >= 2")
    if rule == "paper":
        q = math.floor(math.log10(T))
    elif isinstance(rule, str) and rule.startswith("power:"):
        q = math.floor(T ** float(rule.split(":", 1)[1]))
    elif isinstance(rule, (int, float)) and not isinstance(rule, bool):
        q = math.floor(T ** float(rule))
    else:
        raise ValueError(f"unknown lag rule: {rule!r}")
    return min(max(q, 1), T - 1)


@dataclass
class DecayFit:
    """OLS fit of log|rho(tau)| on log tau."""

    intercept: float
    slope: float
    q_T: int
    lags_excluded: int = 0


def logreg_decay(rho_values, q_T=None):
    """Least-squares decay-rate fit over lags 1..q_T.

    ``rho_values[i]`` is the autocovariance at lag i+1. Exact zeros are
    excluded (and counted); at least two usable lags are required.
    """
    rho = np.asarray(rho_values, dtype=float)
    if q_T is None:
        q_T = rho.size
    rho = rho[:q_T]
    lags = np.arange(1, rho.size + 1)
    usable = rho != 0.0
    excluded = int((~usable).sum())
    if excluded:
        warnings.warn(f"excluding {excluded} exactly-zero autocovariance value(s)",
                      stacklevel=2)
    if usable.sum() < 2:
        raise ValueError("need at least 2 nonzero autocovariances for the decay fit")
    x = np.log(lags[usable])
    y = np.log(np.abs(rho[usable]))
    design = np.column_stack([np.ones_like(x), x])
    (intercept, slope), *_ = np.linalg.lstsq(design, y, rcond=None)
    return DecayFit(intercept=float(intercept), slope=float(slope),
                    q_T=int(q_T), lags_excluded=excluded)
