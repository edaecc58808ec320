"""Inference for upper-truncated Pareto-type tails.

Tail index and truncation-odds estimation, extreme quantiles, endpoint
estimation, a test for truncation, and the truncation-adjusted QQ plot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import ndtr

from .empirics import CensoredSample, RelativeExcesses, TailPath, relative_excesses
from .errors import ConvergenceError, DataError

__all__ = [
    "TruncatedFit",
    "truncated_xi",
    "truncated_odds",
    "truncated_quantile",
    "truncated_endpoint",
    "truncation_test",
    "truncated_pareto_qq",
    "fit_truncated",
    "truncated_path",
]

_XI_LO = 1e-8
_XI_HI_CAP = 1e10


@dataclass(frozen=True)
class TruncatedFit:
    """Fitted truncated-tail parameters at one order-statistic threshold."""

    k: int
    xi: float
    odds: float
    odds_raw: float
    threshold: float
    endpoint: float
    test_pvalue: float


def _defining_curve(xi: float, log_r1: float) -> float:
    """Right side of the tail-index defining equation, increasing in xi.

    Stable form: with s = log_r1/xi, the correction term is
    log_r1 / (exp(s) - 1), so the curve runs from 0 up to log_r1/2.
    """
    s = log_r1 / xi
    if s > 700.0:
        return xi
    return xi - log_r1 * math.exp(-s) / -math.expm1(-s)


def truncated_xi(excesses: RelativeExcesses) -> float:
    """Tail index solving the truncated pseudo-likelihood score equation.

    Bracketed root find (Brent: bisection refined by secant/inverse
    quadratic) on [1e-8, 20], expanding the upper bracket geometrically.
    """
    r1 = float(excesses.r[0])
    if r1 <= 1.0:
        raise DataError("all top values tied with the threshold (R_1 = 1)")
    hill_stat = float(np.mean(np.log(excesses.r)))
    log_r1 = math.log(r1)
    if hill_stat <= _XI_LO:
        raise DataError("Hill statistic of the excesses is zero: degenerate sample")
    if hill_stat >= 0.5 * log_r1:
        raise ConvergenceError(
            "no root: the Hill statistic is at least half the largest log excess "
            f"({hill_stat:.6g} >= {0.5 * log_r1:.6g}), so the defining equation "
            "has no solution (increase k)"
        )
    lo, hi = _XI_LO, 20.0
    while _defining_curve(hi, log_r1) <= hill_stat:
        hi *= 2.0
        if hi > _XI_HI_CAP:
            raise ConvergenceError("bracket expansion failed in truncated_xi")
    xi = brentq(lambda z: _defining_curve(z, log_r1) - hill_stat, lo, hi,
                xtol=1e-14, rtol=8.9e-16, maxiter=200)
    residual = abs(_defining_curve(xi, log_r1) - hill_stat)
    if residual > 1e-10 * max(1.0, hill_stat):
        raise ConvergenceError(f"root residual {residual:.3g} above tolerance", best=xi)
    return float(xi)


def truncated_odds(excesses: RelativeExcesses, n: int, xi: float) -> tuple[float, float]:
    """Estimated odds of the truncated tail mass: raw value and max(raw, 0)."""
    if xi <= 0.0:
        raise DataError("xi must be positive")
    r1 = float(excesses.r[0])
    if r1 <= 1.0:
        raise DataError("all top values tied with the threshold (R_1 = 1)")
    k = excesses.k
    u = r1 ** (-1.0 / xi)
    raw = (k / n) * (u - 1.0 / k) / (1.0 - u)
    return float(raw), float(max(raw, 0.0))


def truncated_quantile(fit: TruncatedFit, n: int, p: float) -> float:
    """Extreme quantile under truncation; Weissman's estimator when odds = 0."""
    q_k = (fit.k + 1) / (n + 1)
    if not 0.0 < p < q_k:
        raise DataError(f"p={p} outside (0, (k+1)/(n+1)={q_k})")
    ratio = (fit.odds + q_k) / (fit.odds + p)
    return float(fit.threshold * ratio ** fit.xi)


def _endpoint(xi: float, odds: float, threshold: float, k: int, n: int,
              sample_max: float) -> float:
    if odds <= 0.0:
        return math.inf
    cand = threshold * (1.0 + (k + 1) / ((n + 1) * odds)) ** xi
    return float(max(cand, sample_max))


def truncated_endpoint(fit: TruncatedFit, n: int, sample_max: float) -> float:
    """Estimated truncation point; +inf when the admissible odds are zero."""
    return _endpoint(fit.xi, fit.odds, fit.threshold, fit.k, n, sample_max)


def truncation_test(excesses: RelativeExcesses) -> float:
    """P-value of the test of an unbounded Pareto tail against truncation.

    Small values indicate truncation.
    """
    k = excesses.k
    if k < 2:
        raise DataError("truncation test needs k >= 2")
    logs = np.log(excesses.r)
    hill_stat = float(np.mean(logs))
    if hill_stat <= 0.0:
        raise DataError("Hill statistic of the excesses is zero: degenerate sample")
    rbar = float(np.mean(np.exp(-logs / hill_stat)))
    if rbar >= 1.0:
        raise DataError("degenerate excesses: transformed mean reached 1")
    stat = math.sqrt(12.0 * k) * (rbar - 0.5) / (1.0 - rbar)
    return float(ndtr(stat))


def truncated_pareto_qq(sample: CensoredSample, odds: float) -> tuple[np.ndarray, np.ndarray]:
    """QQ plot with odds-shifted exceedance coordinates.

    Linear at the top under a truncated Pareto-type tail; reduces to the
    standard Pareto QQ plot when odds = 0.
    """
    if odds < 0.0:
        raise DataError("odds must be nonnegative")
    n = sample.n
    j = np.arange(1, n + 1, dtype=float)
    x = -np.log(odds + j / (n + 1.0))
    y = np.log(sample.values[::-1])
    return x, y


def fit_truncated(sample: CensoredSample, k: int) -> TruncatedFit:
    """Full truncated-tail fit at one threshold: xi, odds, endpoint, test."""
    exc = relative_excesses(sample, k)
    xi = truncated_xi(exc)
    raw, adm = truncated_odds(exc, sample.n, xi)
    pval = truncation_test(exc)
    endpoint = _endpoint(xi, adm, exc.threshold, k, sample.n, float(sample.values[-1]))
    return TruncatedFit(k=k, xi=xi, odds=adm, odds_raw=raw, threshold=exc.threshold,
                        endpoint=endpoint, test_pvalue=pval)


def truncated_path(sample: CensoredSample, k_min: int = 5, k_max: int | None = None) -> TailPath:
    """Sweep of the truncated fit over k; entries where the solver fails are NaN."""
    n = sample.n
    k_max = n - 1 if k_max is None else min(k_max, n - 1)
    if k_min < 2 or k_min > k_max:
        raise DataError("invalid k range")
    ks = np.arange(k_min, k_max + 1)
    cols = {name: np.full(ks.size, np.nan)
            for name in ("odds_raw", "odds", "endpoint", "pvalue")}
    xi = np.full(ks.size, np.nan)
    for i, k in enumerate(ks):
        try:
            fit = fit_truncated(sample, int(k))
        except (DataError, ConvergenceError):
            continue
        xi[i] = fit.xi
        cols["odds_raw"][i] = fit.odds_raw
        cols["odds"][i] = fit.odds
        cols["endpoint"][i] = fit.endpoint
        cols["pvalue"][i] = fit.test_pvalue
    return TailPath(k=ks, estimate=xi, aux=cols)
