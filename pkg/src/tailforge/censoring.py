"""Kaplan-Meier survival estimation and censoring-adapted tail estimators."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .empirics import CensoredSample, TailPath, hill, moment_estimator
from .errors import DataError

__all__ = [
    "SurvivalCurve",
    "MeanExcessCurve",
    "kaplan_meier",
    "censored_hill",
    "worms_xi",
    "censored_moment",
    "censored_quantile",
    "censored_pareto_qq",
    "mean_excess_km",
    "censored_path",
]


@dataclass(frozen=True)
class SurvivalCurve:
    """Right-continuous step survival function over distinct support points."""

    support: np.ndarray
    survival: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.support, dtype=float)
        v = np.asarray(self.survival, dtype=float)
        if s.ndim != 1 or s.shape != v.shape or s.size == 0:
            raise DataError("support and survival must be matching nonempty 1-d arrays")
        if np.any(np.diff(s) <= 0):
            raise DataError("support must be strictly increasing")
        if np.any(v < 0.0) or np.any(v > 1.0) or np.any(np.diff(v) > 0.0):
            raise DataError("survival values must be nonincreasing within [0, 1]")
        object.__setattr__(self, "support", s)
        object.__setattr__(self, "survival", v)
        s.setflags(write=False)
        v.setflags(write=False)

    def at(self, x):
        """Survival at x (right-continuous); 1 before the first support point."""
        idx = np.searchsorted(self.support, x, side="right") - 1
        out = np.where(idx >= 0, self.survival[np.maximum(idx, 0)], 1.0)
        return float(out) if np.isscalar(x) else out

    def left_at(self, x):
        """Left limit of the survival at x; 1 at or below the first support point."""
        idx = np.searchsorted(self.support, x, side="left") - 1
        out = np.where(idx >= 0, self.survival[np.maximum(idx, 0)], 1.0)
        return float(out) if np.isscalar(x) else out

    @property
    def defective(self) -> bool:
        """True when mass remains beyond the largest observation."""
        return bool(self.survival[-1] > 0.0)


@dataclass(frozen=True)
class MeanExcessCurve:
    """Mean excess estimates at uncensored support points.

    ``defective`` marks a Kaplan-Meier curve whose largest observation is
    censored: the integral is then truncated at that observation, treating
    the remaining mass as located there.
    """

    x: np.ndarray
    estimate: np.ndarray
    defective: bool


def kaplan_meier(sample: CensoredSample) -> SurvivalCurve:
    """Kaplan-Meier product-limit estimate of the survival function.

    With no censoring the returned curve is the empirical survival function,
    computed through the exact algebraic reduction so the identity holds
    bitwise.
    """
    v, cens = sample.values, sample.censored
    n = v.size
    support, first, counts = np.unique(v, return_index=True, return_counts=True)
    if not cens.any():
        surv = (n - np.cumsum(counts)) / n
        return SurvivalCurve(support=support, survival=surv)
    events = np.add.reduceat((~cens).astype(np.int64), first)
    at_risk = n - np.concatenate(([0], np.cumsum(counts)[:-1]))
    factors = (at_risk - events) / at_risk
    return SurvivalCurve(support=support, survival=np.cumprod(factors))


def _uncensored_proportion(sample: CensoredSample, k: int) -> float:
    n = sample.n
    if not 1 <= k <= n - 1:
        raise DataError(f"k={k} outside 1..{n - 1}")
    return float(np.mean(sample.uncensored[n - k:]))


def censored_hill(sample: CensoredSample, k: int) -> float:
    """Hill estimator divided by the proportion of uncensored top-k points."""
    p = _uncensored_proportion(sample, k)
    if p == 0.0:
        raise DataError("all top-k observations are censored")
    return hill(sample, k) / p


def censored_moment(sample: CensoredSample, k: int) -> float:
    """Moment estimator divided by the proportion of uncensored top-k points."""
    p = _uncensored_proportion(sample, k)
    if p == 0.0:
        raise DataError("all top-k observations are censored")
    return moment_estimator(sample, k) / p


def _worms_from_curve(curve: SurvivalCurve, values: np.ndarray, k: int) -> float:
    """Worms-type integral of a survival curve over the top-k log-spacings.

    The weight for the spacing up to Z_(n-j+1) is the curve's left limit
    there (the step value on the interval), so the sum is exactly the
    step-function integral of S(u)/S(threshold) d(log u) above the threshold.
    """
    n = values.size
    tops = values[n - k - 1:]
    s_thr = float(curve.at(tops[0]))
    if s_thr <= 0.0:
        raise DataError("survival vanishes at the threshold")
    spacings = np.log(tops[1:] / tops[:-1])
    weights = curve.left_at(tops[1:])
    return float(np.sum(weights * spacings) / s_thr)


def worms_xi(sample: CensoredSample, k: int) -> float:
    """Worms-Worms estimator: Kaplan-Meier weighted sum of top log-spacings."""
    n = sample.n
    if not 1 <= k <= n - 1:
        raise DataError(f"k={k} outside 1..{n - 1}")
    return _worms_from_curve(kaplan_meier(sample), sample.values, k)


def censored_quantile(sample: CensoredSample, k: int, xi: float, p: float) -> float:
    """Weissman-type extreme quantile with the Kaplan-Meier exceedance level."""
    n = sample.n
    if not 1 <= k <= n - 1:
        raise DataError(f"k={k} outside 1..{n - 1}")
    threshold = sample.values[n - k - 1]
    s_thr = kaplan_meier(sample).at(threshold)
    if not 0.0 < p < s_thr:
        raise DataError(
            f"p={p} outside (0, {s_thr}) , the Kaplan-Meier survival at the threshold"
        )
    return float(threshold * (s_thr / p) ** xi)


def censored_pareto_qq(sample: CensoredSample) -> tuple[np.ndarray, np.ndarray]:
    """Pareto QQ plot with Kaplan-Meier exceedance coordinates.

    The x-coordinate uses the left limit of the survival curve at each
    observation so the largest uncensored point stays finite.
    """
    if sample.n < 2:
        raise DataError("need at least two observations")
    curve = kaplan_meier(sample)
    desc = sample.values[::-1]
    return -np.log(curve.left_at(desc)), np.log(desc)


def mean_excess_km(sample: CensoredSample) -> MeanExcessCurve:
    """Mean excess function with the Kaplan-Meier survival plugged in.

    Evaluated at each distinct uncensored observation with positive
    survival; the step-function integral is exact.
    """
    curve = kaplan_meier(sample)
    s, v = curve.support, curve.survival
    seg = v[:-1] * np.diff(s)
    tail_integral = np.concatenate((np.cumsum(seg[::-1])[::-1], [0.0]))
    points = np.unique(sample.values[sample.uncensored])
    idx = np.searchsorted(s, points)
    keep = v[idx] > 0.0
    estimates = tail_integral[idx[keep]] / v[idx[keep]]
    return MeanExcessCurve(x=points[keep], estimate=estimates, defective=curve.defective)


def censored_path(sample: CensoredSample) -> TailPath:
    """Censored Hill / Worms / censored moment traces over k = 2..n-1."""
    n = sample.n
    if n < 3:
        raise DataError("need at least three observations for estimator paths")
    curve = kaplan_meier(sample)
    ks = np.arange(2, n)
    hill_c = np.full(ks.size, np.nan)
    worms = np.full(ks.size, np.nan)
    moment_c = np.full(ks.size, np.nan)
    for i, k in enumerate(ks):
        p = float(np.mean(sample.uncensored[n - k:]))
        if p > 0.0:
            hill_c[i] = hill(sample, int(k)) / p
            try:
                moment_c[i] = moment_estimator(sample, int(k)) / p
            except DataError:
                pass
        try:
            worms[i] = _worms_from_curve(curve, sample.values, int(k))
        except DataError:
            pass
    return TailPath(k=ks, estimate=hill_c, aux={"worms": worms, "moment": moment_c})
