"""Order statistics, empirical tail machinery and the classical uncensored estimators.

Everything downstream (truncation, tempering, censoring, splicing) is built on
the types and estimators defined here.  All operations are pure functions of
immutable inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError

__all__ = [
    "CensoredSample",
    "RelativeExcesses",
    "TailPath",
    "relative_excesses",
    "hill",
    "hill_path",
    "moment_estimator",
    "mean_excess_empirical",
    "pareto_qq",
]


@dataclass(frozen=True)
class CensoredSample:
    """Positive claim amounts sorted ascending, with right-censoring flags.

    ``censored[i]`` is True when observation i is right-censored, i.e. the
    true claim exceeds the recorded value.  Ties are ordered uncensored
    before censored, the usual survival-analysis convention.  An
    all-uncensored sample doubles as a plain ordered sample.
    """

    values: np.ndarray
    censored: np.ndarray | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size == 0:
            raise DataError("sample must be a nonempty 1-d array of claim values")
        if not np.all(np.isfinite(values)) or np.any(values <= 0.0):
            raise DataError("claim values must be strictly positive and finite")
        if self.censored is None:
            censored = np.zeros(values.size, dtype=bool)
        else:
            censored = np.asarray(self.censored, dtype=bool)
            if censored.shape != values.shape:
                raise DataError("censoring flags must match the values in length")
        order = np.lexsort((censored, values))
        object.__setattr__(self, "values", values[order])
        object.__setattr__(self, "censored", censored[order])
        self.values.setflags(write=False)
        self.censored.setflags(write=False)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def uncensored(self) -> np.ndarray:
        """Event indicators (1 - censoring flag)."""
        return ~self.censored

    @property
    def n_censored(self) -> int:
        return int(np.count_nonzero(self.censored))


@dataclass(frozen=True)
class RelativeExcesses:
    """Ratios of the top ``k`` order statistics to the order-statistic threshold.

    ``r[0]`` is the largest ratio (sample maximum over threshold) and the
    entries decrease from there; all entries are >= 1, with exact ones for
    values tied with the threshold.
    """

    r: np.ndarray
    k: int
    threshold: float

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        object.__setattr__(self, "r", r)
        r.setflags(write=False)


@dataclass(frozen=True)
class TailPath:
    """Per-threshold trace of an estimator: one value for each k.

    ``aux`` holds optional named companion columns (p-values, scores, ...)
    of the same length.
    """

    k: np.ndarray
    estimate: np.ndarray
    aux: dict = field(default_factory=dict)

    def __post_init__(self):
        k = np.asarray(self.k, dtype=int)
        est = np.asarray(self.estimate, dtype=float)
        if k.ndim != 1 or np.any(np.diff(k) <= 0):
            raise DataError("k must be strictly increasing")
        if est.shape != k.shape:
            raise DataError("estimate must match k in length")
        for name, col in self.aux.items():
            if np.asarray(col).shape != k.shape:
                raise DataError(f"aux column {name!r} must match k in length")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "estimate", est)


def relative_excesses(sample: CensoredSample, k: int) -> RelativeExcesses:
    """Ratios of the top k values to the (k+1)-th largest value."""
    n = sample.n
    if not 1 <= k <= n - 1:
        raise DataError(f"k={k} outside 1..{n - 1}")
    threshold = sample.values[n - k - 1]
    if threshold <= 0.0:
        raise DataError("threshold order statistic must be positive")
    r = sample.values[n - k:][::-1] / threshold
    return RelativeExcesses(r=r, k=k, threshold=float(threshold))


def _top_log_spacings(values: np.ndarray, k: int) -> np.ndarray:
    """Log-spacings of the top k+1 order statistics, largest pair first.

    Built from ratios of adjacent order statistics so tied values give an
    exact zero.
    """
    top = values[-(k + 1):]
    return np.log(top[1:] / top[:-1])[::-1]


def hill(sample: CensoredSample, k: int) -> float:
    """Hill estimator: mean log relative excess over the top k observations.

    Computed through the weighted log-spacing identity
    ``sum_j log R_jk = sum_m m * log(X_(n-m+1)/X_(n-m))``, which is exact for
    ties and supports running-sum path updates.  Censoring flags are ignored.
    """
    n = sample.n
    if not 1 <= k <= n - 1:
        raise DataError(f"k={k} outside 1..{n - 1}")
    e = _top_log_spacings(sample.values, k)
    w = np.arange(1, k + 1, dtype=float)
    return float(np.cumsum(w * e)[-1] / k)


def hill_path(sample: CensoredSample) -> TailPath:
    """Hill estimates for every k = 1..n-1, by a single running-sum pass.

    Bit-identical to recomputing ``hill`` from scratch at each k.
    """
    n = sample.n
    if n < 2:
        raise DataError("need at least two observations for a Hill path")
    e = _top_log_spacings(sample.values, n - 1)
    w = np.arange(1, n, dtype=float)
    ks = np.arange(1, n)
    return TailPath(k=ks, estimate=np.cumsum(w * e) / ks)


def _top_log_excesses(values: np.ndarray, k: int) -> np.ndarray:
    """log R_{j,k} for j = 1..k as suffix sums of log-spacings (exact ties)."""
    e = _top_log_spacings(values, k)
    return np.cumsum(e[::-1])[::-1]


def moment_estimator(sample: CensoredSample, k: int) -> float:
    """Dekkers-Einmahl-de Haan moment estimator of the extreme value index.

    Valid in any max-domain of attraction; may be negative.
    """
    n = sample.n
    if not 2 <= k <= n - 1:
        raise DataError(f"k={k} outside 2..{n - 1}")
    e = _top_log_spacings(sample.values, k)
    if np.all(e[:-1] == 0.0):
        raise DataError("degenerate top k: all top-k values equal")
    logr = np.cumsum(e[::-1])[::-1]
    m1 = float(np.mean(logr))
    m2 = float(np.mean(logr * logr))
    return m1 + 1.0 - 0.5 / (1.0 - m1 * m1 / m2)


def mean_excess_empirical(sample: CensoredSample, x: float) -> float:
    """Average exceedance of the sample values above x."""
    v = sample.values
    if x >= v[-1]:
        raise DataError("x must lie strictly below the sample maximum")
    return float(np.mean(v[v > x] - x))


def pareto_qq(sample: CensoredSample) -> tuple[np.ndarray, np.ndarray]:
    """Pareto QQ plot points (-log(j/(n+1)), log X_(n-j+1)) for j = 1..n.

    Returned largest observation first, so the y-coordinates are
    nonincreasing.
    """
    n = sample.n
    j = np.arange(1, n + 1, dtype=float)
    x = -np.log(j / (n + 1.0))
    y = np.log(sample.values[::-1])
    return x, y
