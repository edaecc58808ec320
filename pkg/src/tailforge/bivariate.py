"""Censored bivariate tail dependence and reinsurer pure premiums.

The dependence between paired losses and expenses is summarized by the
Pickands function of their upper-tail copula, estimated from censored
exponential-scale margin transforms; the reinsurer premium for the shared
payment structure is a plug-in expectation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .censoring import kaplan_meier
from .empirics import CensoredSample
from .errors import DataError
from .premiums import LayerSpec

__all__ = [
    "BivariateSample",
    "PickandsCurve",
    "margin_transform",
    "pickands_estimate",
    "pickands_curve",
    "reinsurer_payment",
    "bivariate_pure_premium",
]


@dataclass(frozen=True)
class BivariateSample:
    """Paired positive observations (loss, expense) with per-margin censoring."""

    x1: np.ndarray
    x2: np.ndarray
    censored1: np.ndarray | None = None
    censored2: np.ndarray | None = None

    def __post_init__(self):
        x1 = np.asarray(self.x1, dtype=float)
        x2 = np.asarray(self.x2, dtype=float)
        if x1.ndim != 1 or x1.size == 0 or x1.shape != x2.shape:
            raise DataError("x1 and x2 must be matching nonempty 1-d arrays")
        for arr in (x1, x2):
            if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
                raise DataError("values must be strictly positive and finite")
        flags = []
        for c in (self.censored1, self.censored2):
            c = np.zeros(x1.size, dtype=bool) if c is None else np.asarray(c, dtype=bool)
            if c.shape != x1.shape:
                raise DataError("censoring flags must match the values in length")
            flags.append(c)
        object.__setattr__(self, "x1", x1)
        object.__setattr__(self, "x2", x2)
        object.__setattr__(self, "censored1", flags[0])
        object.__setattr__(self, "censored2", flags[1])
        for arr in (x1, x2, flags[0], flags[1]):
            arr.setflags(write=False)

    @property
    def n(self) -> int:
        return self.x1.size

    @property
    def pair_uncensored(self) -> np.ndarray:
        """A pair counts as uncensored iff neither margin is censored."""
        return ~(self.censored1 | self.censored2)


@dataclass(frozen=True)
class PickandsCurve:
    """Pickands dependence estimates over an interior grid.

    ``projected`` marks grid points where clamping into the valid band
    [max(t, 1-t), 1] was applied.
    """

    grid: np.ndarray
    a_hat: np.ndarray
    projected: np.ndarray


def _margin_exponential(values: np.ndarray, censored: np.ndarray) -> np.ndarray:
    """Transform one margin to exponential scale via the Kaplan-Meier survival.

    Uses -log of the survival left limit, which keeps the transform finite
    at an uncensored sample maximum and preserves right censoring under the
    same flags.
    """
    if np.all(censored):
        raise DataError("margin fully censored: Kaplan-Meier transform degenerate")
    curve = kaplan_meier(CensoredSample(values=values, censored=censored))
    return -np.log(curve.left_at(values))


def margin_transform(sample: BivariateSample) -> tuple[np.ndarray, np.ndarray]:
    """Per-margin exponential-scale transforms of both coordinates."""
    t1 = _margin_exponential(sample.x1, sample.censored1)
    t2 = _margin_exponential(sample.x2, sample.censored2)
    return t1, t2


def pickands_estimate(sample: BivariateSample, t: float,
                      transformed: tuple[np.ndarray, np.ndarray] | None = None) -> float:
    """Censored rate estimate of the Pickands dependence function at t.

    The scaled minimum of the margin transforms is exponential with rate
    A(t); under right censoring the rate estimate is the uncensored
    proportion over the mean.
    """
    if not 0.0 < t < 1.0:
        raise DataError("t must lie strictly inside (0, 1)")
    t1, t2 = margin_transform(sample) if transformed is None else transformed
    xt = np.minimum(t1 / (1.0 - t), t2 / t)
    mean = float(np.mean(xt))
    if mean <= 0.0:
        raise DataError("degenerate transformed sample: zero mean minimum")
    return float(np.mean(sample.pair_uncensored)) / mean


def pickands_curve(sample: BivariateSample, grid_size: int = 99,
                   project: bool = False) -> PickandsCurve:
    """Pickands estimates on a uniform interior grid, optionally projected."""
    if grid_size < 3:
        raise DataError("grid_size must be at least 3")
    transformed = margin_transform(sample)
    grid = np.linspace(0.0, 1.0, grid_size + 2)[1:-1]
    a_hat = np.array([pickands_estimate(sample, float(t), transformed) for t in grid])
    projected = np.zeros(grid.size, dtype=bool)
    if project:
        lo = np.maximum(grid, 1.0 - grid)
        clamped = np.clip(a_hat, lo, 1.0)
        projected = clamped != a_hat
        a_hat = clamped
    return PickandsCurve(grid=grid, a_hat=a_hat, projected=projected)


def reinsurer_payment(x1, x2, layer: LayerSpec):
    """Reinsurer payment for a claim with loss x1 and proportional expense x2.

    Nothing below the retention; the excess plus a pro-rata expense share in
    the layer; the limit plus its expense share above the layer.
    """
    if math.isinf(layer.limit):
        raise DataError("payment structure requires a finite limit")
    m, lim = layer.retention, layer.limit
    x1a = np.asarray(x1, dtype=float)
    x2a = np.asarray(x2, dtype=float)
    scalar = x1a.ndim == 0 and x2a.ndim == 0
    x1a, x2a = np.atleast_1d(x1a), np.atleast_1d(x2a)
    with np.errstate(divide="ignore", invalid="ignore"):
        mid = (x1a - m) + (x1a - m) / x1a * x2a
    out = np.select(
        [x1a <= m, x1a >= m + lim],
        [np.zeros(x1a.shape), lim + lim / (lim + m) * x2a],
        default=mid,
    )
    return float(out[0]) if scalar else out


def _km_loss_weights(sample: BivariateSample) -> np.ndarray:
    """Per-pair Kaplan-Meier jump masses on the loss margin.

    With no loss censoring this reduces exactly to uniform weights.  Any
    defective mass (largest loss censored) is assigned to the largest
    observations so the weights sum to one.
    """
    n = sample.n
    if not sample.censored1.any():
        return np.full(n, 1.0 / n)
    curve = kaplan_meier(CensoredSample(values=sample.x1, censored=sample.censored1))
    drops = curve.left_at(sample.x1) - curve.at(sample.x1)
    weights = np.zeros(n)
    unc = ~sample.censored1
    for value in np.unique(sample.x1[unc]):
        mask = unc & (sample.x1 == value)
        weights[mask] = drops[mask][0] / np.count_nonzero(mask)
    defect = float(curve.survival[-1])
    if defect > 0.0:
        top = sample.x1 == np.max(sample.x1)
        weights[top] += defect / np.count_nonzero(top)
    return weights


def bivariate_pure_premium(sample: BivariateSample, layer: LayerSpec,
                           weighting: str = "empirical") -> float:
    """Plug-in expectation of the reinsurer payment over the sample."""
    g = reinsurer_payment(sample.x1, sample.x2, layer)
    if weighting == "empirical":
        weights = np.full(sample.n, 1.0 / sample.n)
    elif weighting == "km":
        weights = _km_loss_weights(sample)
    else:
        raise DataError(f"unknown weighting {weighting!r}")
    total = float(np.sum(weights))
    if total <= 0.0:
        raise DataError("degenerate weights")
    return float(np.sum(weights * g))
