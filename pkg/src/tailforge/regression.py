"""Covariate-local censored tail analysis with kernel smoothing.

Conditional survival curves via the kernel-weighted product limit, a local
Worms-type tail index, local censored QQ plots and local extreme quantiles.
Bandwidths are user-chosen; no automatic selection is attempted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .censoring import SurvivalCurve, _worms_from_curve
from .errors import DataError

__all__ = [
    "CovariateSample",
    "KernelSpec",
    "conditional_km",
    "local_worms_xi",
    "local_censored_qq",
    "local_quantile",
]

KERNELS = {
    "biquadratic": lambda u: 15.0 / 16.0 * (1.0 - u * u) ** 2,
    "epanechnikov": lambda u: 0.75 * (1.0 - u * u),
    "triangular": lambda u: 1.0 - np.abs(u),
    "uniform": lambda u: np.full_like(u, 0.5),
}


@dataclass(frozen=True)
class CovariateSample:
    """Censored responses with one scalar covariate per observation.

    Stored sorted by response (uncensored before censored at ties) with the
    covariate permuted alongside.
    """

    z: np.ndarray
    censored: np.ndarray
    x: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.z, dtype=float)
        censored = np.asarray(self.censored, dtype=bool)
        x = np.asarray(self.x, dtype=float)
        if z.ndim != 1 or z.size == 0:
            raise DataError("responses must form a nonempty 1-d array")
        if censored.shape != z.shape or x.shape != z.shape:
            raise DataError("flags and covariates must match the responses in length")
        if not np.all(np.isfinite(z)) or np.any(z <= 0.0):
            raise DataError("responses must be strictly positive and finite")
        if not np.all(np.isfinite(x)):
            raise DataError("covariates must be finite")
        order = np.lexsort((censored, z))
        object.__setattr__(self, "z", z[order])
        object.__setattr__(self, "censored", censored[order])
        object.__setattr__(self, "x", x[order])
        for arr in (self.z, self.censored, self.x):
            arr.setflags(write=False)

    @property
    def n(self) -> int:
        return self.z.size


@dataclass(frozen=True)
class KernelSpec:
    """Named symmetric kernel on [-1, 1] plus a bandwidth in covariate units."""

    bandwidth: float
    kernel: str = "biquadratic"

    def __post_init__(self):
        if not self.bandwidth > 0.0:
            raise DataError("bandwidth must be positive")
        if self.kernel not in KERNELS:
            raise DataError(f"unknown kernel {self.kernel!r}; choose from {sorted(KERNELS)}")

    def evaluate(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        inside = np.abs(u) <= 1.0
        out = np.zeros(u.shape)
        out[inside] = KERNELS[self.kernel](u[inside])
        return out


def _local_weights(sample: CovariateSample, x0: float, ks: KernelSpec) -> np.ndarray:
    kv = ks.evaluate((x0 - sample.x) / ks.bandwidth)
    total = float(kv.sum())
    if total <= 0.0 or not np.any(kv[~sample.censored] > 0.0):
        raise DataError(
            f"no uncensored observation within bandwidth {ks.bandwidth} of x0={x0}")
    return kv / total


def conditional_km(sample: CovariateSample, x0: float, ks: KernelSpec) -> SurvivalCurve:
    """Kernel-weighted product-limit estimate of the conditional survival.

    Every observation in the window carries kernel weight in the risk set;
    only uncensored observations produce downward steps.  An exhausted risk
    set pins the survival at zero from that point on.
    """
    w = _local_weights(sample, x0, ks)
    n = sample.n
    denom = 1.0 - np.concatenate(([0.0], np.cumsum(w)[:-1]))
    factors = np.ones(n)
    active = denom > 1e-13
    unc = ~sample.censored
    step = active & unc
    factors[step] = 1.0 - w[step] / denom[step]
    factors[~active] = 0.0
    np.clip(factors, 0.0, 1.0, out=factors)
    survival = np.cumprod(factors)
    support = np.unique(sample.z)
    # survival value at each distinct response = value after its last tied entry
    idx = np.searchsorted(sample.z, support, side="right") - 1
    return SurvivalCurve(support=support, survival=survival[idx])


def local_worms_xi(sample: CovariateSample, x0: float, ks: KernelSpec, k: int) -> float:
    """Worms-type tail index at covariate value x0 from the conditional curve."""
    n = sample.n
    if not 1 <= k <= n - 1:
        raise DataError(f"k={k} outside 1..{n - 1}")
    curve = conditional_km(sample, x0, ks)
    return _worms_from_curve(curve, sample.z, k)


def local_censored_qq(sample: CovariateSample, x0: float,
                      ks: KernelSpec) -> tuple[np.ndarray, np.ndarray]:
    """Censored Pareto QQ plot against the conditional survival at x0."""
    if sample.n < 2:
        raise DataError("need at least two observations")
    curve = conditional_km(sample, x0, ks)
    desc = sample.z[::-1]
    return -np.log(curve.left_at(desc)), np.log(desc)


def local_quantile(sample: CovariateSample, x0: float, ks: KernelSpec, k: int,
                   p: float) -> float:
    """Local Weissman quantile with the conditional exceedance level at x0."""
    n = sample.n
    if not 1 <= k <= n - 1:
        raise DataError(f"k={k} outside 1..{n - 1}")
    curve = conditional_km(sample, x0, ks)
    threshold = sample.z[n - k - 1]
    s_thr = float(curve.at(threshold))
    if not 0.0 < p < s_thr:
        raise DataError(
            f"p={p} outside (0, {s_thr}), the conditional survival at the threshold")
    xi = _worms_from_curve(curve, sample.z, k)
    return float(threshold * (s_thr / p) ** xi)
