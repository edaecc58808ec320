"""Seeded generators for the model families the estimators target.

All generators draw uniforms from a caller-supplied ``numpy`` Generator and
produce values by inverse transform through the corresponding quantile
functions (numeric inversion where no closed form exists), so a fixed seed
yields a reproducible sample.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq

from .empirics import CensoredSample
from .errors import DataError
from .splicing import CompositeModel, MixedErlang, composite_quantile, me_cdf, me_mean

__all__ = [
    "strict_pareto",
    "truncated_pareto",
    "tempered_pareto",
    "gp_sample",
    "mixed_erlang_sample",
    "composite_sample",
    "pareto_censored",
    "simulate_model",
]


def _uniforms(rng: np.random.Generator, n: int) -> np.ndarray:
    """Uniforms on (0, 1], safe to use as survival levels."""
    return 1.0 - rng.random(n)


def strict_pareto(rng: np.random.Generator, n: int, xi: float) -> np.ndarray:
    """Strict Pareto on [1, inf) with survival x^(-1/xi)."""
    if xi <= 0.0:
        raise DataError("xi must be positive")
    return _uniforms(rng, n) ** -xi


def truncated_pareto(rng: np.random.Generator, n: int, xi: float,
                     truncation: float) -> np.ndarray:
    """Strict Pareto upper-truncated at ``truncation`` > 1."""
    if xi <= 0.0 or truncation <= 1.0:
        raise DataError("require xi > 0 and truncation > 1")
    u = rng.random(n)
    mass = 1.0 - truncation ** (-1.0 / xi)
    return (1.0 - u * mass) ** -xi


def tempered_pareto(rng: np.random.Generator, n: int, alpha: float, beta: float,
                    tau: float) -> np.ndarray:
    """Weibull-tempered Pareto: the minimum of a strict Pareto and a Weibull.

    The resulting survival is x^(-alpha) exp(-(beta x)^tau) for x >= 1, the
    tempered power law the exceedance model approximates.
    """
    if min(alpha, beta, tau) <= 0.0:
        raise DataError("alpha, beta, tau must be positive")
    w = _uniforms(rng, n) ** (-1.0 / alpha)
    y = (-np.log(_uniforms(rng, n))) ** (1.0 / tau) / beta
    return np.minimum(w, y)


def gp_sample(rng: np.random.Generator, n: int, sigma: float, xi: float,
              loc: float = 0.0) -> np.ndarray:
    """Generalized Pareto exceedances above ``loc``."""
    if sigma <= 0.0:
        raise DataError("sigma must be positive")
    u = _uniforms(rng, n)
    if abs(xi) < 1e-12:
        return loc - sigma * np.log(u)
    return loc + sigma / xi * (u ** -xi - 1.0)


def _me_quantile(me: MixedErlang, level: float) -> float:
    hi = me_mean(me)
    while me_cdf(me, hi) < level:
        hi *= 2.0
        if hi > 1e300:
            raise DataError("mixed Erlang quantile bracket failed")
    return brentq(lambda z: me_cdf(me, z) - level, 0.0, hi, xtol=1e-12 * max(hi, 1.0),
                  rtol=8.9e-16, maxiter=300)


def mixed_erlang_sample(rng: np.random.Generator, n: int, me: MixedErlang) -> np.ndarray:
    """Mixed Erlang draws by numeric inverse transform of the mixture CDF."""
    u = rng.random(n)
    return np.array([_me_quantile(me, float(v)) for v in u])


def composite_sample(rng: np.random.Generator, n: int, model: CompositeModel) -> np.ndarray:
    """Composite model draws through the splice quantile function."""
    u = rng.random(n)
    u = np.clip(u, 1e-15, 1.0 - 1e-15)
    return np.array([composite_quantile(model, float(v)) for v in u])


def pareto_censored(rng: np.random.Generator, n: int, xi: float,
                    xi_censor: float) -> CensoredSample:
    """Strict Pareto claims right-censored by an independent strict Pareto."""
    x = strict_pareto(rng, n, xi)
    c = strict_pareto(rng, n, xi_censor)
    return CensoredSample(values=np.minimum(x, c), censored=c < x)


def simulate_model(name: str, params: dict, n: int,
                   rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray | None]:
    """Dispatch a named generator; returns (values, censoring flags or None)."""
    if n < 1:
        raise DataError("n must be positive")
    try:
        if name == "pareto":
            return strict_pareto(rng, n, float(params["xi"])), None
        if name == "truncated_pareto":
            return truncated_pareto(rng, n, float(params["xi"]),
                                    float(params["truncation"])), None
        if name == "tempered_pareto":
            return tempered_pareto(rng, n, float(params["alpha"]),
                                   float(params["beta"]), float(params["tau"])), None
        if name == "gp":
            return gp_sample(rng, n, float(params["sigma"]), float(params["xi"]),
                             float(params.get("loc", 0.0))), None
        if name == "mixed_erlang":
            me = MixedErlang(shapes=np.asarray(params["shapes"], dtype=int),
                             weights=np.asarray(params["weights"], dtype=float),
                             rate=float(params["rate"]))
            return mixed_erlang_sample(rng, n, me), None
        if name == "composite":
            from .splicing import composite_from_dict
            model = composite_from_dict(dict(params["model"]))
            return composite_sample(rng, n, model), None
        if name == "pareto_censored":
            sample = pareto_censored(rng, n, float(params["xi"]),
                                     float(params["xi_censor"]))
            return sample.values, sample.censored
    except KeyError as err:
        raise DataError(f"model {name!r} missing parameter {err.args[0]!r}") from err
    raise DataError(f"unknown model {name!r}")
