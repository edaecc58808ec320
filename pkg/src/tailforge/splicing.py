"""Global loss models: mixed-Erlang body, generalized Pareto tail, splicing.

The body is fitted by an EM algorithm that handles right-censored
observations and a fixed truncation window through conditional-expectation
E-steps; the number of mixture components is chosen by a backward stepwise
search with per-size shape adjustment.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize, minimize_scalar
from scipy.special import gammainc, gammaincc, gammaln, logsumexp

from .censoring import censored_hill
from .empirics import CensoredSample
from .errors import ConvergenceError, DataError

__all__ = [
    "MixedErlang",
    "GeneralizedParetoTail",
    "CompositeModel",
    "me_density",
    "me_cdf",
    "me_mean",
    "me_em_fit",
    "composite_density",
    "composite_survival",
    "composite_quantile",
    "splice_fit",
    "composite_to_dict",
    "composite_from_dict",
    "composite_to_json",
    "composite_from_json",
    "gp_survival",
    "gp_density",
    "gp_quantile",
]

_XI_EXP_SWITCH = 1e-7
SCHEMA_VERSION = 1


@dataclass(frozen=True)
class MixedErlang:
    """Finite Erlang mixture with strictly increasing integer shapes and one rate."""

    shapes: np.ndarray
    weights: np.ndarray
    rate: float

    def __post_init__(self):
        shapes = np.asarray(self.shapes, dtype=int)
        weights = np.asarray(self.weights, dtype=float)
        if shapes.ndim != 1 or shapes.size == 0:
            raise DataError("need at least one mixture component")
        if np.any(shapes < 1) or np.any(np.diff(shapes) <= 0):
            raise DataError("shapes must be strictly increasing positive integers")
        if weights.shape != shapes.shape or np.any(weights <= 0.0):
            raise DataError("weights must be positive and match the shapes")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise DataError("weights must sum to 1 within 1e-12")
        if not self.rate > 0.0:
            raise DataError("rate must be positive")
        object.__setattr__(self, "shapes", shapes)
        object.__setattr__(self, "weights", weights)
        shapes.setflags(write=False)
        weights.setflags(write=False)

    @property
    def n_components(self) -> int:
        return self.shapes.size


@dataclass(frozen=True)
class GeneralizedParetoTail:
    """Generalized Pareto exceedance model above a splice threshold."""

    threshold: float
    sigma: float
    xi: float

    def __post_init__(self):
        if not self.threshold > 0.0:
            raise DataError("threshold must be positive")
        if not self.sigma > 0.0:
            raise DataError("sigma must be positive")

    @property
    def endpoint(self) -> float:
        """Upper support endpoint; +inf unless xi < 0."""
        if self.xi < 0.0:
            return self.threshold - self.sigma / self.xi
        return math.inf


@dataclass(frozen=True)
class CompositeModel:
    """Spliced body + tail model: mixed-Erlang below the threshold, GP above."""

    body: MixedErlang
    tail: GeneralizedParetoTail
    pi: float
    lower: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.pi < 1.0:
            raise DataError("body mass pi must lie strictly inside (0, 1)")
        if self.lower < 0.0 or self.lower >= self.tail.threshold:
            raise DataError("lower truncation must lie in [0, threshold)")
        if _me_window_mass(self.body, self.lower, self.tail.threshold) <= 0.0:
            raise DataError("body distribution has no mass between lower and threshold")


def me_density(me: MixedErlang, x) -> float | np.ndarray:
    """Mixed-Erlang density; zero for negative arguments."""
    xa = np.asarray(x, dtype=float)
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa)
    out = np.zeros(xa.shape)
    pos = xa > 0.0
    if np.any(pos):
        xv = xa[pos]
        r = me.shapes[:, None].astype(float)
        logpdf = (r * math.log(me.rate) + (r - 1.0) * np.log(xv)[None, :]
                  - me.rate * xv[None, :] - gammaln(r))
        out[pos] = np.sum(me.weights[:, None] * np.exp(logpdf), axis=0)
    at_zero = xa == 0.0
    if np.any(at_zero) and me.shapes[0] == 1:
        out[at_zero] = me.weights[0] * me.rate
    return float(out[0]) if scalar else out


def me_cdf(me: MixedErlang, x) -> float | np.ndarray:
    """Mixed-Erlang distribution function; zero for negative arguments."""
    xa = np.asarray(x, dtype=float)
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa)
    out = np.zeros(xa.shape)
    pos = xa > 0.0
    if np.any(pos):
        z = me.rate * xa[pos]
        comp = gammainc(me.shapes[:, None].astype(float), z[None, :])
        out[pos] = np.sum(me.weights[:, None] * comp, axis=0)
    return float(out[0]) if scalar else out


def me_mean(me: MixedErlang) -> float:
    return float(np.sum(me.weights * me.shapes) / me.rate)


def me_cdf_diff(me: MixedErlang, a: float, b: float) -> float:
    """Mass of the mixed Erlang on (a, b], by per-component CDF differences.

    Differencing within each component avoids the catastrophic cancellation
    of ``me_cdf(b) - me_cdf(a)`` when the window mass is far out in a
    component's tail.
    """
    r = me.shapes.astype(float)
    hi = gammainc(r, me.rate * b) if b < math.inf else np.ones(r.size)
    lo = gammainc(r, me.rate * a) if a > 0.0 else np.zeros(r.size)
    return float(np.sum(me.weights * (hi - lo)))


def _me_window_mass(me: MixedErlang, lower: float, upper: float) -> float:
    return me_cdf_diff(me, lower, upper)


# ---------------------------------------------------------------------------
# EM fitting of the mixed Erlang under right censoring and fixed truncation


def _erlang_cdf_grid(shapes: np.ndarray, lam: float, x: np.ndarray) -> np.ndarray:
    """Matrix P(Erlang(r_j, lam) <= x_i), shape (M, len(x))."""
    return gammainc(shapes[:, None].astype(float), lam * x[None, :])


def _window_mass(shapes: np.ndarray, lam: float, lower: float, upper: float) -> np.ndarray:
    r = shapes.astype(float)
    hi = np.ones(shapes.size) if not math.isfinite(upper) else gammainc(r, lam * upper)
    lo = np.zeros(shapes.size) if lower <= 0.0 else gammainc(r, lam * lower)
    return hi - lo


class _EMState:
    """One EM configuration: fixed shapes, free truncated weights and rate."""

    def __init__(self, x, cens, shapes, beta, lam, lower, upper):
        self.x = x
        self.cens = cens
        self.shapes = np.asarray(shapes, dtype=int)
        self.beta = np.asarray(beta, dtype=float)
        self.lam = float(lam)
        self.lower = lower
        self.upper = upper
        self.loglik = -math.inf
        self.trace: list[float] = []

    # -- log component likelihood pieces at the current rate --------------

    def _log_parts(self, lam):
        x, shapes = self.x, self.shapes
        r = shapes[:, None].astype(float)
        mass = _window_mass(shapes, lam, self.lower, self.upper)
        if np.any(mass <= 0.0):
            return None
        log_mass = np.log(mass)
        with np.errstate(divide="ignore"):
            unc = ~self.cens
            logf = np.full((shapes.size, x.size), -np.inf)
            if np.any(unc):
                xv = x[unc]
                logf[:, unc] = (r * math.log(lam) + (r - 1.0) * np.log(xv)[None, :]
                                - lam * xv[None, :] - gammaln(r))
            if np.any(self.cens):
                xc = x[self.cens]
                hi = (np.ones((shapes.size, xc.size))
                      if not math.isfinite(self.upper)
                      else gammainc(r, lam * self.upper))
                above = np.maximum(hi - gammainc(r, lam * xc[None, :]), 0.0)
                logf[:, self.cens] = np.log(above)
        return logf, log_mass

    def observed_loglik(self, beta=None, lam=None):
        beta = self.beta if beta is None else beta
        lam = self.lam if lam is None else lam
        parts = self._log_parts(lam)
        if parts is None:
            return -math.inf
        logf, log_mass = parts
        logw = np.log(beta)[:, None] + logf - log_mass[:, None]
        return float(np.sum(logsumexp(logw, axis=0)))

    def e_step(self):
        logf, log_mass = self._log_parts(self.lam)
        logw = np.log(self.beta)[:, None] + logf - log_mass[:, None]
        norm = logsumexp(logw, axis=0)
        z = np.exp(logw - norm[None, :])
        # expected claim size for censored points, per component
        xt = np.broadcast_to(self.x, (self.shapes.size, self.x.size)).copy()
        if np.any(self.cens):
            lam = self.lam
            r = self.shapes[:, None].astype(float)
            xc = self.x[self.cens]
            if math.isfinite(self.upper):
                hi_r = gammainc(r, lam * self.upper)
                hi_r1 = gammainc(r + 1.0, lam * self.upper)
            else:
                hi_r = np.ones((self.shapes.size, 1))
                hi_r1 = np.ones((self.shapes.size, 1))
            den = hi_r - gammainc(r, lam * xc[None, :])
            num = hi_r1 - gammainc(r + 1.0, lam * xc[None, :])
            with np.errstate(divide="ignore", invalid="ignore"):
                cond = (r / lam) * num / den
            bad = ~np.isfinite(cond) | (den <= 0.0)
            cond[bad] = np.broadcast_to(xc[None, :], cond.shape)[bad]
            xt[:, self.cens] = cond
        return z, xt

    def m_step(self, z, xt):
        n = self.x.size
        self.beta = np.maximum(z.sum(axis=1) / n, 1e-300)
        self.beta /= self.beta.sum()
        zr = float(np.sum(z.sum(axis=1) * self.shapes))
        zx = float(np.sum(z * xt))
        comp_tot = z.sum(axis=1)
        untruncated = self.lower <= 0.0 and not math.isfinite(self.upper)
        if untruncated:
            self.lam = zr / zx
            return
        # rate update solves a 1-d conditional maximization of the Q function
        def neg_q(loglam):
            lam = math.exp(loglam)
            mass = _window_mass(self.shapes, lam, self.lower, self.upper)
            if np.any(mass <= 0.0):
                return math.inf
            return -(zr * loglam - lam * zx - float(np.sum(comp_tot * np.log(mass))))

        cur = math.log(self.lam)
        res = minimize_scalar(neg_q, bounds=(cur - 3.0, cur + 3.0), method="bounded",
                              options={"xatol": 1e-13})
        if res.fun <= neg_q(cur):
            self.lam = math.exp(res.x)

    def run(self, tol, max_iter, raise_on_cap=True):
        self.loglik = self.observed_loglik()
        self.trace = [self.loglik]
        for _ in range(max_iter):
            z, xt = self.e_step()
            old_lam = self.lam
            self.m_step(z, xt)
            new_ll = self.observed_loglik()
            if self.lam != old_lam:
                # keep the old rate when its computed likelihood is better: near
                # convergence the true gain of a rate move can sit below the
                # evaluation noise of the truncation-mass terms
                ll_frozen = self.observed_loglik(lam=old_lam)
                if ll_frozen > new_ll:
                    self.lam = old_lam
                    new_ll = ll_frozen
            if new_ll < self.loglik - 1e-12 * max(1.0, abs(self.loglik)):
                raise AssertionError(
                    f"EM ascent violated: {self.loglik!r} -> {new_ll!r}")
            change = abs(new_ll - self.loglik) / max(1.0, abs(new_ll))
            self.loglik = new_ll
            self.trace.append(new_ll)
            if change < tol:
                return True
        if raise_on_cap:
            raise ConvergenceError(
                f"EM did not converge within {max_iter} iterations",
                best=self._to_mixed_erlang())
        return False

    def _to_mixed_erlang(self) -> MixedErlang:
        # convert truncated-mixture weights back to untruncated weights
        mass = _window_mass(self.shapes, self.lam, self.lower, self.upper)
        alpha = self.beta / mass
        alpha = alpha / alpha.sum()
        keep = alpha > 1e-12
        alpha = alpha[keep] / alpha[keep].sum()
        return MixedErlang(shapes=self.shapes[keep], weights=alpha, rate=self.lam)


def _initial_state(x, cens, shapes, lower, upper) -> _EMState:
    lam0 = shapes[-1] / max(np.max(x), 1e-300)
    means = shapes / lam0
    assign = np.argmin(np.abs(x[None, :] - means[:, None]), axis=0)
    beta = np.bincount(assign, minlength=shapes.size).astype(float) + 1.0
    beta /= beta.sum()
    return _EMState(x, cens, shapes, beta, lam0, lower, upper)


def _fit_shapes(x, cens, shapes, lower, upper, tol, max_iter, warm=None):
    state = _initial_state(x, cens, shapes, lower, upper)
    if warm is not None:
        beta, lam = warm
        state.beta = beta
        state.lam = lam
    state.run(tol, max_iter, raise_on_cap=False)
    return state


def _adjust_shapes(state: _EMState, x, cens, lower, upper, light_tol, light_iter,
                   max_sweeps: int = 6) -> _EMState:
    """Hill-climb each shape by +-1 while the likelihood improves."""
    for _ in range(max_sweeps):
        improved = False
        for j in range(state.shapes.size):
            for step in (+1, -1):
                while True:
                    cand = state.shapes.copy()
                    cand[j] += step
                    if cand[j] < 1:
                        break
                    if j > 0 and cand[j] <= cand[j - 1]:
                        break
                    if j < cand.size - 1 and cand[j] >= cand[j + 1]:
                        break
                    trial = _fit_shapes(x, cens, cand, lower, upper, light_tol,
                                        light_iter, warm=(state.beta.copy(), state.lam))
                    if trial.loglik > state.loglik + 1e-9:
                        state = trial
                        improved = True
                    else:
                        break
        if not improved:
            return state
    return state


def _information_criterion(state: _EMState, criterion: str) -> float:
    # parameter count: M-1 weights + 1 rate + M integer shapes
    df = 2 * state.shapes.size
    if criterion == "AIC":
        return -2.0 * state.loglik + 2.0 * df
    if criterion == "BIC":
        return -2.0 * state.loglik + math.log(state.x.size) * df
    raise DataError(f"unknown information criterion {criterion!r}")


def me_em_fit(data: CensoredSample, upper: float | None = None, lower: float = 0.0,
              init_m: int = 10, spread: int | None = None, criterion: str = "AIC",
              tol: float = 1e-8, max_iter: int = 1000,
              return_info: bool = False):
    """Fit a mixed Erlang by EM with a backward stepwise shape search.

    Right-censored observations and a fixed truncation window
    [lower, upper] are handled through conditional-expectation E-steps.
    Starting from shapes (s, 2s, ..., M s), each candidate size is refined
    by +-1 shape hill-climbing; the smallest shape is then deleted while the
    information criterion decreases.  Exploratory fits run on a light
    budget; the returned configuration is converged to ``tol``.
    """
    if init_m < 1:
        raise DataError("init_m must be at least 1")
    x = data.values
    cens = data.censored
    up = math.inf if upper is None else float(upper)
    if up <= lower:
        raise DataError("upper truncation must exceed the lower bound")
    if np.any(x < lower) or np.any(x > up):
        raise DataError("data must lie inside the truncation window")
    if np.all(cens):
        raise DataError("cannot fit a body model to fully censored data")
    if spread is None:
        mean, var = float(np.mean(x)), float(np.var(x))
        mom_shape = mean * (mean / var) if var > 0 else float(init_m)
        spread = max(1, round(mom_shape / init_m))
    shapes0 = np.arange(1, init_m + 1, dtype=int) * int(spread)

    light_tol, light_iter = max(tol, 1e-6), min(max_iter, 200)
    state = _fit_shapes(x, cens, shapes0, lower, up, light_tol, light_iter)
    state = _adjust_shapes(state, x, cens, lower, up, light_tol, light_iter)
    best_ic = _information_criterion(state, criterion)
    while state.shapes.size > 1:
        cand_shapes = state.shapes[1:].copy()
        warm_beta = state.beta[1:] / state.beta[1:].sum()
        cand = _fit_shapes(x, cens, cand_shapes, lower, up, light_tol, light_iter,
                           warm=(warm_beta, state.lam))
        cand = _adjust_shapes(cand, x, cens, lower, up, light_tol, light_iter)
        cand_ic = _information_criterion(cand, criterion)
        if cand_ic < best_ic:
            state, best_ic = cand, cand_ic
        else:
            break
    state.run(tol, max_iter)
    me = state._to_mixed_erlang()
    if return_info:
        info = {"loglik": state.loglik, "trace": list(state.trace),
                "ic": _information_criterion(state, criterion),
                "criterion": criterion, "n_components": me.n_components}
        return me, info
    return me


# ---------------------------------------------------------------------------
# generalized Pareto pieces


def gp_survival(tail: GeneralizedParetoTail, x) -> float | np.ndarray:
    """Exceedance survival (1 + xi (x - t)/sigma)^(-1/xi); 1 at the threshold."""
    xa = np.asarray(x, dtype=float)
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa)
    z = (xa - tail.threshold) / tail.sigma
    if abs(tail.xi) < _XI_EXP_SWITCH:
        out = np.exp(-np.maximum(z, 0.0))
    else:
        base = 1.0 + tail.xi * np.maximum(z, 0.0)
        out = np.where(base > 0.0, np.maximum(base, 1e-300) ** (-1.0 / tail.xi), 0.0)
    out = np.where(z < 0.0, 1.0, out)
    return float(out[0]) if scalar else out


def gp_density(tail: GeneralizedParetoTail, x) -> float | np.ndarray:
    xa = np.asarray(x, dtype=float)
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa)
    z = (xa - tail.threshold) / tail.sigma
    if abs(tail.xi) < _XI_EXP_SWITCH:
        out = np.exp(-np.maximum(z, 0.0)) / tail.sigma
    else:
        base = 1.0 + tail.xi * np.maximum(z, 0.0)
        out = np.where(base > 0.0,
                       np.maximum(base, 1e-300) ** (-1.0 - 1.0 / tail.xi) / tail.sigma,
                       0.0)
    out = np.where(z < 0.0, 0.0, out)
    return float(out[0]) if scalar else out


def gp_quantile(tail: GeneralizedParetoTail, survival_level: float) -> float:
    """Point with exceedance survival equal to ``survival_level``."""
    if not 0.0 < survival_level <= 1.0:
        raise DataError("survival level must lie in (0, 1]")
    if abs(tail.xi) < _XI_EXP_SWITCH:
        return tail.threshold - tail.sigma * math.log(survival_level)
    return tail.threshold + tail.sigma / tail.xi * (survival_level ** -tail.xi - 1.0)


# ---------------------------------------------------------------------------
# composite model


def _body_cdf_normalized(m: CompositeModel, x) -> np.ndarray:
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    den = me_cdf_diff(m.body, m.lower, m.tail.threshold)
    r = m.body.shapes.astype(float)[:, None]
    lo = (gammainc(r[:, 0], m.body.rate * m.lower)[:, None]
          if m.lower > 0.0 else np.zeros((r.size, 1)))
    num = np.sum(m.body.weights[:, None]
                 * (gammainc(r, m.body.rate * xa[None, :]) - lo), axis=0)
    out = num / den
    return out if np.ndim(x) else float(out[0])


def composite_density(m: CompositeModel, x) -> float | np.ndarray:
    xa = np.asarray(x, dtype=float)
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa)
    t = m.tail.threshold
    out = np.zeros(xa.shape)
    body = (xa > m.lower) & (xa <= t)
    if np.any(body):
        den = me_cdf_diff(m.body, m.lower, t)
        out[body] = m.pi * me_density(m.body, xa[body]) / den
    up = xa > t
    if np.any(up):
        out[up] = (1.0 - m.pi) * gp_density(m.tail, xa[up])
    return float(out[0]) if scalar else out


def composite_survival(m: CompositeModel, x) -> float | np.ndarray:
    xa = np.asarray(x, dtype=float)
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa)
    t = m.tail.threshold
    out = np.ones(xa.shape)
    body = (xa > m.lower) & (xa <= t)
    if np.any(body):
        out[body] = 1.0 - m.pi * _body_cdf_normalized(m, xa[body])
    up = xa > t
    if np.any(up):
        out[up] = (1.0 - m.pi) * gp_survival(m.tail, xa[up])
    return float(out[0]) if scalar else out


def composite_quantile(m: CompositeModel, level: float) -> float:
    """Quantile of the composite model: numeric body inversion, closed-form tail."""
    if not 0.0 < level < 1.0:
        raise DataError("level must lie strictly inside (0, 1)")
    t = m.tail.threshold
    if level == m.pi:
        return float(t)
    if level < m.pi:
        target = level / m.pi
        f = lambda z: float(_body_cdf_normalized(m, z)) - target
        lo = m.lower if m.lower > 0.0 else 0.0
        return float(brentq(f, lo, t, xtol=1e-13 * max(t, 1.0), rtol=8.9e-16,
                            maxiter=300))
    return float(gp_quantile(m.tail, (1.0 - level) / (1.0 - m.pi)))


# ---------------------------------------------------------------------------
# splice fitting


def _fit_gp_censored(exc: np.ndarray, cens: np.ndarray, xi0: float,
                     sigma0: float) -> tuple[float, float]:
    """Censoring-aware GP maximum likelihood on exceedances."""
    unc = ~cens

    def nll(params):
        logsig, xi = params
        sig = math.exp(logsig)
        z = 1.0 + xi * exc / sig
        if np.any(z <= 0.0):
            return 1e12
        logz = np.log(z)
        if abs(xi) < _XI_EXP_SWITCH:
            ll = -np.sum(exc[unc]) / sig - logsig * np.count_nonzero(unc) \
                 - np.sum(exc[cens]) / sig
        else:
            ll = (-np.count_nonzero(unc) * logsig
                  - (1.0 + 1.0 / xi) * np.sum(logz[unc])
                  - (1.0 / xi) * np.sum(logz[cens]))
        return -ll if np.isfinite(ll) else 1e12

    best = None
    for start in ((math.log(sigma0), xi0), (math.log(sigma0), 0.1),
                  (math.log(max(np.mean(exc), 1e-12)), 0.5)):
        res = minimize(nll, np.asarray(start), method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 4000})
        if best is None or res.fun < best.fun:
            best = res
    return math.exp(best.x[0]), float(best.x[1])


def splice_fit(data: CensoredSample, threshold_rank: int,
               pi_convention: str = "empirical", lower: float = 0.0,
               **em_options) -> CompositeModel:
    """Fit a composite model with the splice at the k-th largest observation.

    The body is fitted on the data at or below the threshold with upper
    truncation there; the tail is a censoring-aware GP fit on the
    exceedances, initialized at the censored Hill value.  ``pi_convention``
    selects the body mass: "empirical" uses the fraction of data not above
    the threshold, "quantile" uses 1 - (k+1)/(n+1).
    """
    n = data.n
    k = threshold_rank
    if not 1 <= k <= n - 1:
        raise DataError(f"threshold rank {k} outside 1..{n - 1}")
    if k < 10:
        raise DataError(f"only {k} exceedances: need at least 10 to fit the tail")
    t = float(data.values[n - k - 1])
    if pi_convention == "empirical":
        pi = float(np.count_nonzero(data.values <= t)) / n
    elif pi_convention == "quantile":
        pi = 1.0 - (k + 1) / (n + 1)
    else:
        raise DataError(f"unknown pi convention {pi_convention!r}")

    below = data.values <= t
    # a censored observation recorded exactly at the threshold carries no
    # body information (its true value lies above)
    body_mask = below & ~(data.censored & (data.values == t))
    if not np.any(body_mask):
        raise DataError("no body observations below the threshold")
    body_sample = CensoredSample(values=data.values[body_mask],
                                 censored=data.censored[body_mask])
    body = me_em_fit(body_sample, upper=t, lower=lower, **em_options)

    tail_mask = data.values > t
    exc = data.values[tail_mask] - t
    cens = data.censored[tail_mask]
    try:
        xi0 = censored_hill(data, k)
    except DataError:
        xi0 = 0.5
    sigma0 = xi0 * t if xi0 > 0.05 else float(np.mean(exc))
    sigma, xi = _fit_gp_censored(exc, cens, xi0, sigma0)
    tail = GeneralizedParetoTail(threshold=t, sigma=sigma, xi=xi)
    return CompositeModel(body=body, tail=tail, pi=pi, lower=lower)


# ---------------------------------------------------------------------------
# serialization


def composite_to_dict(m: CompositeModel) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "shapes": [int(s) for s in m.body.shapes],
        "weights": [float(w) for w in m.body.weights],
        "rate": float(m.body.rate),
        "threshold": float(m.tail.threshold),
        "sigma": float(m.tail.sigma),
        "xi": float(m.tail.xi),
        "pi": float(m.pi),
        "lower": float(m.lower),
    }


def composite_from_dict(doc: dict) -> CompositeModel:
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise DataError(f"unsupported schema version {doc.get('schema_version')!r}")
    body = MixedErlang(shapes=np.asarray(doc["shapes"], dtype=int),
                       weights=np.asarray(doc["weights"], dtype=float),
                       rate=float(doc["rate"]))
    tail = GeneralizedParetoTail(threshold=float(doc["threshold"]),
                                 sigma=float(doc["sigma"]), xi=float(doc["xi"]))
    return CompositeModel(body=body, tail=tail, pi=float(doc["pi"]),
                          lower=float(doc["lower"]))


def composite_to_json(m: CompositeModel) -> str:
    return json.dumps(composite_to_dict(m), sort_keys=True, indent=2)


def composite_from_json(text: str) -> CompositeModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise DataError(f"invalid model JSON: {err}") from err
    return composite_from_dict(doc)
