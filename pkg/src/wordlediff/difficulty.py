"""Beta-distribution summary of a try distribution.

The 7 try categories are placed at x = 1/7, ..., 6/7, 1 and the Beta CDF
is least-squares fitted to the cumulative shares.  The Beta mean
alpha / (alpha + beta) is the difficulty score (higher is harder).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.special import betaln

N_CATEGORIES = 7
XS = np.array([i / 7 for i in range(1, 7)] + [1.0])

_CF_EPS = 1e-15
_CF_TINY = 1e-300
_CF_MAX_ITER = 500


class DegenerateDistributionError(ValueError):
    pass


@dataclass(frozen=True)
class BetaParams:
    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite, got {v}")


@dataclass(frozen=True)
class EmbeddedCMF:
    xs: np.ndarray
    ys: np.ndarray


@dataclass(frozen=True)
class BetaFit:
    params: BetaParams
    objective: float  # sum of squared CDF residuals
    rmse: float
    n_evals: int
    converged: bool

    @property
    def score(self) -> float:
        return difficulty_score(self.params)


def embed_cmf(try_counts: Sequence[float]) -> EmbeddedCMF:
    counts = np.asarray(try_counts, dtype=float)
    if counts.shape != (N_CATEGORIES,):
        raise ValueError(f"need {N_CATEGORIES} try counts")
    if np.any(counts < 0):
        raise ValueError("try counts must be non-negative")
    total = counts.sum()
    if total <= 0:
        raise ValueError("try counts sum to zero")
    ys = np.cumsum(counts) / total
    ys[-1] = 1.0
    return EmbeddedCMF(XS.copy(), ys)


def _betacf(x, a, b):
    """Continued fraction for I_x(a, b) by the modified Lentz method."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    d = np.where(np.abs(d) < _CF_TINY, _CF_TINY, d)
    d = 1.0 / d
    h = d.copy()
    done = np.zeros(x.shape, dtype=bool)
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _CF_TINY, _CF_TINY, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _CF_TINY, _CF_TINY, c)
        d = 1.0 / d
        h = np.where(done, h, h * d * c)
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _CF_TINY, _CF_TINY, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _CF_TINY, _CF_TINY, c)
        d = 1.0 / d
        delta = d * c
        h = np.where(done, h, h * delta)
        done |= np.abs(delta - 1.0) < _CF_EPS
        if done.all():
            break
    return h


def regularized_incomplete_beta(x, a, b):
    """I_x(a, b), vectorized over broadcastable inputs."""
    x, a, b = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, a, b)))
    out = np.empty(x.shape)
    lo = x <= 0.0
    hi = x >= 1.0
    inner = ~(lo | hi)
    out[lo] = 0.0
    out[hi] = 1.0
    if inner.any():
        xi, ai, bi = x[inner], a[inner], b[inner]
        log_front = ai * np.log(xi) + bi * np.log1p(-xi) - betaln(ai, bi)
        front = np.exp(log_front)
        direct = xi < (ai + 1.0) / (ai + bi + 2.0)
        res = np.empty(xi.shape)
        if direct.any():
            res[direct] = front[direct] * _betacf(xi[direct], ai[direct], bi[direct]) / ai[direct]
        flip = ~direct
        if flip.any():
            res[flip] = 1.0 - front[flip] * _betacf(1.0 - xi[flip], bi[flip], ai[flip]) / bi[flip]
        out[inner] = res
    return out if out.ndim else float(out)


def beta_cdf(x, params: BetaParams):
    if np.any(np.asarray(x) < 0) or np.any(np.asarray(x) > 1):
        raise ValueError("x must lie in [0, 1]")
    return regularized_incomplete_beta(x, params.alpha, params.beta)


def fit_beta(cmf: EmbeddedCMF, start: tuple[float, float] = (4.0, 4.0)) -> BetaFit:
    """Least-squares Beta CDF fit, Nelder-Mead over (log alpha, log beta)."""
    xs, ys = np.asarray(cmf.xs, dtype=float), np.asarray(cmf.ys, dtype=float)
    if ys[0] >= 1.0:
        raise DegenerateDistributionError("distribution too extreme for Beta fit (all mass in 1 try)")
    if ys[-2] <= 0.0:
        raise DegenerateDistributionError("distribution too extreme for Beta fit (all mass in failures)")

    def sse(theta):
        if np.any(np.abs(theta) > 700):
            return np.inf
        a, b = np.exp(theta)
        r = regularized_incomplete_beta(xs, a, b) - ys
        return float(r @ r)

    res = minimize(
        sse,
        x0=np.log(start),
        method="Nelder-Mead",
        # xatol bounds the simplex spread; fatol=inf leaves that as the only test
        options={"xatol": 1e-8, "fatol": np.inf, "maxfev": 10_000, "maxiter": 10_000},
    )
    alpha, beta = np.exp(res.x)
    return BetaFit(
        params=BetaParams(float(alpha), float(beta)),
        objective=float(res.fun),
        rmse=float(np.sqrt(res.fun / len(xs))),
        n_evals=int(res.nfev),
        converged=bool(res.success),
    )


def fit_counts(try_counts: Sequence[float]) -> BetaFit:
    return fit_beta(embed_cmf(try_counts))


def difficulty_score(params: BetaParams) -> float:
    return params.alpha / (params.alpha + params.beta)


def discretized_beta_probs(params: BetaParams) -> np.ndarray:
    """Category probabilities whose CMF is the Beta CDF at the embedding points."""
    cdf = regularized_incomplete_beta(XS, params.alpha, params.beta)
    return np.diff(np.concatenate([[0.0], cdf]))
