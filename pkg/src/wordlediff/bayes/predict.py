"""Posterior predictive draws for the three submodels.

Each function takes one posterior draw per predictive draw.  `features`
is either one standardized 4-vector or one row per draw (used to average
over observed words).  Reports draws feed the `n_reports` argument of the
other two when predicting unseen days.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit

from .links import difficulty_linear, hardmoders_trend, periodic_effect, reports_trend
from .models import N_CAT
from .sampler import PosteriorChains

MAX_LOG_MU = 700.0


def draw_indices(chains: PosteriorChains, n_draws: int | None, rng: np.random.Generator) -> np.ndarray:
    total = chains.n_chains * chains.n_draws
    if n_draws is None or n_draws == total:
        return np.arange(total)
    return rng.choice(total, size=n_draws, replace=n_draws > total)


def _weekday(coeffs, day_of_week):
    """Per-draw day-of-week offset for (S, 7) coefficients."""
    S = coeffs.shape[0]
    dow = np.broadcast_to(np.asarray(day_of_week), (S,))
    return np.take_along_axis(coeffs, periodic_effect(np.arange(7), dow).astype(np.intp)[:, None], axis=1)[:, 0]


def _features(features, S):
    f = np.asarray(features, dtype=float)
    return np.broadcast_to(f, (S, f.shape[-1]))


def predict_reports(chains: PosteriorChains, features, T, day_of_week, rng: np.random.Generator,
                    n_draws: int | None = None, return_mu: bool = False):
    idx = draw_indices(chains, n_draws, rng)
    v = chains.flat()[idx]
    S = len(idx)
    b, theta, gamma, B = v[:, :4], v[:, 4:11], v[:, 11:16], v[:, 16]
    with np.errstate(over="ignore"):
        log_mu = (
            reports_trend(gamma, np.broadcast_to(T, (S,)))
            + _weekday(theta, day_of_week)
            + difficulty_linear(b, _features(features, S))
        )
    if np.any(log_mu > MAX_LOG_MU) or not np.all(np.isfinite(log_mu)):
        raise OverflowError("predicted report mean overflows (log mean > 700)")
    mu = np.exp(log_mu)
    n = rng.negative_binomial(B, B / (B + mu))
    return (n, mu) if return_mu else n


def predict_hardmoders(chains: PosteriorChains, features, T, day_of_week, n_reports, rng: np.random.Generator,
                       n_draws: int | None = None):
    """Returns (n_hardmode, p) draws."""
    idx = draw_indices(chains, n_draws, rng)
    v = chains.flat()[idx]
    S = len(idx)
    c, omega, lam, kappa = v[:, :4], v[:, 4:11], v[:, 11:15], v[:, 15]
    linear = (
        hardmoders_trend(lam, np.broadcast_to(T, (S,)))
        + _weekday(omega, day_of_week)
        + difficulty_linear(c, _features(features, S))
    )
    a = np.maximum(expit(linear) * kappa, 1e-300)
    b = np.maximum(expit(-linear) * kappa, 1e-300)
    p = rng.beta(a, b)
    n = np.broadcast_to(np.asarray(n_reports, dtype=np.int64), (S,))
    return rng.binomial(n, p), p


def sample_dirichlet(conc: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_gamma(conc)
    total = g.sum(axis=-1, keepdims=True)
    # all components underflowed: fall back to the largest concentration
    dead = (total[..., 0] <= 0)
    if np.any(dead):
        g[dead] = np.eye(conc.shape[-1])[np.argmax(conc[dead], axis=-1)]
        total = g.sum(axis=-1, keepdims=True)
    return g / total


def predict_try(chains: PosteriorChains, features, n_reports, rng: np.random.Generator,
                n_draws: int | None = None):
    """Returns (p, counts), each (S, 7)."""
    idx = draw_indices(chains, n_draws, rng)
    v = chains.flat()[idx]
    S = len(idx)
    a = v[:, : 5 * N_CAT].reshape(S, 5, N_CAT)
    sigma = v[:, 5 * N_CAT]
    d = difficulty_linear(a, _features(features, S))
    lnA = d + sigma[:, None] * rng.standard_normal((S, N_CAT))
    p = sample_dirichlet(np.exp(np.minimum(lnA, MAX_LOG_MU)), rng)
    n = np.broadcast_to(np.asarray(n_reports, dtype=np.int64), (S,))
    counts = rng.multinomial(n, p)
    return p, counts
