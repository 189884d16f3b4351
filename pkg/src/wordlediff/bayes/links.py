"""Linear predictors, trend curves and log-densities shared by the submodels.

Everything broadcasts over leading batch axes (chains, draws, days).
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit, gammaln

LOG_2PI = np.log(2 * np.pi)


def signed_power(base, exponent):
    """sign(s) * |s|**q, so negative bases with real exponents stay real."""
    base = np.asarray(base, dtype=float)
    return np.sign(base) * np.abs(base) ** exponent


def difficulty_linear(coeffs, features):
    """Difficulty regression.

    ``coeffs`` of shape (5, 7) (intercept row then one row per predictor)
    gives the 7-vector Try form; shape (4,) gives the scalar form without
    intercept used by the Reports and Hardmoders models.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    features = np.asarray(features, dtype=float)
    if coeffs.shape[-2:] == (5, 7):
        return coeffs[..., 0, :] + np.einsum("...k,...kc->...c", features, coeffs[..., 1:, :])
    return np.einsum("...k,...k->...", features, coeffs)


def periodic_effect(coeffs, day_of_week):
    """Day-of-week offset; `day_of_week` is 1 (Monday) .. 7 (Sunday)."""
    dow = np.asarray(day_of_week)
    if np.any((dow < 1) | (dow > 7)):
        raise ValueError(f"day of week must be in 1..7, got {day_of_week}")
    coeffs = np.asarray(coeffs, dtype=float)
    return np.take(coeffs, dow - 1, axis=-1)


def reports_trend(gamma, T):
    """g1 * (T - g5)**g2 * exp(-(T - g5) / g3) + g4 with a signed power."""
    g = np.asarray(gamma, dtype=float)
    g1, g2, g3, g4, g5 = (g[..., i] for i in range(5))
    if np.any(g3 == 0):
        raise ValueError("gamma3 must be non-zero")
    s = np.asarray(T, dtype=float) - g5
    return g1 * signed_power(s, g2) * np.exp(-s / g3) + g4


def hardmoders_trend(lam, T):
    """l1 * (T - l4)**l2 + l3 with a signed power."""
    l = np.asarray(lam, dtype=float)
    l1, l2, l3, l4 = (l[..., i] for i in range(4))
    return l1 * signed_power(np.asarray(T, dtype=float) - l4, l2) + l3


inv_logit = expit


# -- log densities -----------------------------------------------------------


def normal_logpdf(x, mu, sigma):
    z = (x - mu) / sigma
    return -0.5 * z * z - np.log(sigma) - 0.5 * LOG_2PI


def exponential_logpdf(x, rate):
    return np.where(x >= 0, np.log(rate) - rate * x, -np.inf)


def half_cauchy_logpdf(x, scale):
    return np.where(x >= 0, np.log(2 / (np.pi * scale)) - np.log1p((x / scale) ** 2), -np.inf)


def dirichlet_logpdf(log_p, conc):
    """Dirichlet density given log-probabilities (last axis is the simplex)."""
    return (
        gammaln(conc.sum(axis=-1))
        - gammaln(conc).sum(axis=-1)
        + ((conc - 1.0) * log_p).sum(axis=-1)
    )


def multinomial_log_coef(counts):
    counts = np.asarray(counts, dtype=float)
    return gammaln(counts.sum(axis=-1) + 1) - gammaln(counts + 1).sum(axis=-1)


def multinomial_logpmf(counts, log_p, log_coef=None):
    """Multinomial log-pmf; `log_coef` may pass in the precomputed coefficient."""
    counts = np.asarray(counts, dtype=float)
    # 0 * log(0) counts as 0
    with np.errstate(invalid="ignore"):
        terms = np.where(counts > 0, counts * log_p, 0.0)
    coef = multinomial_log_coef(counts) if log_coef is None else log_coef
    return coef + terms.sum(axis=-1)


def negbin_logpmf(n, log_mu, overdispersion):
    """Negative binomial with mean mu and variance mu + mu**2 / B, from log mu."""
    n = np.asarray(n, dtype=float)
    B = np.asarray(overdispersion, dtype=float)
    log_B = np.log(B)
    log_sum = np.logaddexp(log_B, log_mu)
    return (
        gammaln(n + B) - gammaln(B) - gammaln(n + 1)
        + B * (log_B - log_sum)
        + n * (log_mu - log_sum)
    )


def poisson_logpmf(n, mu):
    n = np.asarray(n, dtype=float)
    return n * np.log(mu) - mu - gammaln(n + 1)


def beta_logpdf(x, a, b, log_x=None, log1m_x=None):
    log_x = np.log(x) if log_x is None else log_x
    log1m_x = np.log1p(-x) if log1m_x is None else log1m_x
    return (a - 1) * log_x + (b - 1) * log1m_x - (gammaln(a) + gammaln(b) - gammaln(a + b))


def binomial_log_coef(k, n):
    k = np.asarray(k, dtype=float)
    n = np.asarray(n, dtype=float)
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def binomial_logpmf(k, n, log_p, log1m_p, log_coef=None):
    """Binomial log-pmf; `log_coef` may pass in a precomputed log(n choose k)."""
    k = np.asarray(k, dtype=float)
    n = np.asarray(n, dtype=float)
    with np.errstate(invalid="ignore"):
        return (
            (binomial_log_coef(k, n) if log_coef is None else log_coef)
            + np.where(k > 0, k * log_p, 0.0)
            + np.where(n - k > 0, (n - k) * log1m_p, 0.0)
        )
