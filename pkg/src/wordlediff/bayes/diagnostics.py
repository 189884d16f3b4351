"""Rank-normalized split R-hat and bulk effective sample size."""

from __future__ import annotations

import warnings

import numpy as np
from scipy.special import ndtri
from scipy.stats import rankdata

MIN_DRAWS = 100


class DiagnosticsError(ValueError):
    pass


def _split(x: np.ndarray) -> np.ndarray:
    """(chains, draws) -> (2 * chains, draws // 2)."""
    half = x.shape[1] // 2
    return np.concatenate([x[:, :half], x[:, x.shape[1] - half :]], axis=0)


def _rank_normalize(x: np.ndarray) -> np.ndarray:
    r = rankdata(x, method="average").reshape(x.shape)
    return ndtri((r - 0.375) / (x.size + 0.25))


def _rhat(x: np.ndarray) -> float:
    m, n = x.shape
    chain_means = x.mean(axis=1)
    W = x.var(axis=1, ddof=1).mean()
    B = n * chain_means.var(ddof=1)
    if W <= 0:
        return np.nan
    var_plus = (n - 1) / n * W + B / n
    return float(np.sqrt(var_plus / W))


def _autocov(x: np.ndarray) -> np.ndarray:
    """Autocovariance of each row via FFT (biased estimator)."""
    m, n = x.shape
    centered = x - x.mean(axis=1, keepdims=True)
    size = 2 ** int(np.ceil(np.log2(2 * n)))
    f = np.fft.rfft(centered, n=size, axis=1)
    ac = np.fft.irfft(f * np.conj(f), n=size, axis=1)[:, :n]
    return ac / n


def _ess(x: np.ndarray) -> float:
    m, n = x.shape
    acov = _autocov(x)
    chain_var = acov[:, 0] * n / (n - 1)
    W = chain_var.mean()
    var_plus = W * (n - 1) / n + (x.mean(axis=1).var(ddof=1) if m > 1 else 0.0)
    if var_plus <= 0:
        return np.nan
    rho = 1.0 - (W - acov.mean(axis=0)) / var_plus
    rho[0] = 1.0
    # Geyer initial positive then monotone sequence over pairs
    t = 0
    pair_sums = []
    while t + 1 < n:
        s = rho[t] + rho[t + 1]
        if s < 0:
            break
        pair_sums.append(s)
        t += 2
    pair_sums = np.minimum.accumulate(np.array(pair_sums)) if pair_sums else np.array([1.0])
    tau = -1.0 + 2.0 * pair_sums.sum()
    tau = max(tau, 1.0 / np.log10(m * n))
    return float(m * n / tau)


def rhat(x: np.ndarray) -> float:
    """max of bulk and folded rank-normalized split R-hat for (chains, draws)."""
    x = np.asarray(x, dtype=float)
    if np.ptp(x) == 0:
        return np.nan
    s = _split(x)
    bulk = _rhat(_rank_normalize(s))
    folded = np.abs(s - np.median(s))
    tail = _rhat(_rank_normalize(folded)) if np.ptp(folded) > 0 else np.nan
    return float(np.nanmax([bulk, tail]))


def ess(x: np.ndarray) -> float:
    """Bulk ESS of (chains, draws) draws."""
    x = np.asarray(x, dtype=float)
    if np.ptp(x) == 0:
        return np.nan
    return _ess(_rank_normalize(_split(x)))


def diagnostics(chains) -> tuple[np.ndarray, np.ndarray]:
    """Per-parameter (rhat, ess) arrays for a PosteriorChains object or a
    raw (chains, draws, params) array."""
    draws = chains.draws if hasattr(chains, "draws") else np.asarray(chains, dtype=float)
    if draws.ndim == 2:
        draws = draws[..., None]
    if draws.shape[0] < 2:
        raise DiagnosticsError("need at least 2 chains")
    if draws.shape[1] < MIN_DRAWS:
        raise DiagnosticsError(f"need at least {MIN_DRAWS} kept draws per chain, got {draws.shape[1]}")
    r = np.array([rhat(draws[..., j]) for j in range(draws.shape[2])])
    e = np.array([ess(draws[..., j]) for j in range(draws.shape[2])])
    if np.any(np.isnan(r)):
        warnings.warn("R-hat undefined (zero variance) for some parameters", RuntimeWarning, stacklevel=2)
    return r, e
