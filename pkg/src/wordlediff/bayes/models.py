"""The Try, Reports and Hardmoders submodels.

Each submodel comes in two forms:

* ``*_log_posterior(params, data)``: log posterior of constrained
  parameter values (no Jacobian), for checking and inspection;
* a ``*Model`` class exposing the unconstrained, chain-batched density the
  sampler works on.  Positive parameters are sampled on the log scale,
  probability vectors by additive log-ratio against the last category,
  and per-day probabilities on the logit scale; the Jacobians are
  included.  Where a weekday effect and a positive trend constant only
  enter through their sum, the sampler works with the sum and orthonormal
  weekday coordinates instead (a linear map, unit Jacobian).

Priors: regression coefficients Normal(0, 20) (20 is the standard
deviation), day-of-week effects Normal(0, 1), sigma ~ Exponential(1),
gamma1-3 ~ Exponential(1), gamma4 ~ Exponential(0.01),
gamma5 ~ Normal(0, 1), B ~ Exponential(0.01), lambda1-3 ~ Exponential(1),
lambda4 ~ Normal(0, 1), kappa ~ HalfCauchy(0.5).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.special import expit, logsumexp

from .links import (
    LOG_2PI,
    beta_logpdf,
    binomial_log_coef,
    binomial_logpmf,
    difficulty_linear,
    dirichlet_logpdf,
    exponential_logpdf,
    half_cauchy_logpdf,
    hardmoders_trend,
    multinomial_log_coef,
    multinomial_logpmf,
    negbin_logpmf,
    normal_logpdf,
    periodic_effect,
    reports_trend,
)

N_CAT = 7
N_PRED = 4
COEF_SD = 20.0
DOW_SD = 1.0


@dataclass(frozen=True)
class ModelData:
    """Observed days with standardized predictors of each day's word."""

    X: np.ndarray  # (n, 4)
    T: np.ndarray  # (n,)
    dow: np.ndarray  # (n,) 1..7
    n_reports: np.ndarray  # (n,)
    n_hardmode: np.ndarray  # (n,)
    try_counts: np.ndarray  # (n, 7)

    def __post_init__(self):
        n = len(self.T)
        for name in ("X", "dow", "n_reports", "n_hardmode", "try_counts"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"{name} has {len(getattr(self, name))} rows, expected {n}")

    @property
    def n(self) -> int:
        return len(self.T)

    def subset(self, idx) -> "ModelData":
        return ModelData(*(np.asarray(getattr(self, f))[idx] for f in
                           ("X", "T", "dow", "n_reports", "n_hardmode", "try_counts")))


def _indexed(prefix: str, n: int) -> list[str]:
    return [f"{prefix}[{i}]" for i in range(1, n + 1)]


# -- constrained parameter sets ---------------------------------------------


@dataclass(frozen=True)
class TryParams:
    a: np.ndarray  # (5, 7): intercept a0 then a1..a4
    sigma: float
    lnA: np.ndarray  # (n, 7)
    p: np.ndarray  # (n, 7)


@dataclass(frozen=True)
class ReportsParams:
    b: np.ndarray  # (4,)
    theta: np.ndarray  # (7,)
    gamma: np.ndarray  # (5,)
    B: float


@dataclass(frozen=True)
class HardmodersParams:
    c: np.ndarray  # (4,)
    omega: np.ndarray  # (7,)
    lam: np.ndarray  # (4,)
    kappa: float
    p: np.ndarray  # (n,)


def try_log_posterior(params: TryParams, data: ModelData) -> float:
    a = np.asarray(params.a, dtype=float)
    p = np.asarray(params.p, dtype=float)
    sigma = params.sigma
    if not sigma > 0 or np.any(p < 0) or not np.allclose(p.sum(axis=-1), 1.0, atol=1e-9):
        return -np.inf
    with np.errstate(divide="ignore"):
        log_p = np.log(p)
    d = difficulty_linear(a, data.X)
    lnA = np.asarray(params.lnA, dtype=float)
    lp = normal_logpdf(a, 0.0, COEF_SD).sum() + exponential_logpdf(sigma, 1.0)
    lp += normal_logpdf(lnA, d, sigma).sum()
    lp += dirichlet_logpdf(log_p, np.exp(lnA)).sum()
    lp += multinomial_logpmf(data.try_counts, log_p).sum()
    return float(lp) if np.isfinite(lp) else -np.inf


def _reports_log_mu(b, theta, gamma, data: ModelData):
    return reports_trend(gamma, data.T) + periodic_effect(theta, data.dow) + difficulty_linear(b, data.X)


def reports_log_posterior(params: ReportsParams, data: ModelData) -> float:
    g = np.asarray(params.gamma, dtype=float)
    if np.any(g[:4] <= 0) or not params.B > 0:
        return -np.inf
    lp = (
        normal_logpdf(np.asarray(params.b), 0.0, COEF_SD).sum()
        + normal_logpdf(np.asarray(params.theta), 0.0, DOW_SD).sum()
        + exponential_logpdf(g[:3], 1.0).sum()
        + exponential_logpdf(g[3], 0.01)
        + normal_logpdf(g[4], 0.0, 1.0)
        + exponential_logpdf(params.B, 0.01)
    )
    if data.n:
        log_mu = _reports_log_mu(params.b, params.theta, g, data)
        lp += negbin_logpmf(data.n_reports, log_mu, params.B).sum()
    return float(lp) if np.isfinite(lp) else -np.inf


def hardmoders_linear(c, omega, lam, data: ModelData):
    return hardmoders_trend(lam, data.T) + periodic_effect(omega, data.dow) + difficulty_linear(c, data.X)


def hardmoders_eta(c, omega, lam, data: ModelData):
    return expit(hardmoders_linear(c, omega, lam, data))


def hardmoders_log_posterior(params: HardmodersParams, data: ModelData) -> float:
    lam = np.asarray(params.lam, dtype=float)
    p = np.asarray(params.p, dtype=float)
    if np.any(lam[:3] <= 0) or not params.kappa > 0 or np.any((p <= 0) | (p >= 1)):
        return -np.inf
    lp = (
        normal_logpdf(np.asarray(params.c), 0.0, COEF_SD).sum()
        + normal_logpdf(np.asarray(params.omega), 0.0, DOW_SD).sum()
        + exponential_logpdf(lam[:3], 1.0).sum()
        + normal_logpdf(lam[3], 0.0, 1.0)
        + half_cauchy_logpdf(params.kappa, 0.5)
    )
    x = hardmoders_linear(params.c, params.omega, lam, data)
    k = params.kappa
    # expit(-x) keeps 1 - eta accurate when eta rounds to 1
    lp += beta_logpdf(p, expit(x) * k, expit(-x) * k).sum()
    lp += binomial_logpmf(data.n_hardmode, data.n_reports, np.log(p), np.log1p(-p)).sum()
    return float(lp) if np.isfinite(lp) else -np.inf


# -- unconstrained, chain-batched models --------------------------------------


class Density(NamedTuple):
    """Log-density pieces on the unconstrained scale, Jacobians included.

    A tempered replica multiplies the ``tempered_*`` pieces by its inverse
    temperature; ``base_*`` pieces stay as they are and must form a proper
    density on their own.
    """

    base_g: np.ndarray  # (C,)
    tempered_g: np.ndarray  # (C,)
    base_u: np.ndarray  # (C, U)
    tempered_u: np.ndarray  # (C, U)

    def total(self) -> np.ndarray:
        return self.base_g + self.tempered_g + (self.base_u + self.tempered_u).sum(axis=1)


class SubModel:
    """Interface the sampler relies on.

    ``log_density(g, z)`` takes globals ``g`` of shape (C, n_global) and unit
    latents ``z`` of shape (C, n_units, unit_dim) and returns a
    :class:`Density`.  Global terms must not depend on ``z``.

    Latent coordinates listed in ``rw_latent`` get random-walk updates; a
    model may also define ``gibbs_latents(g, z, beta, rngs)`` and
    ``gibbs_globals(g, z, beta, rngs)``, exact full-conditional draws
    returning new latents or new ``(g, z)`` respectively (a global draw may
    re-express the latents when they are stored relative to the globals).  ``beta`` is each
    row's inverse temperature and ``rngs`` holds one generator per chain,
    rows being grouped chain by chain.

    ``candidate(rng)`` gives an overdispersed starting point for the pilot
    search that picks where chains start (defaults to ``initial``).
    """

    name: str
    n_global: int
    n_units: int = 0
    unit_dim: int = 0
    param_names: list[str]
    latent_names: list[str] = []

    def __init__(self, data: ModelData):
        self.data = data

    @property
    def global_blocks(self) -> list[np.ndarray]:
        return [np.arange(self.n_global)]

    @property
    def rw_latent(self) -> np.ndarray:
        return np.arange(self.unit_dim)

    def log_density(self, g, z) -> Density:
        raise NotImplementedError

    def constrain(self, g) -> np.ndarray:
        raise NotImplementedError

    def unconstrain(self, params) -> np.ndarray:
        raise NotImplementedError

    def constrain_latents(self, g, z) -> np.ndarray:
        return z.reshape(z.shape[0], -1)

    def initial(self, rng: np.random.Generator):
        raise NotImplementedError

    def candidate(self, rng: np.random.Generator):
        return self.initial(rng)


def _per_chain(rngs, fn, *arrays):
    """Apply ``fn(rng, *chunks)`` to each chain's rows and stack the results."""
    K = arrays[0].shape[0] // len(rngs)
    return np.concatenate([fn(rng, *(a[i * K:(i + 1) * K] for a in arrays)) for i, rng in enumerate(rngs)])


def _alr_log_p(alr):
    """log-probabilities from additive log-ratios against the last category."""
    full = np.concatenate([alr, np.zeros(alr.shape[:-1] + (1,))], axis=-1)
    return full - logsumexp(full, axis=-1, keepdims=True)


def log_gamma_variates(shape, rng: np.random.Generator) -> np.ndarray:
    """log of Gamma(shape, 1) draws, accurate for tiny shapes.

    Uses G(a) = G(a + 1) * U**(1/a), so nothing underflows to log(0).
    """
    shape = np.asarray(shape, dtype=float)
    g = rng.standard_gamma(shape + 1.0)
    u = rng.random(shape.shape)
    return np.log(g) + np.log(u) / shape


def _weekday_basis() -> np.ndarray:
    """Orthonormal 7x7 basis whose first column is the constant direction."""
    q, _ = np.linalg.qr(np.column_stack([np.ones(7), np.eye(7)[:, :6]]))
    return q * np.sign(q[0, 0])


_Q = _weekday_basis()
_SIGMA_STEPS = 3
_SQRT7 = np.sqrt(7.0)


def _weekday_and_constant(w, level):
    """Weekday effects and the positive trend constant from (w, level).

    The likelihood only sees ``constant + weekday``, so the sampler moves
    the sum (``level = constant + mean(weekday)``) and the weekday effects
    in an orthonormal basis; the map is linear with unit Jacobian.
    """
    effects = w @ _Q.T
    return effects, level - w[..., 0] / _SQRT7


class TryModel(SubModel):
    """Dirichlet-multinomial try counts with per-word lnA.

    Everything over the 7 categories is written in the orthonormal basis
    whose first axis shifts all categories together (``_Q``): one draw of p
    pins the ratios of A well but its total only loosely, so the two parts
    want different treatment.

    Globals: coefficients w (5x7, row-major; a_k = Q w_k), log sigma.  Per
    word: eps0, the standardized common component of lnA (non-centered),
    the six contrast components of lnA (centered), then the additive
    log-ratios of p.  Moves: a random-walk block over the common-component
    coefficients and log sigma; exact Gaussian draws of all coefficients
    given lnA (one linear regression per component); 1-D random walks on
    the seven lnA coordinates; exact Dirichlet draws of p.
    """

    name = "try"

    def __init__(self, data: ModelData):
        super().__init__(data)
        self.n_global = 5 * N_CAT + 1
        self.n_units = data.n
        self.unit_dim = N_CAT + (N_CAT - 1)
        self.param_names = [n for k in range(5) for n in _indexed(f"a{k}", N_CAT)] + ["sigma"]
        self.latent_names = [
            n for w in range(data.n) for n in
            [f"lnA[{w + 1},{i}]" for i in range(1, N_CAT + 1)] + [f"p[{w + 1},{i}]" for i in range(1, N_CAT + 1)]
        ]
        self._counts = np.asarray(data.try_counts, dtype=float)
        self._coef = multinomial_log_coef(self._counts)
        self._design = np.column_stack([np.ones(data.n), np.asarray(data.X, dtype=float)]) if data.n \
            else np.zeros((0, 5))
        self._gram = self._design.T @ self._design

    @property
    def global_blocks(self):
        return [np.r_[np.arange(5) * N_CAT, 5 * N_CAT]]

    @property
    def rw_latent(self):
        return np.arange(N_CAT)

    def _components(self, g, z):
        """(mean of the basis components, basis components of lnA), each (R, U, 7)."""
        w = g[:, : 5 * N_CAT].reshape(g.shape[0], 5, N_CAT)
        m = np.einsum("uk,rkj->ruj", self._design, w)
        v = z[..., :N_CAT].copy()
        v[..., 0] = m[..., 0] + np.exp(g[:, 5 * N_CAT])[:, None] * z[..., 0]
        return m, v

    def log_density(self, g, z):
        C = g.shape[0]
        log_sigma = g[:, 5 * N_CAT]
        sigma = np.exp(log_sigma)
        glob = normal_logpdf(g[:, : 5 * N_CAT], 0.0, COEF_SD).sum(axis=1) - sigma + log_sigma
        zero = np.zeros(C)
        if self.n_units == 0:
            return Density(glob, zero, np.zeros((C, 0)), np.zeros((C, 0)))
        m, v = self._components(g, z)
        lnA = v @ _Q.T
        log_p = _alr_log_p(z[..., N_CAT:])
        eps0 = z[..., 0]
        with np.errstate(over="ignore", invalid="ignore"):
            base_u = (
                -0.5 * eps0 * eps0 - 0.5 * LOG_2PI
                + normal_logpdf(v[..., 1:], m[..., 1:], sigma[:, None, None]).sum(axis=-1)
                + dirichlet_logpdf(log_p, np.exp(lnA))
                + log_p.sum(axis=-1)  # alr Jacobian
            )
        return Density(glob, zero, base_u, multinomial_logpmf(self._counts, log_p, self._coef))

    def gibbs_latents(self, g, z, beta, rngs):
        """p | lnA, counts ~ Dirichlet(A + beta * counts)."""
        _, v = self._components(g, z)
        conc = np.exp(v @ _Q.T) + beta[:, None, None] * self._counts
        lg = _per_chain(rngs, lambda rng, c: log_gamma_variates(c, rng), conc)
        out = z.copy()
        out[..., N_CAT:] = lg[..., :-1] - lg[..., -1:]
        return out

    def _sigma_given_lnA(self, log_sigma, ss, rngs):
        """Metropolis steps on log sigma | lnA, coefficients.

        With lnA fixed the conditional is Exponential(1) prior times a
        Normal likelihood of ``n = 7 U`` residuals with sum of squares ``ss``;
        in log sigma it is close to Normal with sd 1 / sqrt(2 n), which sets
        the step.
        """
        n = N_CAT * self.n_units
        step = 1.7 / np.sqrt(2.0 * n)

        def logpost(ls):
            return -np.exp(ls) + ls - n * ls - 0.5 * ss * np.exp(-2 * ls)

        R = len(log_sigma)
        for _ in range(_SIGMA_STEPS):
            noise = _per_chain(rngs, lambda rng, x: np.stack([rng.standard_normal(len(x)), rng.random(len(x))], 1),
                               np.zeros(R))
            prop = log_sigma + step * noise[:, 0]
            accept = np.log(noise[:, 1]) < logpost(prop) - logpost(log_sigma)
            log_sigma = np.where(accept, prop, log_sigma)
        return log_sigma

    def gibbs_globals(self, g, z, beta, rngs):
        """sigma and all coefficients given lnA, then eps0 re-expressed.

        With lnA held fixed these are centered-form conditionals (a few
        Metropolis steps for sigma, an exact Gaussian regression draw per
        basis component for the coefficients); alternating them with the
        non-centered random walk interweaves the two forms.
        """
        if self.n_units == 0:
            return g, z
        R = g.shape[0]
        m, v = self._components(g, z)
        log_sigma = self._sigma_given_lnA(g[:, 5 * N_CAT], ((v - m) ** 2).sum(axis=(1, 2)), rngs)
        sigma = np.exp(log_sigma)
        sigma2 = sigma**2
        prec = self._gram[None] / sigma2[:, None, None] + np.eye(5)[None] / COEF_SD**2
        chol = np.linalg.cholesky(prec)
        rhs = np.einsum("uk,ruj->rkj", self._design, v) / sigma2[:, None, None]
        mean = np.linalg.solve(prec, rhs)
        eps = _per_chain(rngs, lambda rng, x: rng.standard_normal(x.shape), np.zeros((R, 5, N_CAT)))
        # prec = L L^T, so L^-T eps has covariance prec^-1
        w = mean + np.linalg.solve(np.swapaxes(chol, 1, 2), eps)
        g_new = g.copy()
        g_new[:, : 5 * N_CAT] = w.reshape(R, -1)
        g_new[:, 5 * N_CAT] = log_sigma
        z_new = z.copy()
        m0 = self._design @ w[..., 0].T  # (U, R)
        z_new[..., 0] = (v[..., 0] - m0.T) / sigma[:, None]
        return g_new, z_new

    def constrain(self, g):
        a = g[:, : 5 * N_CAT].reshape(g.shape[0], 5, N_CAT) @ _Q.T
        return np.column_stack([a.reshape(g.shape[0], -1), np.exp(g[:, -1])])

    def unconstrain(self, params):
        a, sigma = params
        return np.concatenate([(np.asarray(a, dtype=float) @ _Q).ravel(), [np.log(sigma)]])

    def unconstrain_latents(self, g, lnA, p):
        """Latents of one row from constrained (lnA, p); g is that row's globals."""
        v = np.asarray(lnA, dtype=float) @ _Q
        m, _ = self._components(g[None], np.zeros((1, self.n_units, self.unit_dim)))
        v[:, 0] = (v[:, 0] - m[0, :, 0]) / np.exp(g[5 * N_CAT])
        log_p = np.log(np.asarray(p, dtype=float))
        return np.concatenate([v, log_p[:, :-1] - log_p[:, -1:]], axis=-1)

    def constrain_latents(self, g, z):
        _, v = self._components(g, z)
        p = np.exp(_alr_log_p(z[..., N_CAT:]))
        return np.concatenate([v @ _Q.T, p], axis=-1).reshape(z.shape[0], -1)

    def initial(self, rng):
        counts = self._counts
        n = counts.sum(axis=1, keepdims=True)
        p_hat = (counts + 0.5) / (n + 0.5 * N_CAT)
        p_bar = p_hat.mean(axis=0)
        var = p_hat.var(axis=0) if self.n_units > 1 else p_bar * (1 - p_bar) / 50
        conc = np.clip(np.mean(p_bar * (1 - p_bar) / np.maximum(var, 1e-12)) - 1.0, 2.0, 1e4)
        lnA = np.log(conc * p_hat)
        if self.n_units > 5:
            coef = np.linalg.lstsq(self._design, lnA, rcond=None)[0]
            sigma = float(np.clip((lnA - self._design @ coef).std(), 0.05, 2.0))
        else:
            coef = np.zeros((5, N_CAT))
            coef[0] = np.log(conc * p_bar)
            sigma = 0.5
        g = self.unconstrain((coef, sigma)) + rng.normal(0, 0.05, self.n_global)
        z = self.unconstrain_latents(g, lnA + rng.normal(0, 0.05, lnA.shape), p_hat)
        return g, z


class ReportsModel(SubModel):
    """Negative-binomial daily report counts.

    Unconstrained layout: b1..b4, weekday coordinates w (7), log gamma1..3,
    level = gamma4 + mean(theta), gamma5, log B.
    """

    name = "reports"
    _LOG_IDX = np.array([11, 12, 13, 16])

    def __init__(self, data: ModelData):
        super().__init__(data)
        self.n_global = N_PRED + 7 + 5 + 1
        self.param_names = (
            [f"b{k}" for k in range(1, N_PRED + 1)] + _indexed("theta", 7)
            + [f"gamma{k}" for k in range(1, 6)] + ["B"]
        )
        self._n = np.asarray(data.n_reports, dtype=float)

    def constrain(self, g):
        theta, g4 = _weekday_and_constant(g[:, 4:11], g[:, 14])
        e = np.exp(g[:, self._LOG_IDX])
        return np.column_stack([g[:, :4], theta, e[:, :3], g4, g[:, 15], e[:, 3]])

    def unconstrain(self, params: ReportsParams):
        theta = np.asarray(params.theta, dtype=float)
        gamma = np.asarray(params.gamma, dtype=float)
        return np.concatenate([
            params.b, theta @ _Q, np.log(gamma[:3]), [gamma[3] + theta.mean(), gamma[4], np.log(params.B)]
        ])

    def log_density(self, g, z):
        c = self.constrain(g)
        b, theta, gamma, B = c[:, :4], c[:, 4:11], c[:, 11:16], c[:, 16]
        with np.errstate(invalid="ignore", divide="ignore"):
            lp = (
                normal_logpdf(b, 0.0, COEF_SD).sum(axis=1)
                + normal_logpdf(theta, 0.0, DOW_SD).sum(axis=1)
                - gamma[:, :3].sum(axis=1)
                + exponential_logpdf(gamma[:, 3], 0.01)
                + normal_logpdf(gamma[:, 4], 0.0, 1.0)
                + np.log(0.01) - 0.01 * B
                + g[:, self._LOG_IDX].sum(axis=1)  # log-scale Jacobians
            )
        lik = np.zeros(g.shape[0])
        if self.data.n:
            with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
                log_mu = (
                    reports_trend(gamma[:, None, :], self.data.T[None, :])
                    + theta[:, self.data.dow - 1]
                    + b @ self.data.X.T
                )
                lik = negbin_logpmf(self._n, log_mu, B[:, None]).sum(axis=1)
        empty = np.zeros((g.shape[0], 0))
        return Density(lp, lik, empty, empty)

    def initial(self, rng):
        n = np.maximum(self._n, 1.0) if self.data.n else np.array([100.0])
        mean, var = n.mean(), n.var()
        B = float(np.clip(mean**2 / max(var - mean, 1e-9), 1.0, 1e4))
        gamma = np.array([0.1, 1.0, 1.0, np.log(mean), 0.0])
        g = self.unconstrain(ReportsParams(np.zeros(4), np.zeros(7), gamma, B))
        return g + rng.normal(0, 0.05, g.shape), np.zeros((0, 0))

    def candidate(self, rng):
        g, z = self.initial(rng)
        gamma = np.array([rng.exponential(1.0) + 0.05, rng.uniform(0.2, 2.0), rng.uniform(0.1, 2.0), 0.0,
                          -abs(rng.normal(0.0, 0.5))])
        T = self.data.T if self.data.n else np.zeros(1)
        level = np.log(np.maximum(self._n, 1.0)).mean() if self.data.n else np.log(100.0)
        gamma[3] = max(level - reports_trend(gamma, T).mean(), 1.0)
        theta = rng.normal(0.0, 0.1, 7)
        return self.unconstrain(ReportsParams(np.zeros(4), theta, gamma, np.exp(g[16]))), z


class HardmodersModel(SubModel):
    """Beta-binomial hard-mode counts with per-day latent p.

    Unconstrained layout: c1..c4, weekday coordinates w (7), log lambda1,
    log lambda2, level = lambda3 + mean(omega), lambda4, log kappa; one
    logit p per day, refreshed by exact Beta draws.
    """

    name = "hardmoders"
    _LOG_IDX = np.array([11, 12, 15])

    def __init__(self, data: ModelData):
        super().__init__(data)
        self.n_global = N_PRED + 7 + 4 + 1
        self.n_units = data.n
        self.unit_dim = 1
        self.param_names = (
            [f"c{k}" for k in range(1, N_PRED + 1)] + _indexed("omega", 7)
            + [f"lambda{k}" for k in range(1, 5)] + ["kappa"]
        )
        self.latent_names = [f"p[{d}]" for d in range(1, data.n + 1)]
        self._n = np.asarray(data.n_reports, dtype=float)
        self._nh = np.asarray(data.n_hardmode, dtype=float)
        self._coef = binomial_log_coef(self._nh, self._n)

    @property
    def rw_latent(self):
        return np.arange(0)

    def constrain(self, g):
        omega, l3 = _weekday_and_constant(g[:, 4:11], g[:, 13])
        e = np.exp(g[:, self._LOG_IDX])
        return np.column_stack([g[:, :4], omega, e[:, :2], l3, g[:, 14], e[:, 2]])

    def unconstrain(self, params):
        c, omega, lam, kappa = params[:4]
        omega = np.asarray(omega, dtype=float)
        lam = np.asarray(lam, dtype=float)
        return np.concatenate([c, omega @ _Q, np.log(lam[:2]), [lam[2] + omega.mean(), lam[3], np.log(kappa)]])

    def _shapes(self, c):
        """Beta shape parameters (eta kappa, (1 - eta) kappa) per day."""
        with np.errstate(over="ignore", invalid="ignore"):
            linear = (
                hardmoders_trend(c[:, None, 11:15], self.data.T[None, :])
                + c[:, 4:11][:, self.data.dow - 1]
                + c[:, :4] @ self.data.X.T
            )
        k = c[:, 15:16]
        return expit(linear) * k, expit(-linear) * k

    def log_density(self, g, z):
        c = self.constrain(g)
        lam, kappa = c[:, 11:15], c[:, 15]
        with np.errstate(invalid="ignore", divide="ignore"):
            glob = (
                normal_logpdf(c[:, :4], 0.0, COEF_SD).sum(axis=1)
                + normal_logpdf(c[:, 4:11], 0.0, DOW_SD).sum(axis=1)
                + exponential_logpdf(lam[:, :3], 1.0).sum(axis=1)
                + normal_logpdf(lam[:, 3], 0.0, 1.0)
                + half_cauchy_logpdf(kappa, 0.5)
                + g[:, self._LOG_IDX].sum(axis=1)
            )
        zero = np.zeros(g.shape[0])
        if self.n_units == 0:
            return Density(glob, zero, np.zeros((g.shape[0], 0)), np.zeros((g.shape[0], 0)))
        sa, sb = self._shapes(c)
        x = z[..., 0]
        log_p = -np.logaddexp(0.0, -x)
        log1m_p = -np.logaddexp(0.0, x)
        # the data pin p down, so the Beta term is what ties the globals
        # to the days; that is the part a hot replica relaxes
        base_u = binomial_logpmf(self._nh, self._n, log_p, log1m_p, self._coef) + log_p + log1m_p  # logit Jacobian
        with np.errstate(invalid="ignore", divide="ignore"):
            tempered_u = beta_logpdf(None, sa, sb, log_x=log_p, log1m_x=log1m_p)
        return Density(glob, zero, base_u, tempered_u)

    def gibbs_latents(self, g, z, beta, rngs):
        """Exact p draws from Beta(eta kappa + n_h, (1 - eta) kappa + n - n_h),
        with the prior shape parameters tempered as s -> beta (s - 1) + 1."""
        c = self.constrain(g)
        sa, sb = self._shapes(c)
        bt = beta[:, None]
        a = bt * (sa - 1.0) + 1.0 + self._nh
        b = bt * (sb - 1.0) + 1.0 + (self._n - self._nh)
        out = z.copy()
        out[..., 0] = _per_chain(
            rngs, lambda rng, x, y: log_gamma_variates(x, rng) - log_gamma_variates(y, rng), a, b
        )
        return out

    def constrain_latents(self, g, z):
        return expit(z[..., 0])

    def initial(self, rng):
        p_hat = (self._nh + 0.5) / (self._n + 1.0)
        logit = np.log(p_hat) - np.log1p(-p_hat)
        eta = p_hat.mean() if self.n_units else 0.1
        var = p_hat.var() if self.n_units > 1 else eta * (1 - eta) / 100
        kappa = float(np.clip(eta * (1 - eta) / max(var, 1e-12) - 1.0, 1.0, 1e5))
        # start with a gentle trend and the level carried by omega; lambda3
        # sits well inside its support so jitter cannot cross zero
        lam = np.array([0.1, 1.0, 0.3, 0.0])
        omega = np.full(7, np.log(eta) - np.log1p(-eta) - 0.35)
        g = self.unconstrain((np.zeros(4), omega, lam, kappa))
        return g + rng.normal(0, 0.05, g.shape), logit[:, None].copy()

    def candidate(self, rng):
        g, z = self.initial(rng)
        lam = np.array([rng.exponential(1.0) + 0.05, rng.uniform(0.3, 2.0), 0.0, rng.normal(0.5, 1.0)])
        omega = rng.normal(0.0, 0.5, 7)
        T = self.data.T if self.data.n else np.zeros(1)
        target = float(np.mean(z[:, 0])) if self.n_units else -2.0
        # choose lambda3 to match the mean logit, pushing omega down if needed
        need = target - hardmoders_trend(lam, T).mean() - omega.mean()
        if need < 0.05:
            omega += need - 0.05
            need = 0.05
        lam[2] = need
        return self.unconstrain((np.zeros(4), omega, lam, np.exp(g[15]))), z


MODELS = {"try": TryModel, "reports": ReportsModel, "hardmoders": HardmodersModel}


def build_model(name: str, data: ModelData) -> SubModel:
    return MODELS[name](data)


def params_from_row(name: str, row: Sequence[float]):
    """Constrained parameter set from one stored draw (globals only)."""
    v = np.asarray(row, dtype=float)
    if name == "try":
        return v[:35].reshape(5, N_CAT), float(v[35])
    if name == "reports":
        return ReportsParams(v[:4], v[4:11], v[11:16], float(v[16]))
    if name == "hardmoders":
        return v[:4], v[4:11], v[11:15], float(v[15])
    raise KeyError(name)
