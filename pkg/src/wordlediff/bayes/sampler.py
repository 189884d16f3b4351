"""Adaptive random-walk Metropolis within Gibbs.

All chains advance together as a leading batch axis, but each chain owns
an RNG stream spawned from the root seed and adapts its own proposals,
so chain ``c`` is identical whatever the chain count.

One iteration:

* every global block gets a joint Gaussian random-walk proposal whose
  covariance is the chain's own warmup covariance (refreshed at a few
  fixed points of warmup) times an adapted scale;
* every random-walk latent coordinate gets a 1-D proposal, all units at
  once; units are conditionally independent given the globals, so each
  unit accepts or rejects on its own.  Scales are kept per (chain, unit,
  coordinate).

Models may also supply exact full-conditional draws for some globals
(after the global blocks) or latents (after the latent moves).

Scales follow Robbins-Monro updates on the log scale towards 0.30
acceptance (0.40 for 1-D proposals) and are frozen after warmup.

With more than one entry in ``temperatures`` each chain also carries
hotter replicas whose data log-likelihood is multiplied by the rung's
inverse temperature (priors untouched).  After every iteration one
adjacent pair of rungs proposes to exchange states.  Only the first rung
(temperature 1) is stored, so the stored draws still target the posterior.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize

from .diagnostics import diagnostics
from .models import Density

log = logging.getLogger(__name__)

TARGET_ACCEPT_BLOCK = 0.30
TARGET_ACCEPT_1D = 0.40
MIN_WARMUP_ACCEPT = 0.01
_COV_UPDATES = (0.15, 0.3, 0.5, 0.75)
PILOT_STREAM = 1_000_000  # appended to the stream key for the pilot search
_MAX_JITTER_TRIES = 100


class SamplerError(RuntimeError):
    pass


@dataclass(frozen=True)
class SamplerConfig:
    chains: int = 4
    warmup: int = 1000
    draws: int = 1000
    seed: int = 0
    thin: int = 1
    global_sweeps: int = 1
    latent_sweeps: int = 1
    init_scale: float = 0.1
    init_jitter: float = 0.1
    keep_latents: bool = False
    temperatures: tuple = (1.0,)
    pilot_starts: int = 0

    def __post_init__(self):
        if self.chains < 2:
            raise ValueError("need at least 2 chains")
        b = np.asarray(self.temperatures, dtype=float)
        if b.ndim != 1 or len(b) == 0 or b[0] != 1.0 or np.any(np.diff(b) >= 0) or b[-1] <= 0:
            raise ValueError("temperatures must start at 1 and strictly decrease towards a positive value")
        if min(self.warmup, self.draws, self.thin, self.global_sweeps, self.latent_sweeps) < 1:
            raise ValueError("warmup, draws, thin and sweep counts must be positive")


@dataclass
class PosteriorChains:
    names: list[str]
    draws: np.ndarray  # (chains, draws, params), constrained
    warmup: int
    seed: int
    acceptance: dict[str, np.ndarray]  # block name -> (chains,) post-warmup rates
    latent_names: list[str] = field(default_factory=list)
    latents: np.ndarray | None = None  # (chains, draws, n_latent)
    rhat: np.ndarray | None = None
    ess: np.ndarray | None = None

    @property
    def n_chains(self) -> int:
        return self.draws.shape[0]

    @property
    def n_draws(self) -> int:
        return self.draws.shape[1]

    def flat(self) -> np.ndarray:
        """(chains * draws, params), chain-major."""
        return self.draws.reshape(-1, self.draws.shape[-1])

    def column(self, name: str) -> np.ndarray:
        return self.draws[..., self.names.index(name)]

    def summary(self, probs=(0.05, 0.5, 0.95)) -> dict[str, dict[str, float]]:
        flat = self.flat()
        out = {}
        for j, name in enumerate(self.names):
            q = np.quantile(flat[:, j], probs)
            out[name] = {"mean": float(flat[:, j].mean()), **{f"q{p:g}": float(v) for p, v in zip(probs, q)}}
        return out


class _FunctionModel:
    """Adapter turning a plain log-density into a globals-only model."""

    def __init__(self, fn: Callable, dim: int, vectorized: bool):
        self.fn = fn
        self.n_global = dim
        self.n_units = 0
        self.unit_dim = 0
        self.global_blocks = [np.arange(dim)]
        self.param_names = [f"x[{i}]" for i in range(1, dim + 1)]
        self.latent_names: list[str] = []
        self.vectorized = vectorized

    def log_density(self, g, z):
        if self.vectorized:
            lp = np.asarray(self.fn(g), dtype=float)
        else:
            lp = np.array([float(self.fn(row)) for row in g])
        empty = np.zeros((g.shape[0], 0))
        # everything counts as prior, so tempering leaves it untouched
        return Density(lp, np.zeros_like(lp), empty, empty)

    def constrain(self, g):
        return g.copy()

    def constrain_latents(self, g, z):
        return z.reshape(z.shape[0], -1)


def _clean(x):
    return np.where(np.isnan(x), -np.inf, x)


def chain_rngs(seed: int | np.random.SeedSequence, chains: int, stream=()) -> list[np.random.Generator]:
    """Per-chain generators: SeedSequence(seed, spawn_key=stream + (chain,))."""
    if isinstance(seed, np.random.SeedSequence):
        base_entropy, base_key = seed.entropy, tuple(seed.spawn_key)
    else:
        base_entropy, base_key = seed, ()
    return [
        np.random.Generator(np.random.PCG64(np.random.SeedSequence(base_entropy, spawn_key=base_key + tuple(stream) + (c,))))
        for c in range(chains)
    ]


class _State:
    """Current point and density pieces of every replica (rows = chain * K + rung)."""

    def __init__(self, g, z, dens, beta):
        self.g, self.z, self.beta = g, z, beta
        self.pg, self.lg = _clean(dens.base_g), _clean(dens.tempered_g)
        self.pu, self.lu = _clean(dens.base_u), _clean(dens.tempered_u)

    def glob(self):
        return self.pg + self.beta * self.lg

    def unit(self):
        return self.pu + self.beta[:, None] * self.lu

    def loglik(self):
        return self.lg + self.lu.sum(axis=1)

    def swap(self, i, j):
        for name in ("g", "z", "pg", "lg", "pu", "lu"):
            a = getattr(self, name)
            a[[i, j]] = a[[j, i]]


def _normals(rngs, K, shape):
    return np.concatenate([r.standard_normal((K,) + shape) for r in rngs])


def _uniforms(rngs, K, shape=()):
    return np.concatenate([r.random((K,) + shape) for r in rngs])


def pilot_start(model, n_starts: int, rng: np.random.Generator):
    """Best of `n_starts` Nelder-Mead searches over the globals.

    Each search starts from ``model.candidate(rng)`` and holds that
    candidate's latents fixed.  Returns ``(g, z)`` of the highest density.
    """
    best = (np.inf, None, None)
    for _ in range(n_starts):
        g0, z0 = model.candidate(rng)
        zb = np.asarray(z0, dtype=float)[None]

        def objective(g):
            v = model.log_density(g[None], zb).total()[0]
            return -v if np.isfinite(v) else np.inf

        if not np.isfinite(objective(g0)):
            continue
        res = minimize(objective, g0, method="Nelder-Mead",
                       options={"maxfev": 100 * len(g0), "xatol": 1e-4, "fatol": 1e-6, "adaptive": True})
        if res.fun < best[0]:
            best = (res.fun, res.x, np.asarray(z0, dtype=float))
    if best[1] is None:
        raise SamplerError("no pilot candidate had a finite log posterior")
    return best[1], best[2]


def _jittered(model, g0, z0, scale, rng):
    """g0 plus Gaussian noise, shrinking the noise until the density is finite."""
    for attempt in range(_MAX_JITTER_TRIES):
        g = g0 + scale * 0.5 ** (attempt // 10) * rng.standard_normal(g0.shape)
        if np.isfinite(model.log_density(g[None], z0[None]).total()[0]):
            return g
    return g0.copy()


def run_sampler(model, config: SamplerConfig, init=None, stream=()) -> PosteriorChains:
    """Sample `model` (see :class:`~wordlediff.bayes.models.SubModel`).

    Chain starts: `init` plus jitter when given; otherwise, with
    ``config.pilot_starts > 0``, jitter around the best pilot search point
    (its RNG is the stream key extended by ``PILOT_STREAM``); otherwise the
    model's own ``initial``.
    """
    C = config.chains
    betas = np.asarray(config.temperatures, dtype=float)
    K = len(betas)
    R = C * K
    rngs = chain_rngs(config.seed, C, stream)
    Dg, U, Dz = model.n_global, model.n_units, model.unit_dim

    g = np.empty((R, Dg))
    z = np.empty((R, U, Dz))
    pilot = None
    if init is None and config.pilot_starts > 0:
        pilot_rng = chain_rngs(config.seed, 1, tuple(stream) + (PILOT_STREAM,))[0]
        pilot = pilot_start(model, config.pilot_starts, pilot_rng)
    for c in range(C):
        for k in range(K):
            r = c * K + k
            if pilot is not None:
                g[r] = _jittered(model, pilot[0], pilot[1].reshape(U, Dz), config.init_jitter, rngs[c])
                z[r] = pilot[1].reshape(U, Dz)
            elif init is None:
                g[r], zc = model.initial(rngs[c])
                if U:
                    z[r] = zc
            else:
                g[r] = np.asarray(init, dtype=float) + config.init_jitter * rngs[c].standard_normal(Dg)
    st = _State(g, z, model.log_density(g, z), np.tile(betas, C))
    if not np.all(np.isfinite(st.glob() + st.unit().sum(axis=1))):
        raise SamplerError("log posterior is not finite at the initial point")

    blocks = [np.asarray(b) for b in model.global_blocks]
    block_chol = [np.broadcast_to(np.eye(len(b)) * config.init_scale, (R, len(b), len(b))).copy() for b in blocks]
    block_logscale = [np.zeros(R) for _ in blocks]
    block_target = [TARGET_ACCEPT_1D if len(b) == 1 else TARGET_ACCEPT_BLOCK for b in blocks]
    unit_logscale = np.full((R, U, Dz), np.log(config.init_scale))

    total_iter = config.warmup + config.draws * config.thin
    cov_points = {int(f * config.warmup) for f in _COV_UPDATES if int(f * config.warmup) >= 20}
    history = np.empty((config.warmup, R, Dg))
    cold = np.arange(C) * K
    kept_g = np.empty((C, config.draws, len(model.param_names)))
    kept_z = np.empty((C, config.draws, len(model.latent_names))) if (config.keep_latents and U) else None
    accepts = {f"block{k}": np.zeros((2, R)) for k in range(len(blocks))}
    rw_latent = np.asarray(getattr(model, "rw_latent", np.arange(Dz))) if U else np.arange(0)
    gibbs = getattr(model, "gibbs_latents", None) if U else None
    gibbs_g = getattr(model, "gibbs_globals", None)
    if len(rw_latent):
        accepts["latent"] = np.zeros((2, R))
    swaps = np.zeros((2, C))
    n_latent_props = config.latent_sweeps * len(rw_latent)
    last_reset = 0

    for t in range(total_iter):
        warm = t < config.warmup
        phase = 0 if warm else 1
        gain = (t - last_reset + 1) ** -0.6 if warm else 0.0

        for _ in range(config.global_sweeps):
            for k, idx in enumerate(blocks):
                eps = _normals(rngs, K, (len(idx),))
                step = np.einsum("rij,rj->ri", block_chol[k], eps) * np.exp(block_logscale[k])[:, None]
                prop = st.g.copy()
                prop[:, idx] += step
                d = model.log_density(prop, st.z)
                pg, lg = _clean(d.base_g), _clean(d.tempered_g)
                pu, lu = _clean(d.base_u), _clean(d.tempered_u)
                new = pg + st.beta * lg + (pu + st.beta[:, None] * lu).sum(axis=1)
                with np.errstate(invalid="ignore"):
                    delta = new - (st.glob() + st.unit().sum(axis=1))
                acc = np.log(_uniforms(rngs, K)) < delta
                st.g[acc], st.pg[acc], st.lg[acc], st.pu[acc], st.lu[acc] = prop[acc], pg[acc], lg[acc], pu[acc], lu[acc]
                accepts[f"block{k}"][phase] += acc
                if warm:
                    block_logscale[k] += gain * (acc - block_target[k])

        if gibbs_g is not None:
            st.g, st.z = gibbs_g(st.g, st.z, st.beta, rngs)
            d = model.log_density(st.g, st.z)
            st.pg, st.lg = _clean(d.base_g), _clean(d.tempered_g)
            st.pu, st.lu = _clean(d.base_u), _clean(d.tempered_u)

        for _ in range(config.latent_sweeps):
            for j in rw_latent:
                prop = st.z.copy()
                prop[:, :, j] += _normals(rngs, K, (U,)) * np.exp(unit_logscale[:, :, j])
                d = model.log_density(st.g, prop)
                pu, lu = _clean(d.base_u), _clean(d.tempered_u)
                with np.errstate(invalid="ignore"):
                    delta = (pu + st.beta[:, None] * lu) - st.unit()
                acc = np.log(_uniforms(rngs, K, (U,))) < delta
                st.z = np.where(acc[..., None], prop, st.z)
                st.pu = np.where(acc, pu, st.pu)
                st.lu = np.where(acc, lu, st.lu)
                accepts["latent"][phase] += acc.mean(axis=1)
                if warm:
                    unit_logscale[:, :, j] += gain * (acc - TARGET_ACCEPT_1D)
            if gibbs is not None:
                st.z = gibbs(st.g, st.z, st.beta, rngs)
                d = model.log_density(st.g, st.z)
                st.pu, st.lu = _clean(d.base_u), _clean(d.tempered_u)

        if K > 1:
            # one adjacent-rung exchange per chain
            L = st.loglik()
            for c in range(C):
                j = int(rngs[c].integers(K - 1))
                lo, hi = c * K + j, c * K + j + 1
                log_r = (betas[j] - betas[j + 1]) * (L[hi] - L[lo])
                if np.log(rngs[c].random()) < log_r:
                    st.swap(lo, hi)
                    swaps[phase, c] += 1

        if warm:
            history[t] = st.g
            if t + 1 in cov_points:
                lo = (t + 1) // 2
                for k, idx in enumerate(blocks):
                    d = len(idx)
                    for r in range(R):
                        sample = history[lo : t + 1, r][:, idx]
                        cov = np.atleast_2d(np.cov(sample, rowvar=False)) * (2.38**2 / d)
                        if np.all(np.isfinite(cov)) and np.any(np.diag(cov) > 1e-12):
                            try:
                                block_chol[k][r] = np.linalg.cholesky(cov + np.eye(d) * (1e-8 * np.max(np.diag(cov)) + 1e-10))
                                block_logscale[k][r] = 0.0
                            except np.linalg.LinAlgError:
                                pass
                last_reset = t + 1
        else:
            s = t - config.warmup
            if s % config.thin == 0:
                i = s // config.thin
                kept_g[:, i] = model.constrain(st.g[cold])
                if kept_z is not None:
                    kept_z[:, i] = model.constrain_latents(st.g[cold], st.z[cold])

    props = {k: (config.global_sweeps if k != "latent" else n_latent_props) for k in accepts}
    for k, v in accepts.items():
        rate = v[0] / (config.warmup * props[k])
        if np.any(rate < MIN_WARMUP_ACCEPT):
            raise SamplerError(
                f"{k}: warmup acceptance {rate.min():.3g} < {MIN_WARMUP_ACCEPT}; "
                "the posterior likely needs re-parameterization"
            )
    kept_iters = config.draws * config.thin
    rates = {k: v[1][cold] / (kept_iters * props[k]) for k, v in accepts.items()}
    if K > 1:
        rates["swap"] = swaps[1] / kept_iters
    chains = PosteriorChains(
        names=list(model.param_names),
        draws=kept_g,
        warmup=config.warmup,
        seed=int(config.seed) if not isinstance(config.seed, np.random.SeedSequence) else int(config.seed.entropy),
        acceptance=rates,
        latent_names=list(model.latent_names) if kept_z is not None else [],
        latents=kept_z,
    )
    if chains.n_draws >= 100:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            chains.rhat, chains.ess = diagnostics(chains)
    return chains


def mcmc_sample(log_posterior: Callable, init, config: SamplerConfig, vectorized: bool = False) -> PosteriorChains:
    """Sample an unconstrained log-density given as a plain function.

    `log_posterior` maps a parameter vector to a float (or, with
    ``vectorized=True``, a (chains, dim) array to (chains,)).  Chains start
    at `init` plus ``config.init_jitter`` Gaussian noise.
    """
    init = np.atleast_1d(np.asarray(init, dtype=float))
    model = _FunctionModel(log_posterior, init.size, vectorized)
    return run_sampler(model, config, init=init)
