import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats
from scipy.special import expit, logit

from wordlediff.bayes.models import (
    HardmodersModel,
    HardmodersParams,
    ModelData,
    ReportsModel,
    ReportsParams,
    TryModel,
    TryParams,
    build_model,
    hardmoders_log_posterior,
    params_from_row,
    reports_log_posterior,
    try_log_posterior,
)


@pytest.fixture
def toy():
    return ModelData(
        X=np.array([[0.3, -1.2, 0.5, 0.0], [-0.7, 0.4, 1.1, -0.2], [1.5, 0.2, -0.9, 0.8]]),
        T=np.array([0.0, 0.4, 1.0]),
        dow=np.array([5, 6, 7]),
        n_reports=np.array([1200, 950, 400]),
        n_hardmode=np.array([80, 71, 45]),
        try_counts=np.array([[5, 70, 260, 410, 300, 130, 25], [2, 40, 200, 330, 250, 100, 28],
                             [0, 10, 70, 140, 110, 55, 15]]),
    )


def random_try(rng, n):
    return TryParams(rng.normal(0, 1, (5, 7)), float(rng.gamma(2, 0.3)), rng.normal(2, 0.5, (n, 7)),
                     rng.dirichlet(np.full(7, 3.0), size=n))


def random_reports(rng):
    return ReportsParams(rng.normal(0, 0.3, 4), rng.normal(0, 0.2, 7),
                         np.array([rng.uniform(0.05, 0.5), rng.uniform(0.2, 3), rng.gamma(2), rng.uniform(6, 7), rng.normal()]),
                         float(rng.gamma(3, 10)))


def random_hard(rng, n):
    return HardmodersParams(rng.normal(0, 0.3, 4), rng.normal(0, 0.2, 7),
                            np.array([rng.gamma(2), rng.uniform(0.2, 3), rng.gamma(2), rng.normal()]),
                            float(rng.gamma(3, 20)), rng.uniform(0.02, 0.2, n))


# -- independent oracles written directly against scipy.stats ---------------


def oracle_try(p: TryParams, d: ModelData):
    lp = stats.norm.logpdf(p.a, 0, 20).sum() + stats.expon.logpdf(p.sigma)
    for i in range(d.n):
        mean = [p.a[0, c] + sum(d.X[i, k] * p.a[k + 1, c] for k in range(4)) for c in range(7)]
        lp += stats.norm.logpdf(p.lnA[i], mean, p.sigma).sum()
        lp += stats.dirichlet.logpdf(p.p[i], np.exp(p.lnA[i]))
        lp += stats.multinomial.logpmf(d.try_counts[i], d.try_counts[i].sum(), p.p[i])
    return lp


def oracle_reports(p: ReportsParams, d: ModelData):
    g1, g2, g3, g4, g5 = p.gamma
    lp = (stats.norm.logpdf(p.b, 0, 20).sum() + stats.norm.logpdf(p.theta, 0, 1).sum()
          + stats.expon.logpdf([g1, g2, g3]).sum() + stats.expon.logpdf(g4, scale=100)
          + stats.norm.logpdf(g5) + stats.expon.logpdf(p.B, scale=100))
    for i in range(d.n):
        s = d.T[i] - g5
        trend = g1 * np.sign(s) * abs(s) ** g2 * np.exp(-s / g3) + g4
        mu = np.exp(trend + p.theta[d.dow[i] - 1] + np.dot(p.b, d.X[i]))
        lp += stats.nbinom.logpmf(d.n_reports[i], p.B, p.B / (p.B + mu))
    return lp


def oracle_hard(p: HardmodersParams, d: ModelData):
    l1, l2, l3, l4 = p.lam
    lp = (stats.norm.logpdf(p.c, 0, 20).sum() + stats.norm.logpdf(p.omega, 0, 1).sum()
          + stats.expon.logpdf([l1, l2, l3]).sum() + stats.norm.logpdf(l4)
          + stats.halfcauchy.logpdf(p.kappa, scale=0.5))
    for i in range(d.n):
        s = d.T[i] - l4
        eta = expit(l1 * np.sign(s) * abs(s) ** l2 + l3 + p.omega[d.dow[i] - 1] + np.dot(p.c, d.X[i]))
        lp += stats.beta.logpdf(p.p[i], eta * p.kappa, (1 - eta) * p.kappa)
        lp += stats.binom.logpmf(d.n_hardmode[i], d.n_reports[i], p.p[i])
    return lp


@pytest.mark.parametrize("seed", range(5))
def test_log_posteriors_match_direct_summation(toy, seed):
    rng = np.random.default_rng(seed)
    tp = random_try(rng, 3)
    assert try_log_posterior(tp, toy) == pytest.approx(oracle_try(tp, toy), abs=1e-8)
    rp = random_reports(rng)
    assert reports_log_posterior(rp, toy) == pytest.approx(oracle_reports(rp, toy), abs=1e-8)
    hp = random_hard(rng, 3)
    assert hardmoders_log_posterior(hp, toy) == pytest.approx(oracle_hard(hp, toy), abs=1e-8)


def test_zero_days_is_prior_only(toy):
    empty = toy.subset(slice(0, 0))
    rp = random_reports(np.random.default_rng(1))
    assert reports_log_posterior(rp, empty) == pytest.approx(oracle_reports(rp, empty), abs=1e-10)


def test_uniform_beta_term_vanishes():
    d = ModelData(np.zeros((1, 4)), np.zeros(1), np.array([1]), np.array([0]), np.array([0]), np.zeros((1, 7), int))
    # lambda chosen so the linear predictor is 0, so eta = 0.5 and kappa = 2 gives Beta(1, 1)
    base = HardmodersParams(np.zeros(4), np.zeros(7), np.array([1.0, 1.0, 1.0, 1.0]), 2.0, np.array([0.5]))
    s = -1.0  # T - lambda4
    lam = np.array([1.0, 1.0, 1.0, 1.0])  # 1 * sign(-1)*1 + 1 = 0
    assert 1.0 * np.sign(s) * abs(s) + 1.0 == 0.0
    prior = hardmoders_log_posterior(base, d)
    for p in (0.01, 0.3, 0.97):
        assert hardmoders_log_posterior(HardmodersParams(base.c, base.omega, lam, 2.0, np.array([p])), d) == \
            pytest.approx(prior, abs=1e-12)


def test_support_violations_give_minus_infinity(toy):
    rng = np.random.default_rng(4)
    tp = random_try(rng, 3)
    assert try_log_posterior(TryParams(tp.a, -0.1, tp.lnA, tp.p), toy) == -np.inf
    bad_p = tp.p.copy()
    bad_p[0, :2] = [-0.1, bad_p[0, 1] + 0.1 + bad_p[0, 0]]
    assert try_log_posterior(TryParams(tp.a, tp.sigma, tp.lnA, bad_p), toy) == -np.inf
    rp = random_reports(rng)
    for j in range(4):
        g = rp.gamma.copy()
        g[j] = -abs(g[j])
        assert reports_log_posterior(ReportsParams(rp.b, rp.theta, g, rp.B), toy) == -np.inf
    assert reports_log_posterior(ReportsParams(rp.b, rp.theta, rp.gamma, 0.0), toy) == -np.inf
    hp = random_hard(rng, 3)
    for j in range(3):
        lam = hp.lam.copy()
        lam[j] = -lam[j]
        assert hardmoders_log_posterior(HardmodersParams(hp.c, hp.omega, lam, hp.kappa, hp.p), toy) == -np.inf
    assert hardmoders_log_posterior(HardmodersParams(hp.c, hp.omega, hp.lam, -1.0, hp.p), toy) == -np.inf
    assert hardmoders_log_posterior(HardmodersParams(hp.c, hp.omega, hp.lam, hp.kappa, np.array([0.1, 1.0, 0.2])), toy) == -np.inf


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1))
def test_finite_on_support(seed):
    rng = np.random.default_rng(seed)
    d = ModelData(rng.normal(size=(4, 4)), np.sort(rng.uniform(0, 1.5, 4)), rng.integers(1, 8, 4),
                  np.array([300, 10, 0, 50]), np.array([30, 0, 0, 50]),
                  np.array([[1, 9, 60, 100, 80, 40, 10], [0, 0, 3, 4, 2, 1, 0], [0] * 7, [0, 5, 10, 20, 10, 5, 0]]))
    assert np.isfinite(try_log_posterior(random_try(rng, 4), d))
    assert np.isfinite(reports_log_posterior(random_reports(rng), d))
    assert np.isfinite(hardmoders_log_posterior(random_hard(rng, 4), d))


# -- the unconstrained densities the sampler uses -----------------------------


def test_reports_density_is_posterior_plus_jacobian(toy):
    m = ReportsModel(toy)
    rng = np.random.default_rng(5)
    for _ in range(5):
        rp = random_reports(rng)
        g = m.unconstrain(rp)
        assert np.allclose(m.constrain(g[None])[0], np.concatenate([rp.b, rp.theta, rp.gamma, [rp.B]]))
        jac = np.log(rp.gamma[:3]).sum() + np.log(rp.B)
        assert m.log_density(g[None], np.zeros((1, 0, 0))).total()[0] == \
            pytest.approx(reports_log_posterior(rp, toy) + jac, abs=1e-8)


def test_hardmoders_density_is_posterior_plus_jacobian(toy):
    m = HardmodersModel(toy)
    rng = np.random.default_rng(6)
    for _ in range(5):
        hp = random_hard(rng, 3)
        g = m.unconstrain((hp.c, hp.omega, hp.lam, hp.kappa))
        z = logit(hp.p)[None, :, None]
        jac = np.log(hp.lam[:2]).sum() + np.log(hp.kappa) + np.sum(np.log(hp.p) + np.log1p(-hp.p))
        assert m.log_density(g[None], z).total()[0] == pytest.approx(hardmoders_log_posterior(hp, toy) + jac, abs=1e-8)
        assert np.allclose(m.constrain_latents(g[None], z)[0], hp.p)


def test_try_density_is_posterior_plus_jacobian(toy):
    m = TryModel(toy)
    rng = np.random.default_rng(7)
    for _ in range(5):
        tp = random_try(rng, 3)
        g = m.unconstrain((tp.a, tp.sigma))
        z = m.unconstrain_latents(g, tp.lnA, tp.p)[None]
        # log sigma, the non-centred common component of each word, alr of p
        jac = np.log(tp.sigma) * (1 + toy.n) + np.log(tp.p).sum()
        assert m.log_density(g[None], z).total()[0] == pytest.approx(try_log_posterior(tp, toy) + jac, abs=1e-8)
        back = m.constrain_latents(g[None], z)[0].reshape(toy.n, 14)
        assert np.allclose(back[:, :7], tp.lnA) and np.allclose(back[:, 7:], tp.p)
        row = m.constrain(g[None])[0]
        a, sigma = params_from_row("try", row)
        assert np.allclose(a, tp.a) and sigma == pytest.approx(tp.sigma)


def test_parameter_names_and_sizes(toy):
    sizes = {"try": 36, "reports": 17, "hardmoders": 16}
    for name, k in sizes.items():
        m = build_model(name, toy)
        assert len(m.param_names) == k == m.n_global
    assert build_model("reports", toy).param_names[-1] == "B"
    assert build_model("hardmoders", toy).param_names[11:] == ["lambda1", "lambda2", "lambda3", "lambda4", "kappa"]


def test_model_data_validation(toy):
    with pytest.raises(ValueError):
        ModelData(toy.X[:2], toy.T, toy.dow, toy.n_reports, toy.n_hardmode, toy.try_counts)
