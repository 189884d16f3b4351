"""Model-true synthetic data with known parameters."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .links import difficulty_linear, hardmoders_trend, periodic_effect, reports_trend
from .models import ModelData, N_CAT
from .predict import sample_dirichlet

# typical shares per try category, with total concentration 60
_P_BAR = np.array([0.005, 0.06, 0.23, 0.33, 0.24, 0.11, 0.025])


@dataclass(frozen=True)
class TrueParameters:
    a: np.ndarray  # (5, 7)
    sigma: float
    b: np.ndarray
    theta: np.ndarray
    gamma: np.ndarray
    B: float
    c: np.ndarray
    omega: np.ndarray
    lam: np.ndarray
    kappa: float

    def vector(self, model: str) -> np.ndarray:
        """Flattened in the same order as the submodel's parameter names."""
        if model == "try":
            return np.concatenate([self.a.ravel(), [self.sigma]])
        if model == "reports":
            return np.concatenate([self.b, self.theta, self.gamma, [self.B]])
        if model == "hardmoders":
            return np.concatenate([self.c, self.omega, self.lam, [self.kappa]])
        raise KeyError(model)

    def to_dict(self) -> dict:
        return {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in self.__dict__.items()}


def default_truth() -> TrueParameters:
    a = np.zeros((5, N_CAT))
    a[0] = np.log(60 * _P_BAR)
    # easier words shift mass towards early tries
    a[1] = [0.20, 0.15, 0.10, 0.00, -0.10, -0.15, -0.20]
    a[2] = [0.10, 0.10, 0.05, 0.00, -0.05, -0.10, -0.10]
    a[3] = [-0.05, 0.05, 0.10, 0.05, 0.00, -0.05, -0.10]
    a[4] = [0.15, 0.10, 0.05, 0.00, -0.05, -0.10, -0.15]
    return TrueParameters(
        a=a,
        sigma=0.3,
        b=np.array([0.05, 0.10, 0.03, 0.08]),
        theta=np.array([0.05, -0.02, 0.03, 0.00, -0.04, 0.06, -0.03]),
        gamma=np.array([3.0, 0.5, 0.3, 9.5, -0.05]),
        B=50.0,
        c=np.array([-0.05, 0.02, 0.01, 0.03]),
        omega=np.array([0.02, -0.03, 0.01, 0.00, 0.04, -0.02, 0.01]),
        lam=np.array([3.0, 0.5, 0.3, 1.5]),
        kappa=300.0,
    )


def simulate_days(truth: TrueParameters, X, T, dow, rng: np.random.Generator) -> ModelData:
    """Draw reports, then hardmoders and try counts given those reports."""
    X = np.asarray(X, dtype=float)
    T = np.asarray(T, dtype=float)
    dow = np.asarray(dow)
    log_mu = reports_trend(truth.gamma, T) + periodic_effect(truth.theta, dow) + difficulty_linear(truth.b, X)
    mu = np.exp(log_mu)
    n = rng.negative_binomial(truth.B, truth.B / (truth.B + mu))
    x = hardmoders_trend(truth.lam, T) + periodic_effect(truth.omega, dow) + difficulty_linear(truth.c, X)
    p_h = rng.beta(expit(x) * truth.kappa, expit(-x) * truth.kappa)
    n_h = rng.binomial(n, p_h)
    d = difficulty_linear(truth.a, X)
    lnA = d + truth.sigma * rng.standard_normal(d.shape)
    p = sample_dirichlet(np.exp(lnA), rng)
    counts = rng.multinomial(n, p)
    return ModelData(X=X, T=T, dow=dow, n_reports=n, n_hardmode=n_h, try_counts=counts)


def synthetic_design(n_days: int, rng: np.random.Generator, start_dow: int = 1):
    """Standard-normal predictors, evenly spaced T in [0, 1], consecutive weekdays."""
    X = rng.standard_normal((n_days, 4))
    T = np.linspace(0.0, 1.0, n_days)
    dow = (start_dow - 1 + np.arange(n_days)) % 7 + 1
    return X, T, dow
