"""Lasso regression by cyclic coordinate descent, and the 7-way predictor
screen built on it.

The objective is the unnormalized one,

    sum_i (y_i - sum_j x_ij b_j)^2 + lam * sum_j |b_j|,

so `lam` is not divided by the sample size and there is no 1/2 on the
squared error.  With that scaling a coefficient is zero at the optimum
iff |2 x_j . r| <= lam, and the smallest penalty giving the all-zero
solution is 2 * max_j |x_j . (y - mean y)|.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


class ConstantColumnError(ValueError):
    pass


class LassoConvergenceError(RuntimeError):
    def __init__(self, message: str, objective: float):
        super().__init__(f"{message} (final objective {objective:.6g})")
        self.objective = objective


@dataclass(frozen=True)
class DesignMatrix:
    values: np.ndarray
    names: tuple[str, ...]
    mean: np.ndarray | None = None
    std: np.ndarray | None = None

    def __post_init__(self):
        if self.values.ndim != 2 or self.values.shape[1] != len(self.names):
            raise ValueError("design matrix must be 2-D with one name per column")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("design matrix has missing or non-finite cells")

    @property
    def standardized(self) -> bool:
        return self.mean is not None

    def transform(self, raw: np.ndarray) -> np.ndarray:
        """Apply the stored standardization to new raw rows."""
        return (np.asarray(raw, dtype=float) - self.mean) / self.std


def standardize(X: DesignMatrix | np.ndarray, names: Sequence[str] | None = None) -> DesignMatrix:
    """Zero-mean, unit (population) variance columns; stats kept for reuse."""
    if not isinstance(X, DesignMatrix):
        values = np.asarray(X, dtype=float)
        X = DesignMatrix(values, tuple(names or (f"x{j}" for j in range(values.shape[1]))))
    values = X.values
    if values.shape[0] < 2:
        raise ValueError("standardizing needs at least 2 rows")
    mean = values.mean(axis=0)
    std = values.std(axis=0)
    for j, s in enumerate(std):
        if not s > 1e-12 * max(1.0, abs(mean[j])):
            raise ConstantColumnError(f"column {X.names[j]!r} is constant")
    return DesignMatrix((values - mean) / std, X.names, mean, std)


def soft_threshold(z: float, t: float) -> float:
    if t < 0:
        raise ValueError("threshold must be non-negative")
    return float(np.sign(z) * max(abs(z) - t, 0.0))


@dataclass(frozen=True)
class LassoResult:
    coefficients: np.ndarray
    intercept: float
    lam: float
    selected: frozenset[int]
    sweeps: int
    objective: float
    history: tuple[float, ...] = field(repr=False, default=())


def objective(X: np.ndarray, y: np.ndarray, coef: np.ndarray, intercept: float, lam: float) -> float:
    r = y - intercept - X @ coef
    return float(r @ r + lam * np.abs(coef).sum())


def lambda_max(X: np.ndarray, y: np.ndarray) -> float:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    return float(2 * np.max(np.abs(X.T @ (y - y.mean()))))


def lasso_fit(X: DesignMatrix | np.ndarray, y: np.ndarray, lam: float,
              tol: float = 1e-8, max_sweeps: int = 10_000) -> LassoResult:
    """Minimize the unnormalized lasso objective.

    Columns and `y` are centered internally, so the intercept is never
    penalized; X is expected to be standardized already.
    """
    Xv = X.values if isinstance(X, DesignMatrix) else np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    n, p = Xv.shape
    x_mean = Xv.mean(axis=0)
    Xv = Xv - x_mean
    yc = y - y.mean()
    col_sq = (Xv**2).sum(axis=0)
    coef = np.zeros(p)
    r = yc.copy()
    history = [float(r @ r)]
    for sweep in range(1, max_sweeps + 1):
        max_change = 0.0
        for j in range(p):
            old = coef[j]
            rho = Xv[:, j] @ r + col_sq[j] * old
            new = np.sign(rho) * max(abs(rho) - lam / 2, 0.0) / col_sq[j]
            if new != old:
                r -= Xv[:, j] * (new - old)
                coef[j] = new
                max_change = max(max_change, abs(new - old))
        obj = float(r @ r + lam * np.abs(coef).sum())
        if obj > history[-1] + 1e-9 * max(1.0, abs(history[-1])):
            raise LassoConvergenceError(f"objective increased at sweep {sweep}", obj)
        history.append(obj)
        if max_change < tol:
            break
    else:
        raise LassoConvergenceError(f"no convergence in {max_sweeps} sweeps", history[-1])
    selected = frozenset(int(j) for j in np.flatnonzero(coef))
    intercept = float(y.mean() - x_mean @ coef)
    return LassoResult(coef, intercept, lam, selected, sweep, history[-1], tuple(history))


def select_features(X: DesignMatrix | np.ndarray, Y: np.ndarray, lam: float = 0.1,
                    min_hits: int = 4) -> tuple[set[int], list[LassoResult]]:
    """Predictors nonzero in at least `min_hits` of the per-category fits.

    `Y` has one column per try category (7 for Wordle).
    """
    Y = np.asarray(Y, dtype=float)
    if Y.ndim != 2:
        raise ValueError("Y must be 2-D (rows x categories)")
    fits = [lasso_fit(X, Y[:, k], lam) for k in range(Y.shape[1])]
    n_pred = fits[0].coefficients.size
    hits = np.zeros(n_pred, dtype=int)
    for f in fits:
        hits[list(f.selected)] += 1
    return {int(j) for j in np.flatnonzero(hits >= min_hits)}, fits
