import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from wordlediff.features import FEATURE_NAMES, feature_table, GuessDistribution, UsageTable
from wordlediff.lasso import (
    ConstantColumnError,
    DesignMatrix,
    lambda_max,
    lasso_fit,
    objective,
    select_features,
    soft_threshold,
    standardize,
)


def synthetic(seed=20240, n=100, p=8, sigma=0.01):
    rng = np.random.default_rng(seed)
    X = standardize(rng.normal(size=(n, p)))
    y = 2 * X.values[:, 1] - 3 * X.values[:, 3] + sigma * rng.normal(size=n)
    return X, y


def kkt_gap(X, y, fit):
    """Largest violation of the subgradient conditions of sum(r^2) + lam*|b|_1."""
    Xc = X - X.mean(axis=0)
    r = (y - y.mean()) - Xc @ fit.coefficients
    g = 2 * Xc.T @ r
    gap = 0.0
    for j, b in enumerate(fit.coefficients):
        if b == 0:
            gap = max(gap, abs(g[j]) - fit.lam)
        else:
            gap = max(gap, abs(g[j] - fit.lam * np.sign(b)))
    return gap


def test_standardize_examples():
    d = standardize(np.array([[0.0], [2.0]]), ["a"])
    assert d.values[:, 0].tolist() == [-1.0, 1.0]
    again = standardize(d.values, ["a"])
    assert np.allclose(again.values, d.values, atol=1e-12, rtol=0)
    assert np.allclose(d.transform([[4.0]]), [[3.0]])


def test_standardize_errors():
    with pytest.raises(ConstantColumnError, match="'b'"):
        standardize(np.array([[1.0, 3.0], [2.0, 3.0], [5.0, 3.0]]), ["a", "b"])
    with pytest.raises(ValueError):
        standardize(np.array([[1.0, 2.0]]), ["a", "b"])
    with pytest.raises(ValueError):
        DesignMatrix(np.array([[1.0, np.nan]]), ("a", "b"))


def test_standardized_feature_matrix(sgb):
    words = list(sgb.words[::40])
    rows = feature_table(words, sgb, UsageTable.bundled(), GuessDistribution.common(sgb))
    raw = np.array([[float(getattr(r, n)) for n in FEATURE_NAMES] for r in rows])
    d = standardize(raw, FEATURE_NAMES)
    assert np.all(np.abs(d.values.mean(axis=0)) < 1e-10)
    assert np.allclose(d.values.std(axis=0), 1.0)


def test_soft_threshold():
    assert soft_threshold(3, 1) == 2
    assert soft_threshold(-0.5, 1) == 0
    assert soft_threshold(-1.25, 0) == -1.25
    with pytest.raises(ValueError):
        soft_threshold(1, -0.1)


def test_zero_penalty_is_least_squares():
    X, y = synthetic(sigma=0.5)
    fit = lasso_fit(X, y, 0.0)
    A = np.column_stack([np.ones(len(y)), X.values])
    ols = np.linalg.lstsq(A, y, rcond=None)[0]
    assert np.allclose(fit.coefficients, ols[1:], atol=1e-6)
    assert fit.intercept == pytest.approx(ols[0], abs=1e-6)


def test_lambda_max_zeroes_everything():
    X, y = synthetic()
    lm = lambda_max(X.values, y)
    assert lasso_fit(X, y, lm).selected == frozenset()
    assert lasso_fit(X, y, 1.5 * lm).selected == frozenset()
    assert lasso_fit(X, y, 0.99 * lm).selected != frozenset()


def test_sparse_recovery():
    X, y = synthetic()
    fit = lasso_fit(X, y, 0.1)
    assert {1, 3} <= fit.selected
    spurious = np.delete(fit.coefficients, [1, 3])
    assert np.all(np.abs(spurious) < 0.05)
    assert fit.coefficients[1] == pytest.approx(2, abs=0.01)
    assert fit.coefficients[3] == pytest.approx(-3, abs=0.01)
    assert len(fit.selected) == np.count_nonzero(fit.coefficients)


@pytest.mark.parametrize("lam", [0.1, 1.0, 10.0, 100.0, 400.0])
def test_kkt_conditions(lam):
    X, y = synthetic(sigma=0.5)
    fit = lasso_fit(X, y, lam)
    assert kkt_gap(X.values, y, fit) < 1e-6


@settings(max_examples=40)
@given(arrays(float, (30, 5), elements=st.floats(-3, 3)), arrays(float, 30, elements=st.floats(-3, 3)),
       st.floats(0, 50))
def test_kkt_and_monotone_objective_property(raw, y, lam):
    if np.any(raw.std(axis=0) < 1e-3):
        return
    X = standardize(raw)
    fit = lasso_fit(X, y, lam)
    assert all(b <= a + 1e-9 * max(1, abs(a)) for a, b in zip(fit.history, fit.history[1:]))
    assert kkt_gap(X.values, y, fit) < 1e-6
    assert fit.objective == pytest.approx(objective(X.values, y, fit.coefficients, fit.intercept, lam), rel=1e-9, abs=1e-9)


def test_selection_shrinks_as_lambda_grows():
    X, y = synthetic()
    lams = np.concatenate([[0.0], np.geomspace(1e-3, 2 * lambda_max(X.values, y), 60)])
    previous = None
    for lam in lams:
        sel = lasso_fit(X, y, lam).selected
        if previous is not None:
            assert sel <= previous
        previous = sel
    assert previous == frozenset()


def test_select_features_thresholds():
    rng = np.random.default_rng(3)
    X = standardize(rng.normal(size=(60, 5)))
    Y = rng.dirichlet(np.ones(7), size=60)
    sel, fits = select_features(X, Y, lam=0.0, min_hits=1)
    assert len(fits) == 7
    assert sel == set(range(5))
    assert select_features(X, Y, lam=0.0, min_hits=8)[0] == set()
    with pytest.raises(ValueError):
        select_features(X, Y[:, 0], lam=0.1)


def test_select_features_majority_rule():
    X, _ = synthetic()
    x = X.values
    # predictor 1 drives five responses, predictor 3 two, predictor 0 one
    Y = np.column_stack([2 * x[:, 1]] * 4 + [-3 * x[:, 3]] * 2 + [x[:, 0] + x[:, 1]])
    sel, fits = select_features(X, Y, lam=0.1, min_hits=4)
    assert sel == {1}
    assert select_features(X, Y, lam=0.1, min_hits=2)[0] == {1, 3}
    assert select_features(X, Y, lam=0.1, min_hits=1)[0] == {0, 1, 3}
