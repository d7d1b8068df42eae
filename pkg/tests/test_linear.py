import numpy as np
import pytest

from extrabench.dataset import SplitSpec, build_dataset
from extrabench.errors import SingularSystemError
from extrabench.linear import (
    BayesRidgeConfig,
    HuberConfig,
    RidgeConfig,
    fit_bayesian_ridge,
    fit_huber,
    fit_ols,
    fit_ridge,
    predict_linear,
)


def _ridge_normal_equations(X, y, alpha):
    """Independent closed-form oracle: centered penalized normal equations."""
    xm, ym = X.mean(axis=0), y.mean()
    Xc, yc = X - xm, y - ym
    d = X.shape[1]
    w = np.linalg.solve(Xc.T @ Xc + alpha * np.eye(d), Xc.T @ yc)
    return w, float(ym - xm @ w)


@pytest.fixture(scope="module")
def study_train():
    data = build_dataset(SplitSpec())
    return data.train.xs, data.train.ys


class TestOls:
    def test_two_points_define_the_line(self):
        fit = fit_ols(np.array([[0.0], [1.0]]), np.array([1.0, 3.0]))
        assert fit.intercept == pytest.approx(1.0, abs=1e-12)
        assert fit.weights[0] == pytest.approx(2.0, abs=1e-12)

    def test_constant_target(self):
        fit = fit_ols(np.array([[0.0], [1.0], [2.0]]), np.full(3, 5.0))
        assert fit.weights[0] == pytest.approx(0.0, abs=1e-12)
        assert fit.intercept == pytest.approx(5.0, abs=1e-12)

    def test_study_extrapolation_error(self, study_train):
        X, y = study_train
        fit = fit_ols(X, y)
        xs_test = np.linspace(0.7, 1.0, 301)[:, None]
        resid = np.exp(xs_test.ravel() ** 2 + xs_test.ravel()) - predict_linear(fit, xs_test)
        # cross-check against the normal-equations oracle as well
        w, b = _ridge_normal_equations(X, y, 0.0)
        assert fit.weights[0] == pytest.approx(w[0], rel=1e-10)
        assert fit.intercept == pytest.approx(b, rel=1e-10)
        assert np.abs(resid).max() == pytest.approx(3.6, abs=0.15)

    def test_rank_deficient_raises(self):
        X = np.ones((5, 1))  # constant column centers to zero
        with pytest.raises(SingularSystemError):
            fit_ols(X, np.arange(5.0))

    def test_too_few_samples(self):
        with pytest.raises(ValueError):
            fit_ols(np.array([[1.0]]), np.array([2.0]))

    def test_residual_orthogonality(self, study_train):
        X, y = study_train
        fit = fit_ols(X, y)
        r = y - predict_linear(fit, X)
        scale = 1e-8 * len(y) * max(1.0, np.abs(y).max())
        assert abs(r.sum()) < scale
        assert abs((r * X[:, 0]).sum()) < scale


class TestRidge:
    def test_alpha_zero_equals_ols(self, study_train):
        X, y = study_train
        a = fit_ridge(X, y, RidgeConfig(alpha=0.0))
        b = fit_ols(X, y)
        assert abs(a.weights[0] - b.weights[0]) < 1e-10
        assert abs(a.intercept - b.intercept) < 1e-10

    def test_infinite_shrinkage_leaves_mean(self):
        fit = fit_ridge(np.array([[0.0], [1.0]]), np.array([0.0, 1.0]), RidgeConfig(alpha=1e12))
        assert fit.weights[0] == pytest.approx(0.0, abs=1e-9)
        assert fit.intercept == pytest.approx(0.5, abs=1e-9)

    def test_against_normal_equations_oracle(self, study_train):
        X, y = study_train
        fit = fit_ridge(X, y, RidgeConfig(alpha=0.1))
        w, b = _ridge_normal_equations(X, y, 0.1)
        assert fit.weights[0] == pytest.approx(w[0], abs=1e-6)
        assert fit.intercept == pytest.approx(b, abs=1e-6)

    def test_monotone_shrinkage(self, study_train):
        X, y = study_train
        norms = [
            np.linalg.norm(fit_ridge(X, y, RidgeConfig(alpha=a)).weights)
            for a in (0.0, 0.1, 1.0, 10.0, 100.0)
        ]
        assert all(n2 <= n1 + 1e-12 for n1, n2 in zip(norms, norms[1:]))


class TestBayesianRidge:
    def test_noiseless_line_recovers_slope(self):
        x = np.linspace(0, 1, 100)
        fit = fit_bayesian_ridge(x[:, None], 2.0 * x, BayesRidgeConfig())
        assert fit.weights[0] == pytest.approx(2.0, abs=1e-3)
        assert fit.n_iter_run <= 100

    def test_single_frozen_step_matches_ridge(self, study_train):
        X, y = study_train
        fit = fit_bayesian_ridge(X, y, BayesRidgeConfig(max_iter=1))
        # one iteration solves the ridge system at the initial penalty
        # ratio lambda/alpha = var(y) + eps
        alpha0 = 1.0 / (np.var(y - y.mean()) + np.finfo(np.float64).eps)
        ridge = fit_ridge(X, y, RidgeConfig(alpha=1.0 / alpha0))
        assert fit.weights[0] == pytest.approx(ridge.weights[0], abs=1e-10)
        assert fit.intercept == pytest.approx(ridge.intercept, abs=1e-10)
        assert fit.n_iter_run == 1

    def test_constant_target(self):
        x = np.linspace(0, 1, 50)
        fit = fit_bayesian_ridge(x[:, None], np.full(50, 2.5), BayesRidgeConfig())
        assert fit.weights[0] == pytest.approx(0.0, abs=1e-8)
        assert fit.intercept == pytest.approx(2.5, abs=1e-12)

    def test_precisions_positive(self, study_train):
        X, y = study_train
        fit = fit_bayesian_ridge(X, y, BayesRidgeConfig())
        assert fit.noise_precision > 0
        assert fit.weight_precision > 0


class TestHuber:
    def test_perfect_line_zero_loss(self):
        x = np.linspace(0, 2, 20)
        fit = fit_huber(x[:, None], 3.0 * x - 1.0, HuberConfig(alpha=0.0))
        assert fit.converged
        assert fit.weights[0] == pytest.approx(3.0, abs=1e-9)
        assert fit.intercept == pytest.approx(-1.0, abs=1e-9)

    def test_huge_epsilon_equals_ols(self, study_train):
        X, y = study_train
        fit = fit_huber(X, y, HuberConfig(epsilon=1e6, alpha=0.0))
        ols = fit_ols(X, y)
        assert fit.weights[0] == pytest.approx(ols.weights[0], abs=1e-6)
        assert fit.intercept == pytest.approx(ols.intercept, abs=1e-6)

    def test_outlier_robustness(self):
        rng = np.random.default_rng(11)
        x = np.linspace(0, 1, 50)
        y = x.copy()
        y[25] += 50.0  # one gross outlier
        hub = fit_huber(x[:, None], y, HuberConfig(epsilon=1.35, alpha=0.0))
        ols = fit_ols(x[:, None], y)
        assert abs(hub.weights[0] - 1.0) < abs(ols.weights[0] - 1.0)

    def test_all_inside_tube_equals_ridge(self, study_train):
        X, y = study_train
        # study residuals peak around 0.45, inside the 1.35 tube
        hub = fit_huber(X, y, HuberConfig(epsilon=1.35, alpha=0.1))
        ridge = fit_ridge(X, y, RidgeConfig(alpha=0.1))
        assert hub.converged
        assert hub.weights[0] == pytest.approx(ridge.weights[0], abs=1e-6)
        assert hub.intercept == pytest.approx(ridge.intercept, abs=1e-6)


class TestPredict:
    def test_point_values(self):
        from extrabench.linear import LinearFit

        fit = LinearFit(weights=np.array([2.0]), intercept=1.0)
        assert predict_linear(fit, np.array([[0.0]]))[0] == 1.0
        assert predict_linear(fit, np.array([[3.0]]))[0] == 7.0

    def test_affine_second_differences_vanish(self, study_train):
        X, y = study_train
        grid = np.linspace(-5, 5, 101)[:, None]
        for fit in (
            fit_ols(X, y),
            fit_ridge(X, y, RidgeConfig()),
            fit_bayesian_ridge(X, y, BayesRidgeConfig()),
            fit_huber(X, y, HuberConfig()),
        ):
            pred = predict_linear(fit, grid)
            second = np.diff(pred, n=2)
            assert np.abs(second).max() < 1e-9
