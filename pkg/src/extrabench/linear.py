"""Linear-family baselines: ordinary least squares, ridge, Bayesian
ridge via evidence maximization, and Huber-robust regression.

Every fit centers features and targets so the intercept is never
penalized, and solves its system by orthogonal decomposition (lstsq or
SVD) rather than explicit inversion.  Penalties weigh against the total
squared residual, matching the convention under which the shipped alpha
defaults were chosen.
"""

from dataclasses import dataclass

import numpy as np

from extrabench.errors import SingularSystemError


@dataclass
class LinearFit:
    weights: np.ndarray
    intercept: float


@dataclass
class HuberFit(LinearFit):
    converged: bool = True
    n_iter_run: int = 0


@dataclass
class BayesRidgeFit(LinearFit):
    noise_precision: float = 0.0
    weight_precision: float = 0.0
    n_iter_run: int = 0


@dataclass(frozen=True)
class RidgeConfig:
    alpha: float = 0.1

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")


@dataclass(frozen=True)
class BayesRidgeConfig:
    max_iter: int = 100
    tol: float = 1e-3
    alpha_1: float = 1e-7
    alpha_2: float = 1e-5
    lambda_1: float = 1e-5
    lambda_2: float = 1e-7

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        for name in ("alpha_1", "alpha_2", "lambda_1", "lambda_2"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")


@dataclass(frozen=True)
class HuberConfig:
    epsilon: float = 1.35
    alpha: float = 0.1
    max_iter: int = 100
    tol: float = 1e-8

    def __post_init__(self):
        if self.epsilon <= 1.0:
            raise ValueError("epsilon must be > 1")
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")


def _as_xy(xs, ys):
    X = np.asarray(xs, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(ys, dtype=np.float64)
    if y.shape != (X.shape[0],):
        raise ValueError("ys must be a vector matching xs rows")
    return X, y


def fit_ols(xs, ys) -> LinearFit:
    """Least-squares line/hyperplane through centered data."""
    X, y = _as_xy(xs, ys)
    n, d = X.shape
    if n < d + 1:
        raise ValueError(f"need at least {d + 1} samples for {d} features")
    x_mean = X.mean(axis=0)
    y_mean = y.mean()
    w, _, rank, _ = np.linalg.lstsq(X - x_mean, y - y_mean, rcond=None)
    if rank < d:
        raise SingularSystemError("design matrix is rank-deficient after centering")
    return LinearFit(weights=w, intercept=float(y_mean - x_mean @ w))


def _ridge_solve(Xc, yc, alpha):
    """Minimize ||yc - Xc w||^2 + alpha ||w||^2 via an augmented lstsq."""
    d = Xc.shape[1]
    if alpha == 0.0:
        w, _, _, _ = np.linalg.lstsq(Xc, yc, rcond=None)
        return w
    A = np.vstack([Xc, np.sqrt(alpha) * np.eye(d)])
    b = np.concatenate([yc, np.zeros(d)])
    w, _, _, _ = np.linalg.lstsq(A, b, rcond=None)
    return w


def fit_ridge(xs, ys, cfg: RidgeConfig) -> LinearFit:
    X, y = _as_xy(xs, ys)
    x_mean = X.mean(axis=0)
    y_mean = y.mean()
    w = _ridge_solve(X - x_mean, y - y_mean, cfg.alpha)
    return LinearFit(weights=w, intercept=float(y_mean - x_mean @ w))


def fit_bayesian_ridge(xs, ys, cfg: BayesRidgeConfig) -> BayesRidgeFit:
    """Evidence maximization for a Gaussian linear model.

    Each iteration solves the ridge system at effective penalty
    lambda/alpha, then re-estimates the noise precision alpha and the
    weight precision lambda from the effective degrees of freedom gamma,
    with Gamma hyperpriors folded into both updates.  Running out of
    iterations is not an error; the last iterate is returned.
    """
    X, y = _as_xy(xs, ys)
    n, d = X.shape
    if n < 2:
        raise ValueError("need at least two samples")
    x_mean = X.mean(axis=0)
    y_mean = y.mean()
    Xc = X - x_mean
    yc = y - y_mean

    eps = np.finfo(np.float64).eps
    alpha = 1.0 / (yc.var() + eps)
    lam = 1.0

    U, S, Vh = np.linalg.svd(Xc, full_matrices=False)
    eigen = S**2
    Xt_y = Xc.T @ yc

    coef = np.zeros(d)
    prev = None
    n_iter = 0
    for it in range(cfg.max_iter):
        n_iter = it + 1
        coef = Vh.T @ ((Vh @ Xt_y) / (eigen + lam / alpha))
        sse = float(((yc - Xc @ coef) ** 2).sum())
        gamma = float(((alpha * eigen) / (lam + alpha * eigen)).sum())
        alpha = (n - gamma + 2.0 * cfg.alpha_1) / (sse + 2.0 * cfg.alpha_2)
        lam = (gamma + 2.0 * cfg.lambda_1) / (float(coef @ coef) + 2.0 * cfg.lambda_2)
        if prev is not None and np.abs(coef - prev).sum() < cfg.tol:
            break
        prev = coef.copy()

    return BayesRidgeFit(
        weights=coef,
        intercept=float(y_mean - x_mean @ coef),
        noise_precision=float(alpha),
        weight_precision=float(lam),
        n_iter_run=n_iter,
    )


def fit_huber(xs, ys, cfg: HuberConfig) -> HuberFit:
    """Robust line fit by iteratively reweighted least squares.

    The loss is r^2 inside the epsilon tube and 2*epsilon*|r| - epsilon^2
    beyond it (residual scale fixed at 1), plus alpha ||w||^2; with all
    residuals inside the tube this is exactly the ridge objective.
    """
    X, y = _as_xy(xs, ys)
    if X.shape[0] < 2:
        raise ValueError("need at least two samples")

    fit = fit_ridge(X, y, RidgeConfig(alpha=cfg.alpha))
    w, b = fit.weights, fit.intercept
    converged = False
    n_iter = 0
    for it in range(cfg.max_iter):
        n_iter = it + 1
        resid = y - (X @ w + b)
        absr = np.abs(resid)
        omega = np.where(absr > cfg.epsilon, cfg.epsilon / np.maximum(absr, 1e-300), 1.0)
        wsum = omega.sum()
        x_mean = (omega @ X) / wsum
        y_mean = float(omega @ y) / wsum
        sq = np.sqrt(omega)
        w_new = _ridge_solve(sq[:, None] * (X - x_mean), sq * (y - y_mean), cfg.alpha)
        b_new = float(y_mean - x_mean @ w_new)
        delta = max(np.abs(w_new - w).max(), abs(b_new - b))
        w, b = w_new, b_new
        if delta < cfg.tol:
            converged = True
            break
    return HuberFit(weights=w, intercept=b, converged=converged, n_iter_run=n_iter)


def predict_linear(fit: LinearFit, xs) -> np.ndarray:
    X = np.asarray(xs, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    return X @ fit.weights + fit.intercept
