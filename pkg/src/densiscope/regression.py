"""Distribution-to-distribution regression in the log-quantile-density domain.

Predictor and response densities are mapped to log quantile density
curves; the responses are compressed to principal-component scores; a
Gaussian kernel over the predictor curves then drives a weighted
regularized least-squares fit of the score matrix.  Per-pair weights
let the fit downweight training pairs flagged as outliers.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .boxplot import mad as mad_of
from .curves import DensityFn, GridCurve
from .transforms import LqdCurve, inverse_lqd, lqd

DEFAULT_LAMBDA_GRID = np.logspace(-4.0, 1.0, 30)

PINV_RCOND = 1e-10


@dataclass
class FpcaBasis:
    """Principal components of a curve sample under the trapezoid metric."""

    mean: GridCurve
    eigenfunctions: list[GridCurve]
    eigenvalues: np.ndarray
    m: int

    def scores(self, curves_values: np.ndarray) -> np.ndarray:
        """Project rows of a (n, N) value array onto the basis."""
        grid = self.mean.grid
        centered = curves_values - self.mean.values
        phi = np.array([p.values for p in self.eigenfunctions])
        return np.trapezoid(centered[:, None, :] * phi[None, :, :], grid, axis=2)

    def reconstruct(self, score_row: np.ndarray) -> GridCurve:
        vals = self.mean.values.copy()
        for xi, phi in zip(score_row, self.eigenfunctions):
            vals += xi * phi.values
        return self.mean.with_values(vals)


def fpca(curves, m: int) -> tuple[FpcaBasis, np.ndarray]:
    """Quadrature-weighted principal component analysis of grid curves.

    The covariance eigenproblem is symmetrized with the square roots of
    the trapezoid weights so the recovered eigenfunctions are
    orthonormal under the trapezoid inner product.
    """
    curves = list(curves)
    n = len(curves)
    if not n > m >= 1:
        raise ValueError("need n > m >= 1")
    grid = curves[0].grid
    X = np.array([c.values for c in curves])
    mu = X.mean(axis=0)
    Xc = X - mu
    w = np.gradient(grid)
    w[0] *= 0.5
    w[-1] *= 0.5
    sqw = np.sqrt(w)
    C = (Xc.T @ Xc) / n
    sym = sqw[:, None] * C * sqw[None, :]
    evals, evecs = np.linalg.eigh(sym)
    order = np.argsort(evals)[::-1][:m]
    evals = np.clip(evals[order], 0.0, None)
    phi = evecs[:, order] / sqw[:, None]
    mean_curve = curves[0].with_values(mu)
    eigenfunctions = [curves[0].with_values(phi[:, k]) for k in range(m)]
    basis = FpcaBasis(mean_curve, eigenfunctions, evals, m)
    return basis, basis.scores(X)


def _trapezoid_weights(grid: np.ndarray) -> np.ndarray:
    w = np.gradient(grid)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def _pairwise_l2(values: np.ndarray, grid: np.ndarray,
                 other: np.ndarray | None = None) -> np.ndarray:
    """L2 distance matrix between rows of two (n, N) value arrays."""
    w = _trapezoid_weights(grid)
    a = values * np.sqrt(w)
    b = a if other is None else other * np.sqrt(w)
    sq = (np.sum(a ** 2, axis=1)[:, None] + np.sum(b ** 2, axis=1)[None, :]
          - 2.0 * a @ b.T)
    return np.sqrt(np.clip(sq, 0.0, None))


def sigma_heuristic(psis) -> float:
    """Kernel bandwidth: mean pairwise L2 distance over all ordered pairs."""
    psis = list(psis)
    if len(psis) < 2:
        raise ValueError("need at least 2 curves")
    values = np.array([p.values for p in psis])
    dists = _pairwise_l2(values, psis[0].grid)
    sigma = float(dists.mean())
    if sigma < 1e-12:
        raise ValueError("identical training curves: degenerate bandwidth")
    return sigma


def _gram(values: np.ndarray, grid: np.ndarray, sigma: float,
          other: np.ndarray | None = None) -> np.ndarray:
    d = _pairwise_l2(values, grid, other)
    return np.exp(-d ** 2 / (2.0 * sigma ** 2))


@dataclass
class WeightVector:
    """Final per-pair weights with their two constituent factors."""

    w: np.ndarray
    w_typeI: np.ndarray
    w_typeII: np.ndarray
    rho1: float
    rho2: float

    @classmethod
    def ones(cls, n: int) -> "WeightVector":
        return cls(np.ones(n), np.ones(n), np.ones(n), 0.0, 0.0)


@dataclass
class RegressionModel:
    """A fitted regressor; immutable once constructed."""

    psi_g_values: np.ndarray      # (n, N) training predictor curves
    grid: np.ndarray
    B: np.ndarray                 # (n, m)
    K: np.ndarray                 # (m, m)
    A: np.ndarray                 # (n, n)
    sigma: float
    lambda_s: float
    weights: np.ndarray
    alpha: float
    basis: FpcaBasis

    def to_dict(self) -> dict:
        return {
            "grid": self.grid.tolist(),
            "psi_g_values": self.psi_g_values.tolist(),
            "B": self.B.tolist(),
            "K": self.K.tolist(),
            "A": self.A.tolist(),
            "sigma": self.sigma,
            "lambda_s": self.lambda_s,
            "weights": self.weights.tolist(),
            "alpha": self.alpha,
            "fpca_mean": self.basis.mean.values.tolist(),
            "fpca_eigenfunctions": [p.values.tolist()
                                    for p in self.basis.eigenfunctions],
            "fpca_eigenvalues": self.basis.eigenvalues.tolist(),
            "m": self.basis.m,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RegressionModel":
        mean = GridCurve(0.0, 1.0, np.asarray(d["fpca_mean"]))
        basis = FpcaBasis(
            mean=mean,
            eigenfunctions=[mean.with_values(np.asarray(v))
                            for v in d["fpca_eigenfunctions"]],
            eigenvalues=np.asarray(d["fpca_eigenvalues"]),
            m=int(d["m"]),
        )
        return cls(
            psi_g_values=np.asarray(d["psi_g_values"]),
            grid=np.asarray(d["grid"]),
            B=np.asarray(d["B"]),
            K=np.asarray(d["K"]),
            A=np.asarray(d["A"]),
            sigma=float(d["sigma"]),
            lambda_s=float(d["lambda_s"]),
            weights=np.asarray(d["weights"]),
            alpha=float(d["alpha"]),
            basis=basis,
        )


def solve_coefficients(A: np.ndarray, Y: np.ndarray, w: np.ndarray,
                       lambda_s: float, K: np.ndarray | None = None,
                       force_general: bool = False) -> np.ndarray:
    """Solve the weighted regularized least squares for B.

    The general path solves the Kronecker system with a pseudoinverse.
    When K is the identity the system decouples into one n-by-n solve
    per score column, which is used unless `force_general`.
    """
    n, m = Y.shape
    W = np.diag(np.asarray(w, dtype=float))
    if K is None:
        K = np.eye(m)
    K = np.asarray(K, dtype=float)
    identity_k = np.allclose(K, np.eye(m), atol=0.0)
    if identity_k and not force_general:
        lhs = A @ W @ W @ A + lambda_s * A
        rhs = A @ W @ W @ Y
        return np.linalg.pinv(lhs, rcond=PINV_RCOND) @ rhs
    C1 = np.kron(K, A @ W)
    C2 = np.kron(K, W @ A)
    lhs = C1 @ C2 + lambda_s * np.kron(K, A)
    rhs = C1 @ (W @ Y).flatten(order="F")
    vec_b = np.linalg.pinv(lhs, rcond=PINV_RCOND) @ rhs
    return vec_b.reshape((n, m), order="F")


def objective(A, Y, B, w, lambda_s, K=None) -> float:
    """The penalized weighted least-squares objective at B."""
    m = Y.shape[1]
    if K is None:
        K = np.eye(m)
    W = np.diag(np.asarray(w, dtype=float))
    resid = W @ (Y - A @ B @ K)
    return float(np.sum(resid ** 2) + lambda_s * np.trace(A @ B @ K @ B.T))


def fit(g_pdfs, f_pdfs, lambda_s: float, alpha: float = 0.3, m: int = 5,
        weights: WeightVector | np.ndarray | None = None,
        K: np.ndarray | None = None) -> RegressionModel:
    """Fit the regressor on density pairs."""
    g_pdfs, f_pdfs = list(g_pdfs), list(f_pdfs)
    if len(g_pdfs) != len(f_pdfs):
        raise ValueError("predictor and response counts differ")
    n = len(g_pdfs)
    if lambda_s < 0:
        raise ValueError("lambda_s must be nonnegative")
    psis_g = [lqd(g, alpha) for g in g_pdfs]
    psis_f = [lqd(f, alpha) for f in f_pdfs]
    return fit_from_lqd(psis_g, psis_f, lambda_s, alpha, m, weights, K)


def fit_from_lqd(psis_g, psis_f, lambda_s: float, alpha: float, m: int,
                 weights=None, K: np.ndarray | None = None) -> RegressionModel:
    """Fit from precomputed log quantile density curves."""
    psis_g, psis_f = list(psis_g), list(psis_f)
    n = len(psis_g)
    if weights is None:
        w = np.ones(n)
    elif isinstance(weights, WeightVector):
        w = weights.w
    else:
        w = np.asarray(weights, dtype=float)
    eff_m = min(m, n - 1) if n > 1 else 1
    if n == 1:
        # single-pair corner: the mean absorbs the lone response, so the
        # single score is 0 and shrinkage pulls predictions to that curve
        basis = FpcaBasis(psis_f[0],
                          [psis_f[0].with_values(np.ones(psis_f[0].n))],
                          np.array([0.0]), 1)
        Y = np.array([[0.0]])
        A = np.array([[1.0]])
        sigma = 1.0
    else:
        basis, Y = fpca(psis_f, eff_m)
        sigma = sigma_heuristic(psis_g)
        values_g = np.array([p.values for p in psis_g])
        A = _gram(values_g, psis_g[0].grid, sigma)
    B = solve_coefficients(A, Y, w, lambda_s, K)
    return RegressionModel(
        psi_g_values=np.array([p.values for p in psis_g]),
        grid=psis_g[0].grid,
        B=B,
        K=np.eye(Y.shape[1]) if K is None else np.asarray(K, dtype=float),
        A=A,
        sigma=sigma,
        lambda_s=lambda_s,
        weights=w,
        alpha=alpha,
        basis=basis,
    )


def predict_scores(model: RegressionModel, psi0_values: np.ndarray) -> np.ndarray:
    """Predicted response score rows for (k, N) new predictor curves."""
    a0 = _gram(np.atleast_2d(psi0_values), model.grid, model.sigma,
               model.psi_g_values)
    return a0 @ model.B @ model.K


def predict(model: RegressionModel, g0: DensityFn) -> DensityFn:
    """Predict the response density for a new predictor density."""
    psi0 = lqd(g0, model.alpha)
    scores = predict_scores(model, psi0.values)[0]
    curve = model.basis.reconstruct(scores)
    return inverse_lqd(LqdCurve(curve.values, model.alpha), model.alpha)


def predict_lqd(model: RegressionModel, psi0: LqdCurve) -> DensityFn:
    """Predict from an already transformed predictor curve."""
    scores = predict_scores(model, psi0.values)[0]
    curve = model.basis.reconstruct(scores)
    return inverse_lqd(LqdCurve(curve.values, model.alpha), model.alpha)


def gcv_select(g_pdfs, f_pdfs, alpha: float = 0.3, m: int = 5,
               lambda_grid=None, K: np.ndarray | None = None) -> float:
    """Regularization choice by generalized cross-validation on a grid."""
    psis_g = [lqd(g, alpha) for g in g_pdfs]
    psis_f = [lqd(f, alpha) for f in f_pdfs]
    return gcv_select_from_lqd(psis_g, psis_f, m, lambda_grid, K)


def gcv_select_from_lqd(psis_g, psis_f, m: int = 5, lambda_grid=None,
                        K: np.ndarray | None = None) -> float:
    if lambda_grid is None:
        lambda_grid = DEFAULT_LAMBDA_GRID
    lambda_grid = np.asarray(lambda_grid, dtype=float)
    if lambda_grid.size == 0:
        raise ValueError("empty regularization grid")
    n = len(psis_g)
    eff_m = min(m, n - 1) if n > 1 else 1
    if n == 1:
        return float(np.min(lambda_grid))
    _, Y = fpca(psis_f, eff_m)
    values_g = np.array([p.values for p in psis_g])
    sigma = sigma_heuristic(psis_g)
    A = _gram(values_g, psis_g[0].grid, sigma)
    if K is None:
        K = np.eye(eff_m)
    sa, Va = np.linalg.eigh(A)
    sk, Vk = np.linalg.eigh(np.asarray(K, dtype=float))
    s = np.kron(sk, sa)
    c = (Va.T @ Y @ Vk).flatten(order="F")
    best_lambda, best_val = None, np.inf
    for lam in np.sort(lambda_grid):
        shrink = lam / (s + lam)
        num = np.sum((shrink * c) ** 2) / n
        den = (np.sum(shrink) / n) ** 2
        val = num / den
        if val < best_val - 1e-15:
            best_val, best_lambda = val, float(lam)
    return best_lambda


def _decay_factor(x: np.ndarray, rho: float) -> np.ndarray:
    med = np.median(x)
    scale = mad_of(x)
    if scale < 1e-12:
        warnings.warn("degenerate spread in weight statistic; factor set to 1")
        return np.ones_like(x)
    return (1.0 + np.abs(x - med) / scale) ** (-rho)


def _typeI_side(deltas: np.ndarray, sigmas: np.ndarray, flags,
                rho1: float) -> np.ndarray:
    w = np.ones(deltas.size)
    flags = sorted(flags)
    if not flags:
        return w
    fd = _decay_factor(deltas, rho1)
    fs = _decay_factor(sigmas, rho1)
    for i in flags:
        w[i] = fd[i] * fs[i]
    return w


def _minmax(x: np.ndarray) -> np.ndarray:
    lo, hi = np.min(x), np.max(x)
    if hi - lo < 1e-300:
        return np.zeros_like(x)
    return (x - lo) / (hi - lo)


def design_weights(n: int, typeI_flags_g, typeI_flags_f,
                   typeI_stats_g, typeI_stats_f,
                   typeII_flags, typeII_residuals,
                   rho1: float, rho2: float) -> WeightVector:
    """Per-pair weights from two detection stages.

    `typeI_stats_*` are (delta, sigma) column pairs: per-curve L1
    distance of the log quantile density curve to the cross-sectional
    median curve, and L2 distance of the clr curve to its median curve.
    `typeII_residuals` are per-pair (bayes, lqd) residual columns from
    the association detector; they are averaged after min-max
    normalization.  Unflagged pairs keep weight exactly 1.
    """
    if rho1 < 0 or rho2 < 0:
        raise ValueError("decay parameters must be nonnegative")
    dg, sg = np.asarray(typeI_stats_g, dtype=float).T.reshape(2, -1)
    df, sf = np.asarray(typeI_stats_f, dtype=float).T.reshape(2, -1)
    w1 = _typeI_side(dg, sg, typeI_flags_g, rho1) \
        * _typeI_side(df, sf, typeI_flags_f, rho1)
    w2 = np.ones(n)
    typeII_flags = sorted(typeII_flags)
    if typeII_flags:
        eb, el = np.asarray(typeII_residuals, dtype=float).T.reshape(2, -1)
        eps = (_minmax(eb) + _minmax(el)) / 2.0
        factor = _decay_factor(eps, rho2)
        for i in typeII_flags:
            w2[i] = factor[i]
    w = w1 * w2
    return WeightVector(w=w, w_typeI=w1, w_typeII=w2, rho1=rho1, rho2=rho2)
