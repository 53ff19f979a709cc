"""Abnormal-association detection for density pairs.

A pair (g, f) can be outlying even when g and f each look normal on
their own: the association between them breaks the pattern of the
majority.  Such pairs are found by fitting forward (g to f) and reverse
(f to g) regressors on a shrinking training set, diagnosing residuals
for every pair in two complementary metrics, and deleting the flagged
pairs from the training set across a few iterations.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .boxplot import BoxplotParams, boxplot_detect
from .curves import DensityFn, GridCurve, median_of
from .transforms import LqdCurve, clr, inverse_lqd, l2_distance, lqd
from .regression import fit_from_lqd, gcv_select_from_lqd, predict_scores


@dataclass
class RegDetectParams:
    """Settings of the association detector."""

    alpha_mix_lqd: float = 0.3
    alpha_mix_bayes: float = 0.1
    whisker_lqd: float = 1.5
    whisker_bayes: float = 1.5
    theta_lambda: float = 0.01
    theta_h: float = 0.15
    m_fpca: int = 5
    n_iters: int = 4

    def __post_init__(self) -> None:
        if self.n_iters < 1:
            raise ValueError("need at least one iteration")
        if self.theta_lambda < 0 or self.theta_h < 0:
            raise ValueError("thresholds must be nonnegative")


def _mix_on(curve_vals: np.ndarray, alpha: float) -> np.ndarray:
    return (1.0 - alpha) * curve_vals + alpha


def residual_bayes(f_hat: DensityFn, f: DensityFn, theta_h: float,
                   alpha_mix: float) -> float:
    """Compositional residual with optional median alignment.

    When the two medians are within `theta_h`, the observed density is
    translated so the medians coincide, both curves are truncated to
    the common support, mixed toward uniform, and compared through the
    clr chart.  Otherwise (or when the overlap degenerates) the curves
    are compared unaligned on [0, 1].
    """
    med_f, med_fhat = median_of(f), median_of(f_hat)
    shift = med_fhat - med_f
    if abs(shift) <= theta_h:
        c1, c2 = max(0.0, shift), min(1.0, 1.0 + shift)
        if c2 - c1 >= 0.05:
            x = np.linspace(c1, c2, f.n)
            f_vals = f(np.clip(x - shift, 0.0, 1.0))
            fh_vals = f_hat(x)
            a = GridCurve(c1, c2, _mix_on(f_vals, alpha_mix))
            b = GridCurve(c1, c2, _mix_on(fh_vals, alpha_mix))
            return l2_distance(clr(a), clr(b))
        warnings.warn("negligible support overlap after alignment; comparing unaligned")
    a = GridCurve(0.0, 1.0, _mix_on(f.values, alpha_mix))
    b = GridCurve(0.0, 1.0, _mix_on(f_hat.values, alpha_mix))
    return l2_distance(clr(a), clr(b))


def residual_lqd(f_hat: DensityFn, f: DensityFn, alpha_mix: float) -> float:
    """L1 distance of the two log quantile density curves."""
    p1 = lqd(f_hat, alpha_mix)
    p2 = lqd(f, alpha_mix)
    return float(np.trapezoid(np.abs(p1.values - p2.values), p1.grid))


def _directional_flags(psis_x, psis_y, y_pdfs, tr, lam, params) -> tuple[set, np.ndarray, np.ndarray]:
    """One direction of one iteration: fit on `tr`, diagnose all pairs."""
    model = fit_from_lqd([psis_x[i] for i in tr], [psis_y[i] for i in tr],
                         lambda_s=lam, alpha=params.alpha_mix_lqd,
                         m=params.m_fpca)
    values_x = np.array([p.values for p in psis_x])
    scores = predict_scores(model, values_x)
    n = len(psis_x)
    eps_b = np.empty(n)
    eps_l = np.empty(n)
    for i in range(n):
        curve = model.basis.reconstruct(scores[i])
        y_hat = inverse_lqd(LqdCurve(curve.values, model.alpha), model.alpha)
        eps_b[i] = residual_bayes(y_hat, y_pdfs[i], params.theta_h,
                                  params.alpha_mix_bayes)
        eps_l[i] = residual_lqd(y_hat, y_pdfs[i], params.alpha_mix_lqd)
    flags = boxplot_detect(eps_b, BoxplotParams(params.whisker_bayes,
                                                "one_sided_upper"))
    flags |= boxplot_detect(eps_l, BoxplotParams(params.whisker_lqd,
                                                 "one_sided_upper"))
    return flags, eps_b, eps_l


def detect_regression_outliers(pairs, params: RegDetectParams | None = None,
                               first_round_filter: bool = False,
                               return_residuals: bool = False):
    """Flag density pairs with abnormal associations.

    The regularization levels of the two directions are chosen once on
    the raw data and floored at `theta_lambda`.  Each iteration fits
    both directions on the current training set with unit weights,
    diagnoses residuals for every pair, unions the flags of the two
    directions, and removes the flagged pairs from the training set.
    The output is the final iteration's union.
    """
    if params is None:
        params = RegDetectParams()
    pairs = list(pairs)
    n = len(pairs)
    if n < 8:
        raise ValueError("need at least 8 pairs")
    g_pdfs = [p[0] for p in pairs]
    f_pdfs = [p[1] for p in pairs]
    psis_g = [lqd(g, params.alpha_mix_lqd) for g in g_pdfs]
    psis_f = [lqd(f, params.alpha_mix_lqd) for f in f_pdfs]

    tr = list(range(n))
    if first_round_filter:
        from .detect import tree_detect
        single = tree_detect(g_pdfs).flagged | tree_detect(f_pdfs).flagged
        tr = [i for i in tr if i not in single]

    lam_gf = max(gcv_select_from_lqd(psis_g, psis_f, params.m_fpca),
                 params.theta_lambda)
    lam_fg = max(gcv_select_from_lqd(psis_f, psis_g, params.m_fpca),
                 params.theta_lambda)

    flagged: set[int] = set()
    residuals = None
    min_tr = max(params.m_fpca + 2, 8)
    for _ in range(params.n_iters):
        if len(tr) < min_tr:
            warnings.warn("training set collapsed; stopping early")
            break
        fwd, eb_f, el_f = _directional_flags(psis_g, psis_f, f_pdfs, tr,
                                             lam_gf, params)
        rev, eb_g, el_g = _directional_flags(psis_f, psis_g, g_pdfs, tr,
                                             lam_fg, params)
        flagged = fwd | rev
        residuals = {"forward": (eb_f, el_f), "reverse": (eb_g, el_g)}
        tr = [i for i in tr if i not in flagged]
    if return_residuals:
        return flagged, residuals
    return flagged
