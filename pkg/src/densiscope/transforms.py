"""Feature maps for density-valued data.

The maps implemented here turn densities into unconstrained Hilbert-space
curves: the log-quantile-density map and its normalized variant, the
centered log-ratio chart (after horizontal centralization onto a common
support), plain differentiation, and the warping/phase representation of
CDF pairs.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .curves import (
    CdfFn,
    DensityFn,
    GridCurve,
    QuantileFn,
    cdf_and_quantile,
    clear_uniform,
    mean_of,
    median_of,
    mix_uniform,
    mode_of,
)

#: guard on the normalization denominator of nlqd
NLQD_DEN_TOL = 1e-8

#: clamp applied before exponentiating a log-quantile-density curve
LQD_CLAMP = 30.0

FEATURE_POINTS = ("median", "mode", "mean", "avg_median_mode")


class LqdCurve(GridCurve):
    """Log quantile density curve on the probability grid [0, 1]."""

    def __init__(self, values, alpha: float) -> None:
        super().__init__(0.0, 1.0, values)
        self.alpha = float(alpha)


class ClrCurve(GridCurve):
    """Centered log-ratio curve; integrates to zero over its support."""


def lqd(f: DensityFn, alpha: float) -> LqdCurve:
    """psi(t) = -log f*(Q*(t)) for f* = (1 - alpha) f + alpha.

    Equivalently the log of the quantile density of the mixed density.
    Any alpha > 0 bounds f* away from zero, so psi is finite.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    f_star = mix_uniform(f, alpha)
    _, q = cdf_and_quantile(f, alpha)
    vals_at_q = np.interp(q.values, f_star.grid, f_star.values)
    return LqdCurve(-np.log(vals_at_q), alpha)


def nlqd(psi: LqdCurve) -> LqdCurve:
    """psi / integral(psi); raises when the denominator is near zero."""
    den = np.trapezoid(psi.values, psi.grid)
    if abs(den) < NLQD_DEN_TOL:
        raise ValueError("near-uniform density: nlqd denominator is degenerate")
    return LqdCurve(psi.values / den, psi.alpha)


def inverse_lqd(psi: LqdCurve, alpha: float) -> DensityFn:
    """Reconstruct the density whose log quantile density is `psi`.

    The quantile function is recovered by integrating exp(psi) and
    rescaling affinely onto [0, 1]; the mixed density at Q(t) is
    exp(-psi(t)); the uniform admixture is then cleared at ratio `alpha`.
    """
    vals = psi.values
    if np.any(np.abs(vals) > LQD_CLAMP):
        warnings.warn("clamping log quantile density to +/-30 before exponentiation")
        vals = np.clip(vals, -LQD_CLAMP, LQD_CLAMP)
    t = psi.grid
    q_density = np.exp(vals)
    steps = 0.5 * (q_density[1:] + q_density[:-1]) * np.diff(t)
    quantile = np.concatenate(([0.0], np.cumsum(steps)))
    quantile /= quantile[-1]
    f_at_q = np.exp(-vals)
    x = np.linspace(0.0, 1.0, psi.n)
    f_vals = np.interp(x, quantile, f_at_q)
    f_vals /= np.trapezoid(f_vals, x)
    mixed = DensityFn(0.0, 1.0, f_vals)
    if alpha == 0.0:
        return mixed
    return clear_uniform(mixed, alpha)


def _feature_point(f: DensityFn, feature: str) -> float:
    if feature == "median":
        return median_of(f)
    if feature == "mode":
        return mode_of(f)
    if feature == "mean":
        return mean_of(f)
    if feature == "avg_median_mode":
        return 0.5 * (median_of(f) + mode_of(f))
    raise ValueError(f"unknown feature point {feature!r}")


def h_centralize(fs, feature: str = "median",
                 min_width: float = 0.05) -> tuple[list[GridCurve], tuple[float, float]]:
    """Translate densities so their feature points coincide; truncate.

    Each density is shifted so its feature point lands on the pooled
    median of the feature points, then truncated to the common support
    and re-gridded there.  Outputs are deliberately NOT renormalized:
    proportional curves are identified in the downstream compositional
    geometry.
    """
    fs = list(fs)
    if not fs:
        raise ValueError("need at least one density")
    points = np.array([_feature_point(f, feature) for f in fs])
    target = float(np.median(points))
    shifts = target - points
    # shifted support of curve i is [start + shift, end + shift]
    u = max(f.domain_start + s for f, s in zip(fs, shifts))
    v = min(f.domain_end + s for f, s in zip(fs, shifts))
    if v - u < min_width:
        raise ValueError(f"common support [{u:.3f}, {v:.3f}] is too narrow")
    n = fs[0].n
    x = np.linspace(u, v, n)
    out = []
    for f, s in zip(fs, shifts):
        out.append(GridCurve(u, v, f(np.clip(x - s, f.domain_start, f.domain_end))))
    return out, (u, v)


def clr(curve: GridCurve) -> ClrCurve:
    """Centered log-ratio: log f minus its domain-mean log."""
    if np.any(curve.values <= 0.0):
        raise ValueError("clr needs strictly positive values; preprocess first")
    logs = np.log(curve.values)
    eta = curve.domain_end - curve.domain_start
    centered = logs - np.trapezoid(logs, curve.grid) / eta
    return ClrCurve(curve.domain_start, curve.domain_end, centered)


def clr_batch(curves, alpha_rule: float = 0.1) -> list[ClrCurve]:
    """clr of a batch, with the shared uniform-mix preprocessing rule.

    When the minimum value over the whole batch is below 0.1, every
    curve is first mixed as (1 - alpha) f + alpha with alpha=`alpha_rule`.
    """
    curves = list(curves)
    batch_min = min(float(np.min(c.values)) for c in curves)
    if batch_min < 0.1:
        curves = [c.with_values((1.0 - alpha_rule) * c.values + alpha_rule)
                  for c in curves]
    return [clr(c) for c in curves]


def l2_distance(a: GridCurve, b: GridCurve) -> float:
    if (a.domain_start, a.domain_end, a.n) != (b.domain_start, b.domain_end, b.n):
        raise ValueError("curves live on different grids")
    return float(np.sqrt(np.trapezoid((a.values - b.values) ** 2, a.grid)))


def bayes_distance(f: GridCurve, g: GridCurve) -> float:
    """Distance in the compositional (quotient) geometry via the clr chart."""
    return l2_distance(clr(f), clr(g))


@dataclass
class WarpResult:
    """Pairwise warping of two CDFs with its phase summary."""

    gamma: GridCurve        # warp on [0, 1], monotone, fixed endpoints
    srsf: GridCurve         # square-root slope of the warp
    phase_distance: float   # arccos of <1, srsf>, in [0, pi/2]
    alpha_used: float


def phase_distance(f1: DensityFn, f2: DensityFn,
                   alpha_rule: float = 0.1) -> WarpResult:
    """Warp gamma12 = F1^{-1} o F2 and the phase distance of its SRSF.

    If either density dips below 0.1, both are rebuilt from uniform-mixed
    versions (ratio `alpha_rule`); otherwise the direct inverse-CDF
    composition can fail to be monotone.
    """
    alpha = 0.0
    if min(float(np.min(f1.values)), float(np.min(f2.values))) < 0.1:
        alpha = alpha_rule
        f1 = mix_uniform(f1, alpha)
        f2 = mix_uniform(f2, alpha)
    F1, _ = cdf_and_quantile(f1, 0.0) if np.all(f1.values > 0) else cdf_and_quantile(f1, 1e-12)
    F2, _ = cdf_and_quantile(f2, 0.0) if np.all(f2.values > 0) else cdf_and_quantile(f2, 1e-12)
    x = F1.grid
    gamma_vals = np.interp(F2.values, F1.values, x)
    if np.min(np.diff(gamma_vals)) < -1e-6:
        raise ValueError("warp is non-monotone; increase the preprocessing ratio")
    gamma_vals = np.maximum.accumulate(gamma_vals)
    slope = np.clip(np.gradient(gamma_vals, x), 0.0, None)
    srsf_vals = np.sqrt(slope)
    inner = np.clip(np.trapezoid(srsf_vals, x), -1.0, 1.0)
    return WarpResult(
        gamma=GridCurve(0.0, 1.0, gamma_vals),
        srsf=GridCurve(0.0, 1.0, srsf_vals),
        phase_distance=float(np.arccos(inner)),
        alpha_used=alpha,
    )
