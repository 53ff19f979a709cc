"""Grid-sampled curves and the numerical calculus shared by every module.

All functional objects in this package are sampled on a uniform grid with
both endpoints included.  Evaluation between grid points is by linear
interpolation; evaluation outside the domain raises.
"""

from __future__ import annotations

import numpy as np

DEFAULT_GRID_SIZE = 512

#: tolerance on the unit-integral constraint of a density
NORM_TOL = 1e-6


class GridCurve:
    """A real function sampled at N uniformly spaced points of [start, end].

    Parameters
    ----------
    domain_start, domain_end : float
        Endpoints of the compact domain, ``domain_end > domain_start``.
    values : array_like
        Samples at the N grid points (N >= 3), endpoints included.
    """

    def __init__(self, domain_start: float, domain_end: float, values) -> None:
        values = np.asarray(values, dtype=float)
        if values.ndim != 1 or values.size < 3:
            raise ValueError("a grid curve needs at least 3 samples")
        if not np.all(np.isfinite(values)):
            raise ValueError("grid curve values must be finite")
        if not domain_end > domain_start:
            raise ValueError("domain_end must exceed domain_start")
        self.domain_start = float(domain_start)
        self.domain_end = float(domain_end)
        self.values = values
        self._grid: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def grid(self) -> np.ndarray:
        if self._grid is None:
            self._grid = np.linspace(self.domain_start, self.domain_end, self.n)
        return self._grid

    @property
    def spacing(self) -> float:
        return (self.domain_end - self.domain_start) / (self.n - 1)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        tol = 1e-12 * max(1.0, abs(self.domain_end))
        if np.any(x < self.domain_start - tol) or np.any(x > self.domain_end + tol):
            raise ValueError("evaluation outside the curve domain")
        return np.interp(x, self.grid, self.values)

    def with_values(self, values) -> "GridCurve":
        """Same grid, new samples (returns a plain GridCurve)."""
        return GridCurve(self.domain_start, self.domain_end, values)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return (
            f"{type(self).__name__}([{self.domain_start:g}, {self.domain_end:g}], "
            f"n={self.n})"
        )


class DensityFn(GridCurve):
    """A probability density sampled on its (compact) support.

    Nonnegative values, unit trapezoid integral within ``NORM_TOL``.
    """

    def __init__(self, domain_start: float, domain_end: float, values) -> None:
        values = np.asarray(values, dtype=float)
        if np.any(values < -1e-12):
            raise ValueError("density values must be nonnegative")
        values = np.clip(values, 0.0, None)
        super().__init__(domain_start, domain_end, values)
        total = np.trapezoid(self.values, self.grid)
        if abs(total - 1.0) > NORM_TOL:
            raise ValueError(f"density integral {total:.8f} is not 1 within {NORM_TOL}")


class CdfFn(GridCurve):
    """Cumulative distribution on the density's domain: 0 -> 1, nondecreasing."""

    def __init__(self, domain_start: float, domain_end: float, values) -> None:
        values = np.asarray(values, dtype=float)
        if abs(values[0]) > 1e-9 or abs(values[-1] - 1.0) > 1e-9:
            raise ValueError("CDF must run from 0 to 1")
        if np.any(np.diff(values) < -1e-12):
            raise ValueError("CDF must be nondecreasing")
        super().__init__(domain_start, domain_end, values)


class QuantileFn(GridCurve):
    """Quantile function on [0, 1], nondecreasing over the density's domain."""

    def __init__(self, domain_start: float, domain_end: float, values) -> None:
        if (domain_start, domain_end) != (0.0, 1.0):
            raise ValueError("quantile functions live on [0, 1]")
        values = np.asarray(values, dtype=float)
        if np.any(np.diff(values) < -1e-9):
            raise ValueError("quantile function must be nondecreasing")
        super().__init__(domain_start, domain_end, values)


def density_from_values(values, domain_start: float = 0.0, domain_end: float = 1.0,
                        renormalize: bool = True) -> DensityFn:
    """Build a DensityFn, optionally renormalizing by the trapezoid integral."""
    values = np.clip(np.asarray(values, dtype=float), 0.0, None)
    if renormalize:
        grid = np.linspace(domain_start, domain_end, values.size)
        total = np.trapezoid(values, grid)
        if total <= 0:
            raise ValueError("cannot normalize a curve with nonpositive mass")
        values = values / total
    return DensityFn(domain_start, domain_end, values)


def integrate(curve: GridCurve, sub_interval=None) -> float:
    """Composite-trapezoid integral of `curve`, optionally over a sub-interval.

    Sub-interval endpoints need not be grid points; the integrand is
    linearly interpolated there.
    """
    if sub_interval is None:
        return float(np.trapezoid(curve.values, curve.grid))
    lo, hi = float(sub_interval[0]), float(sub_interval[1])
    tol = 1e-12 * max(1.0, abs(curve.domain_end))
    if lo < curve.domain_start - tol or hi > curve.domain_end + tol or hi < lo:
        raise ValueError("sub_interval outside the curve domain")
    grid = curve.grid
    inside = (grid > lo) & (grid < hi)
    xs = np.concatenate(([lo], grid[inside], [hi]))
    ys = np.concatenate(([curve(lo)], curve.values[inside], [curve(hi)]))
    return float(np.trapezoid(ys, xs))


def differentiate(curve: GridCurve) -> GridCurve:
    """Central differences inside, one-sided at the endpoints; same grid."""
    deriv = np.gradient(curve.values, curve.spacing)
    return GridCurve(curve.domain_start, curve.domain_end, deriv)


def mix_uniform(f: DensityFn, alpha: float) -> DensityFn:
    """Mix `f` (supported on [0, 1]) with a uniform: (1 - alpha) f + alpha."""
    if not 0.0 <= alpha < 1.0:
        raise ValueError("alpha must lie in [0, 1)")
    if (f.domain_start, f.domain_end) != (0.0, 1.0):
        raise ValueError("mix_uniform expects a density supported on [0, 1]")
    return DensityFn(0.0, 1.0, (1.0 - alpha) * f.values + alpha)


def clear_uniform(f_star: DensityFn, alpha: float) -> DensityFn:
    """Undo a uniform admixture: |f* - alpha| / (1 - alpha), renormalized.

    The absolute value keeps the output nonnegative when a predicted
    density undershoots alpha.
    """
    if not 0.0 <= alpha < 1.0:
        raise ValueError("alpha must lie in [0, 1)")
    raw = np.abs(f_star.values - alpha) / (1.0 - alpha)
    w = np.trapezoid(raw, f_star.grid)
    if w < 1e-12:
        raise ValueError("degenerate input: cannot recover the original density")
    return DensityFn(f_star.domain_start, f_star.domain_end, raw / w)


def _cumulative_cdf(values: np.ndarray, grid: np.ndarray) -> np.ndarray:
    steps = 0.5 * (values[1:] + values[:-1]) * np.diff(grid)
    cdf = np.concatenate(([0.0], np.cumsum(steps)))
    return cdf / cdf[-1]


def cdf_and_quantile(f: DensityFn, alpha: float) -> tuple[CdfFn, QuantileFn]:
    """CDF by cumulative trapezoid and its interpolated inverse.

    The density is first mixed with the uniform at ratio `alpha`; any
    alpha > 0 makes the CDF strictly increasing so the inverse is well
    defined on a uniform probability grid of the same size.
    """
    f_star = mix_uniform(f, alpha)
    grid = f_star.grid
    cdf_vals = _cumulative_cdf(f_star.values, grid)
    if alpha == 0.0 and np.any(np.diff(cdf_vals) <= 0.0):
        raise ValueError("CDF is not strictly increasing; use alpha > 0")
    t = np.linspace(0.0, 1.0, f_star.n)
    q_vals = np.interp(t, cdf_vals, grid)
    return (CdfFn(f.domain_start, f.domain_end, cdf_vals),
            QuantileFn(0.0, 1.0, q_vals))


def median_of(f: DensityFn) -> float:
    """Smallest x with cumulative mass >= 1/2, linearly interpolated."""
    grid = f.grid
    cdf = _cumulative_cdf(f.values, grid)
    idx = int(np.searchsorted(cdf, 0.5))
    if idx == 0:
        return float(grid[0])
    lo, hi = cdf[idx - 1], cdf[idx]
    frac = 0.0 if hi == lo else (0.5 - lo) / (hi - lo)
    return float(grid[idx - 1] + frac * (grid[idx] - grid[idx - 1]))


def mode_of(f: DensityFn) -> float:
    """Abscissa of the maximum sample; ties broken leftmost."""
    return float(f.grid[int(np.argmax(f.values))])


def mean_of(f: DensityFn) -> float:
    """First moment of the density (trapezoid)."""
    return float(np.trapezoid(f.grid * f.values, f.grid))
