"""Robust scalar summaries and boxplot-style detectors.

Every functional detection chain in this package ends here: a vector of
scalar scores goes in, a set of flagged indices comes out.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

MAD_SCALE = 1.4826

#: relative IQR below which the score distribution counts as degenerate
ZERO_IQR_RTOL = 1e-12


@dataclass(frozen=True)
class BoxplotParams:
    """Whisker length (in IQR multiples) and sidedness of the fence."""

    whisker: float
    side: str = "two_sided"  # or "one_sided_upper"

    def __post_init__(self) -> None:
        if self.whisker <= 0:
            raise ValueError("whisker must be positive")
        if self.side not in ("two_sided", "one_sided_upper"):
            raise ValueError(f"unknown side {self.side!r}")


def percentile(xs, p: float) -> float:
    """Order-statistic quantile with linear interpolation.

    h = (n - 1) p; the value is interpolated between the bracketing
    order statistics.
    """
    xs = np.asarray(xs, dtype=float)
    if xs.size == 0:
        raise ValueError("empty input")
    return float(np.percentile(xs, 100.0 * p))


def mad(xs) -> float:
    """Median absolute deviation scaled by 1.4826."""
    xs = np.asarray(xs, dtype=float)
    if xs.size == 0:
        raise ValueError("empty input")
    med = np.median(xs)
    return float(MAD_SCALE * np.median(np.abs(xs - med)))


def boxplot_detect(xs, params: BoxplotParams) -> set[int]:
    """Indices beyond the quartile fences.

    Two-sided: x <= q25 - r*IQR or x >= q75 + r*IQR.  One-sided upper:
    x >= q75 + r*IQR.  A degenerate (near-zero) IQR returns the empty
    set: with >= at the fences every tied point would otherwise be
    flagged.  Fewer than 4 points returns empty with a warning since
    the quartiles are too unstable to set fences.
    """
    xs = np.asarray(xs, dtype=float)
    if xs.size < 4:
        warnings.warn("fewer than 4 scores: boxplot fences unstable, nothing flagged")
        return set()
    q25 = np.percentile(xs, 25.0)
    q75 = np.percentile(xs, 75.0)
    iqr = q75 - q25
    if iqr < ZERO_IQR_RTOL * max(1.0, abs(q75)):
        return set()
    upper = q75 + params.whisker * iqr
    flagged = xs >= upper
    if params.side == "two_sided":
        flagged |= xs <= q25 - params.whisker * iqr
    return set(np.flatnonzero(flagged).tolist())
