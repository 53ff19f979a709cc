"""Detection-rate bookkeeping shared by the experiment harness."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import DensityFn


@dataclass
class Metrics:
    """Correct and false detection rates (in percent) with raw counts."""

    p_c: float | None
    p_f: float
    n_out: int
    n_norm: int
    n_correct: int
    n_false: int


def detection_metrics(flagged, truth, n: int) -> Metrics:
    """Rates from flagged and true index sets over `n` curves.

    An empty truth set leaves the correct rate undefined (None).
    """
    flagged, truth = set(flagged), set(truth)
    if not flagged <= set(range(n)) or not truth <= set(range(n)):
        raise ValueError("index sets must lie in range(n)")
    n_out = len(truth)
    n_norm = n - n_out
    n_correct = len(flagged & truth)
    n_false = len(flagged - truth)
    p_c = None if n_out == 0 else 100.0 * n_correct / n_out
    p_f = 0.0 if n_norm == 0 else 100.0 * n_false / n_norm
    return Metrics(p_c, p_f, n_out, n_norm, n_correct, n_false)


def iae(f_hat: DensityFn, f: DensityFn) -> float:
    """Integrated absolute error between two densities on a shared grid."""
    return float(np.trapezoid(np.abs(f_hat.values - f.values), f.grid))
