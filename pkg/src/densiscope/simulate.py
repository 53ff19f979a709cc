"""Synthetic density datasets, pair generators, and contamination schemes.

Everything here is deterministic given a seed.  Densities are evaluated
analytically on the grid and renormalized by the trapezoid integral so
discretization error never violates the unit-mass invariant.
"""

from __future__ import annotations

import warnings

import numpy as np
from scipy import stats

from .curves import DEFAULT_GRID_SIZE, DensityFn, density_from_values

RETRY_BUDGET = 1000


class RandomStream:
    """Splittable deterministic random source.

    Children produced by `split` are statistically independent of the
    parent and of each other, so repetitions of an experiment can be
    generated concurrently yet reproducibly.
    """

    def __init__(self, seed) -> None:
        self._seq = seed if isinstance(seed, np.random.SeedSequence) \
            else np.random.SeedSequence(seed)
        self.rng = np.random.default_rng(self._seq)

    def split(self, k: int) -> list["RandomStream"]:
        return [RandomStream(s) for s in self._seq.spawn(k)]

    def uniform(self, lo: float, hi: float, size=None):
        return self.rng.uniform(lo, hi, size)

    def normal(self, mu: float, sd: float, size=None):
        return self.rng.normal(mu, sd, size)

    def choice(self, seq, size=None, replace=True):
        return self.rng.choice(seq, size=size, replace=replace)


def beta_density(a: float, b: float, n: int = DEFAULT_GRID_SIZE) -> DensityFn:
    """Beta(a, b) sampled on the unit grid, trapezoid-renormalized."""
    x = np.linspace(0.0, 1.0, n)
    vals = stats.beta.pdf(x, a, b)
    vals[~np.isfinite(vals)] = 0.0
    return density_from_values(vals)


def tgpd_density(kappa: float, sigma: float,
                 n: int = DEFAULT_GRID_SIZE) -> DensityFn:
    """Generalized Pareto density truncated and renormalized to [0, 1]."""
    x = np.linspace(0.0, 1.0, n)
    vals = (1.0 / sigma) * (1.0 + kappa * x / sigma) ** (-1.0 - 1.0 / kappa)
    return density_from_values(vals)


SCENARIO_TGPD = {"I": (2.0, 4.0), "II": (0.5, 0.5)}


def gen_scenario_pdfs(n: int, scenario: str, eta: float,
                      stream: RandomStream,
                      grid_size: int = DEFAULT_GRID_SIZE) -> list[DensityFn]:
    """Beta/truncated-Pareto mixtures: the benchmark null data."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError("eta must lie in [0, 1]")
    kappa, sigma = SCENARIO_TGPD[scenario]
    tail = tgpd_density(kappa, sigma, grid_size)
    out = []
    for _ in range(n):
        a = stream.uniform(10.0, 35.0)
        b = stream.uniform(14.0, 20.0)
        base = beta_density(a, b, grid_size)
        out.append(density_from_values(
            (1.0 - eta) * base.values + eta * tail.values))
    return out


def gen_beta_sorted(n: int, delta1: float, delta2: float,
                    stream: RandomStream,
                    grid_size: int = DEFAULT_GRID_SIZE) -> list[DensityFn]:
    """Betas whose second parameters are the sorted first parameters."""
    if not delta2 > delta1 > 0:
        raise ValueError("need delta2 > delta1 > 0")
    a = stream.uniform(delta1, delta2, n)
    b = np.sort(a)
    return [beta_density(a[i], b[i], grid_size) for i in range(n)]


def insert_outliers(pdfs, n_o: int, zeta_hs: float, varpi: float,
                    stream: RandomStream) -> tuple[list[DensityFn], set[int]]:
    """Replace `n_o` curves with shape or horizontal-shift outliers.

    Shape outliers mix one high-mode with one low-mode curve of the
    original data; shift outliers are betas concentrated near one side
    of the domain.  The branch is drawn per outlier against `zeta_hs`.
    """
    pdfs = list(pdfs)
    n = len(pdfs)
    if n_o >= n:
        raise ValueError("cannot replace every curve")
    if not 0.0 < varpi < 0.5:
        raise ValueError("varpi must lie in (0, 0.5)")
    grid_size = pdfs[0].n
    modes = np.array([f.grid[int(np.argmax(f.values))] for f in pdfs])
    hi = np.percentile(modes, 100.0 * (1.0 - varpi))
    lo = np.percentile(modes, 100.0 * varpi)
    # the donor subsets are fixed before any replacement happens
    upper = [pdfs[i] for i in range(n) if modes[i] >= hi]
    lower = [pdfs[i] for i in range(n) if modes[i] <= lo]
    if not upper or not lower:
        raise ValueError("mode-percentile subsets are empty; increase varpi")
    available = list(range(n))
    indices: set[int] = set()
    for _ in range(n_o):
        z = stream.uniform(0.0, 1.0)
        if z > zeta_hs:
            h1 = upper[int(stream.choice(len(upper)))]
            h2 = lower[int(stream.choice(len(lower)))]
            rho = stream.uniform(0.4, 0.6)
            h = density_from_values(rho * h1.values + (1.0 - rho) * h2.values)
        else:
            y = stream.uniform(0.0, 1.0)
            a = stream.uniform(2.0, 5.0)
            b = stream.uniform(6.0, 13.0)
            c = stream.uniform(17.0, 22.0)
            d = stream.uniform(2.0, 5.0)
            h = beta_density(a, b, grid_size) if y > 0.5 \
                else beta_density(c, d, grid_size)
        k = int(stream.choice(available))
        available.remove(k)
        pdfs[k] = h
        indices.add(k)
    return pdfs, indices


def gen_pairs(n: int, variant: str,
              stream: RandomStream,
              grid_size: int = DEFAULT_GRID_SIZE) -> list[tuple[DensityFn, DensityFn]]:
    """Correlated predictor/response density pairs.

    `mixture_beta` draws two-component beta mixtures whose response
    parameters depend nonlinearly on the predictor parameters plus a
    shared noise term; `simple_beta` draws unimodal betas with a milder
    dependence.  Noise draws that push a beta parameter nonpositive are
    resampled (bounded retries).
    """
    if variant == "mixture_beta":
        pairs = []
        for _ in range(n):
            a = stream.uniform(10.0, 40.0)
            b = stream.uniform(14.0, 40.0)
            q = stream.uniform(0.0, 0.5)
            g = density_from_values(
                (1.0 - q) * beta_density(a, b, grid_size).values
                + q * beta_density(2.0 * a, b, grid_size).values)
            for _attempt in range(RETRY_BUDGET):
                e = stream.normal(0.0, 5.0)
                c = 2.5 * a + np.sqrt(a) - 15.0 + e
                d = 0.5 * np.sqrt(a * b) + 45.0 - 0.8 * a + e
                if c > 0 and d > 0:
                    break
            else:
                raise RuntimeError("could not draw valid response parameters")
            if _attempt > 0:
                warnings.warn("resampled response noise to keep parameters positive")
            z = (c + d) / 2.0
            f = density_from_values(
                (1.0 - q) * beta_density(c, d, grid_size).values
                + q * beta_density(z, z, grid_size).values)
            pairs.append((g, f))
        return pairs
    if variant == "simple_beta":
        if n < 2:
            raise ValueError("this variant needs n >= 2")
        a = stream.uniform(14.0, 30.0, n)
        b = stream.uniform(14.0, 20.0, n)
        e = stream.normal(0.0, 3.0, n)
        a_span = a.max() - a.min()
        pairs = []
        for i in range(n):
            g = beta_density(a[i], b[i], grid_size)
            c = 40.0 * (a[i] - a.min()) / a_span + 12.0 + e[i]
            d = np.sqrt(a[i] * b[i] + a[i]) + e[i]
            for _attempt in range(RETRY_BUDGET):
                if c > 0 and d > 0:
                    break
                ei = stream.normal(0.0, 3.0)
                c = 40.0 * (a[i] - a.min()) / a_span + 12.0 + ei
                d = np.sqrt(a[i] * b[i] + a[i]) + ei
            else:
                raise RuntimeError("could not draw valid response parameters")
            pairs.append((g, beta_density(c, d, grid_size)))
        return pairs
    raise ValueError(f"unknown variant {variant!r}")


def _exchange_one_side(pdfs, m: int, stream: RandomStream) -> set[int]:
    """Swap `m` low-peak curves with `m` high-peak curves, in place."""
    peaks = np.array([float(np.max(f.values)) for f in pdfs])
    q20, q80 = np.percentile(peaks, [20.0, 80.0])
    low = [i for i in range(len(pdfs)) if peaks[i] <= q20]
    high = [i for i in range(len(pdfs)) if peaks[i] >= q80]
    if len(low) < m or len(high) < m:
        raise ValueError("peak-percentile subsets too small for the swap count")
    li = stream.choice(low, size=m, replace=False) if m else np.array([], dtype=int)
    ui = stream.choice(high, size=m, replace=False) if m else np.array([], dtype=int)
    for l, u in zip(li, ui):
        pdfs[l], pdfs[u] = pdfs[u], pdfs[l]
    return set(int(i) for i in li) | set(int(i) for i in ui)


def exchange_contaminate(pairs, m_g: int, m_f: int,
                         stream: RandomStream) -> tuple[list, set[int]]:
    """Create abnormal associations by intra-set swaps on each side.

    The g-side and f-side swap index sets must be disjoint (otherwise a
    double swap could silently restore a normal association); the whole
    contamination is retried from the original data until they are.
    """
    if m_g + m_f < 1:
        raise ValueError("need at least one exchange")
    for _ in range(RETRY_BUDGET):
        gs = [p[0] for p in pairs]
        fs = [p[1] for p in pairs]
        ide_g = _exchange_one_side(gs, m_g, stream) if m_g else set()
        ide_f = _exchange_one_side(fs, m_f, stream) if m_f else set()
        if not (ide_g & ide_f):
            return list(zip(gs, fs)), ide_g | ide_f
    raise RuntimeError("could not draw disjoint exchange sets")


def insert_contaminate(pairs, n_g: int, n_f: int, zeta_hs: float, varpi: float,
                       stream: RandomStream) -> tuple[list, set[int]]:
    """Create abnormal associations by inserting outliers on each side."""
    for _ in range(RETRY_BUDGET):
        gs = [p[0] for p in pairs]
        fs = [p[1] for p in pairs]
        ide_g: set[int] = set()
        ide_f: set[int] = set()
        if n_g:
            gs, ide_g = insert_outliers(gs, n_g, zeta_hs, varpi, stream)
        if n_f:
            fs, ide_f = insert_outliers(fs, n_f, zeta_hs, varpi, stream)
        if not (ide_g & ide_f):
            return list(zip(gs, fs)), ide_g | ide_f
    raise RuntimeError("could not draw disjoint insertion sets")


def gen_sinusoid_dataset(n: int, n_o: int, stream: RandomStream,
                         grid_size: int = DEFAULT_GRID_SIZE
                         ) -> tuple[list[DensityFn], set[int]]:
    """Sinusoid-derived densities with warped, flat, and ripple outliers.

    Raw curves a sin(2 pi x) + b cos(2 pi x) are contaminated with
    phase-warped or low-amplitude replacements plus one high-frequency
    ripple added to the most central curve, then every curve is shifted
    by the global minimum and normalized into a density.
    """
    if n_o >= n:
        raise ValueError("cannot replace every curve")
    x = np.linspace(0.0, 1.0, grid_size)
    a = stream.uniform(0.012, 0.05, n)
    b = stream.uniform(0.012, 0.075, n)
    curves = a[:, None] * np.sin(2 * np.pi * x) + b[:, None] * np.cos(2 * np.pi * x)

    outliers = []
    for _ in range(n_o - 1):
        z = stream.uniform(0.0, 1.0)
        if z < 0.6:
            c = stream.uniform(-4.5, -2.0)
            gamma = c * (x - 4.0) + x ** 3
            ao = stream.uniform(0.02, 0.05)
            bo = stream.uniform(0.0, 0.075)
            outliers.append(ao * np.sin(2 * np.pi * gamma)
                            + bo * np.cos(2 * np.pi * gamma))
        else:
            ao = stream.uniform(0.0, 0.008)
            bo = stream.uniform(0.0, 0.008)
            outliers.append(ao * np.sin(2 * np.pi * x)
                            + bo * np.cos(2 * np.pi * x))
    med = np.median(curves, axis=0)
    closest = int(np.argmin(np.trapezoid((curves - med) ** 2, x, axis=1)))
    outliers.append(curves[closest] + 0.02 * np.sin(20 * np.pi * x))

    targets = stream.choice(np.arange(n), size=n_o, replace=False)
    for idx, v in zip(targets, outliers):
        curves[int(idx)] = v
    shift = curves.min()
    pdfs = [density_from_values(curves[i] - shift) for i in range(n)]
    return pdfs, set(int(i) for i in targets)
