"""Single-dataset functional outlier detectors.

Two families are provided.  The distance-based family transforms the
densities (normalized log quantile density, centered log-ratio after
horizontal centralization, derivative, or median summary), scores each
curve by its distance to the cross-sectional median over a detection
region, and feeds the scores to a boxplot detector; the per-node results
are merged into a combined report.  The second family measures
directional outlyingness of the quantile functions and flags magnitude
and shape anomalies separately.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .boxplot import MAD_SCALE, BoxplotParams, boxplot_detect
from .curves import DensityFn, GridCurve, cdf_and_quantile, differentiate, median_of
from .transforms import NLQD_DEN_TOL, clr_batch, h_centralize, lqd, nlqd

DISTANCE_KINDS = ("L1", "L2", "Linf")

NODES = ("MED", "nLQD", "CLR", "DIFF")


@dataclass
class NodeConfig:
    """Settings of one transformation node's distance-based detection."""

    node: str
    alpha: float = 1e-10
    distances: tuple[str, ...] = ("L1",)
    whiskers: tuple[float, ...] = (2.5,)
    regions: tuple[tuple[float, float], ...] = ((0.0, 1.0),)
    feature_point: str = "avg_median_mode"  # CLR only

    def __post_init__(self) -> None:
        if self.node not in NODES:
            raise ValueError(f"unknown node {self.node!r}")
        for d in self.distances:
            if d not in DISTANCE_KINDS:
                raise ValueError(f"unknown distance {d!r}")
        if len(self.whiskers) != len(self.distances):
            raise ValueError("one whisker per distance is required")
        for w in self.whiskers:
            if w <= 0:
                raise ValueError("whiskers must be positive")
        for lo, hi in self.regions:
            if not lo < hi:
                raise ValueError("detection region must satisfy lo < hi")


def default_node_configs() -> list[NodeConfig]:
    """The default per-node settings of the combined detector."""
    return [
        NodeConfig("nLQD", alpha=1e-10, distances=("L1", "Linf"),
                   whiskers=(2.5, 3.5), regions=((0.2, 0.8), (0.4, 0.6))),
        NodeConfig("CLR", alpha=0.1, distances=("L2",), whiskers=(2.5,)),
        NodeConfig("DIFF", distances=("L1", "Linf"), whiskers=(2.5, 3.5),
                   regions=((0.0, 1.0),)),
        NodeConfig("MED", whiskers=(1.5,)),
    ]


@dataclass
class DetectionReport:
    """Flagged indices with the provenance and score of each flag."""

    flagged: set[int] = field(default_factory=set)
    # index -> list of (node, distance, region) triples
    provenance: dict[int, list[tuple]] = field(default_factory=dict)
    scores: dict[int, list[float]] = field(default_factory=dict)

    def add(self, index: int, source: tuple, score: float) -> None:
        self.flagged.add(index)
        self.provenance.setdefault(index, []).append(source)
        self.scores.setdefault(index, []).append(float(score))

    def merge(self, other: "DetectionReport") -> None:
        for idx in other.flagged:
            for source, score in zip(other.provenance[idx], other.scores[idx]):
                self.add(idx, source, score)

    def to_records(self) -> list[dict]:
        recs = []
        for idx in sorted(self.flagged):
            for source, score in zip(self.provenance[idx], self.scores[idx]):
                node, distance, region = source
                recs.append({"index": idx, "node": node, "distance": distance,
                             "region": list(region) if region else None,
                             "score": score})
        return recs


def _region_mask_and_grid(grid: np.ndarray, region) -> np.ndarray:
    lo, hi = region
    return (grid >= lo) & (grid <= hi)


def distance_scores(curves, kind: str, region) -> np.ndarray:
    """Distance of each curve to the pointwise median over a region.

    L1 and L2 integrate with the trapezoid rule restricted to the grid
    points inside the region; Linf is the maximum over those points.
    """
    curves = list(curves)
    if len(curves) < 4:
        raise ValueError("need at least 4 curves")
    g0 = curves[0]
    grid = g0.grid
    lo, hi = float(region[0]), float(region[1])
    tol = 1e-12 * max(1.0, abs(g0.domain_end))
    if lo < g0.domain_start - tol or hi > g0.domain_end + tol:
        raise ValueError("region outside the curve domain")
    vals = np.array([c.values for c in curves])
    center = np.median(vals, axis=0)
    diffs = vals - center
    mask = _region_mask_and_grid(grid, region)
    sub_grid = grid[mask]
    sub = diffs[:, mask]
    if kind == "L1":
        return np.trapezoid(np.abs(sub), sub_grid, axis=1)
    if kind == "L2":
        return np.sqrt(np.trapezoid(sub ** 2, sub_grid, axis=1))
    if kind == "Linf":
        return np.max(np.abs(sub), axis=1)
    raise ValueError(f"unknown distance {kind!r}")


def _nlqd_curves(pdfs, alpha: float) -> list[GridCurve]:
    out = []
    for f in pdfs:
        psi = lqd(f, alpha)
        den = np.trapezoid(psi.values, psi.grid)
        if abs(den) < NLQD_DEN_TOL:
            # near-uniform density: normalization would blow up, keep psi
            warnings.warn("degenerate normalization denominator; using raw curve")
            out.append(psi)
        else:
            out.append(nlqd(psi))
    return out


def node_detect(pdfs, cfg: NodeConfig) -> DetectionReport:
    """Distance-based detection at one transformation node."""
    pdfs = list(pdfs)
    if len(pdfs) < 4:
        raise ValueError("need at least 4 densities")
    report = DetectionReport()

    if cfg.node == "MED":
        medians = np.array([median_of(f) for f in pdfs])
        flagged = boxplot_detect(medians, BoxplotParams(cfg.whiskers[0], "two_sided"))
        for idx in flagged:
            report.add(idx, ("MED", None, None), medians[idx])
        return report

    if cfg.node == "nLQD":
        curves = _nlqd_curves(pdfs, cfg.alpha)
    elif cfg.node == "CLR":
        centered, support = h_centralize(pdfs, cfg.feature_point)
        curves = clr_batch(centered)
    elif cfg.node == "DIFF":
        curves = [differentiate(f) for f in pdfs]

    regions = cfg.regions
    if cfg.node == "CLR":
        regions = ((curves[0].domain_start, curves[0].domain_end),)

    for region in regions:
        for kind, whisker in zip(cfg.distances, cfg.whiskers):
            scores = distance_scores(curves, kind, region)
            flagged = boxplot_detect(scores, BoxplotParams(whisker, "one_sided_upper"))
            for idx in flagged:
                report.add(idx, (cfg.node, kind, tuple(region)), scores[idx])
    return report


def tree_detect(pdfs, cfgs=None) -> DetectionReport:
    """Union of the per-node detections with merged provenance."""
    if cfgs is None:
        cfgs = default_node_configs()
    nodes = [c.node for c in cfgs]
    if len(nodes) != len(set(nodes)):
        raise ValueError("duplicate node in configuration")
    report = DetectionReport()
    for cfg in cfgs:
        report.merge(node_detect(pdfs, cfg))
    return report


def fdo_outlyingness(curves, region) -> tuple[np.ndarray, np.ndarray]:
    """Mean and variation of directional outlyingness per curve.

    The pointwise outlyingness is the signed deviation from the
    cross-sectional median scaled by the pointwise MAD; MO and VO are
    its mean and variance over the region under the uniform weight
    1/length(region).  Grid points with a degenerate cross-sectional
    MAD are excluded with a warning.
    """
    curves = list(curves)
    if len(curves) < 4:
        raise ValueError("need at least 4 curves")
    grid = curves[0].grid
    vals = np.array([c.values for c in curves])
    mask = _region_mask_and_grid(grid, region)
    sub_grid = grid[mask]
    sub = vals[:, mask]
    med = np.median(sub, axis=0)
    pt_mad = MAD_SCALE * np.median(np.abs(sub - med), axis=0)
    good = pt_mad >= 1e-12
    if not np.all(good):
        warnings.warn("degenerate pointwise spread at some grid points; excluded")
        sub_grid, sub, med, pt_mad = sub_grid[good], sub[:, good], med[good], pt_mad[good]
    if sub_grid.size < 2:
        # every point degenerate: the cross-section has no spread at all,
        # so no curve is outlying in this sense
        n_curves = vals.shape[0]
        return np.zeros(n_curves), np.zeros(n_curves)
    dsdo = (sub - med) / pt_mad
    measure = sub_grid[-1] - sub_grid[0]
    mo = np.trapezoid(dsdo, sub_grid, axis=1) / measure
    vo = np.trapezoid((dsdo - mo[:, None]) ** 2, sub_grid, axis=1) / measure
    return mo, vo


def qf_fdo_detect(pdfs, alpha: float = 1e-10, region=(0.2, 0.8),
                  mo_whisker: float = 1.5, vo_whisker: float = 1.5) -> DetectionReport:
    """Outlyingness detection in the quantile-function space.

    Magnitude anomalies (MO, two-sided fences) catch horizontal-shift
    outliers since a shifted density becomes a vertically displaced
    quantile function; shape anomalies (VO, upper fence) catch the rest.
    """
    pdfs = list(pdfs)
    quantiles = [cdf_and_quantile(f, alpha)[1] for f in pdfs]
    mo, vo = fdo_outlyingness(quantiles, region)
    report = DetectionReport()
    for idx in boxplot_detect(mo, BoxplotParams(mo_whisker, "two_sided")):
        report.add(idx, ("QF-FDO", "MO", tuple(region)), mo[idx])
    for idx in boxplot_detect(vo, BoxplotParams(vo_whisker, "one_sided_upper")):
        report.add(idx, ("QF-FDO", "VO", tuple(region)), vo[idx])
    return report
