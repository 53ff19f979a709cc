"""Multiple detection: parameter sweeps, stability filtering, consolidation.

A single detector run depends on arbitrary choices (preprocessing ratio,
detection region, whiskers).  Sweeping a grid of such choices, dropping
runs whose detection counts are abnormally large, and ranking curves by
how often the surviving runs flag them yields a detection that is robust
to those choices and comes with a built-in severity ranking.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .detect import NodeConfig, qf_fdo_detect, tree_detect


@dataclass
class ParamGrid:
    """Cartesian parameter grid for the two detector families.

    Tree runs vary the nLQD preprocessing ratio, the nLQD detection
    region, and the whisker pairs of the nLQD/DIFF nodes together with
    the CLR whisker; the other node settings stay at their defaults.
    Each combination uses one nLQD region (regions are grid axes here,
    not merged within a run).
    """

    tree_nlqd_alphas: tuple = (1e-10, 1e-6, 1e-2)
    tree_nlqd_regions: tuple = ((0.001, 0.999), (0.1, 0.9), (0.2, 0.8))
    tree_nlqd_whiskers: tuple = ((2.0, 3.0), (2.5, 3.5), (3.5, 4.5))
    tree_clr_alpha: float = 0.1
    tree_clr_whiskers: tuple = (2.0, 2.5, 3.5)
    tree_diff_whiskers: tuple = ((2.0, 3.0), (2.5, 3.5), (3.5, 4.5))
    tree_med_whisker: float = 1.5
    fdo_alphas: tuple = (1e-10, 1e-6, 1e-2)
    fdo_regions: tuple = ((0.001, 0.999), (0.1, 0.9), (0.2, 0.8))
    fdo_vo_whiskers: tuple = (1.5, 2.0, 2.5, 3.0)
    fdo_mo_whisker: float = 1.5

    def tree_combinations(self):
        return product(self.tree_nlqd_alphas, self.tree_nlqd_regions,
                       self.tree_nlqd_whiskers, self.tree_clr_whiskers,
                       self.tree_diff_whiskers)

    def fdo_combinations(self):
        return product(self.fdo_alphas, self.fdo_regions, self.fdo_vo_whiskers)

    @property
    def size(self) -> int:
        return (len(self.tree_nlqd_alphas) * len(self.tree_nlqd_regions)
                * len(self.tree_nlqd_whiskers) * len(self.tree_clr_whiskers)
                * len(self.tree_diff_whiskers)
                + len(self.fdo_alphas) * len(self.fdo_regions)
                * len(self.fdo_vo_whiskers))


@dataclass
class RunRecord:
    """One detector run in the sweep."""

    run_id: int
    kind: str                 # "tree" or "qf_fdo"
    params: dict
    flagged: frozenset
    failed: bool = False
    error: str | None = None

    @property
    def count(self) -> int:
        return len(self.flagged)


@dataclass
class MultiReport:
    """Consolidated result of a multiple detection."""

    frequencies: dict[int, int]
    severity: dict[int, str]
    retained_ids: list[int]
    filtered_ids: list[int]
    failed_ids: list[int]
    n_runs: int

    @property
    def outlier_indices(self) -> set[int]:
        return set(self.frequencies)

    def to_dict(self) -> dict:
        return {
            "n_runs": self.n_runs,
            "retained_ids": self.retained_ids,
            "filtered_ids": self.filtered_ids,
            "failed_ids": self.failed_ids,
            "frequencies": {str(k): v for k, v in sorted(self.frequencies.items())},
            "severity": {str(k): v for k, v in sorted(self.severity.items())},
        }


def run_grid(pdfs, grid: ParamGrid | None = None) -> list[RunRecord]:
    """Execute every parameter combination; failures are recorded, not raised."""
    if grid is None:
        grid = ParamGrid()
    if grid.size < 2:
        raise ValueError("a multiple detection needs at least 2 runs")
    pdfs = list(pdfs)
    records = []
    run_id = 0
    for alpha, region, nlqd_w, clr_w, diff_w in grid.tree_combinations():
        params = {"nlqd_alpha": alpha, "nlqd_region": list(region),
                  "nlqd_whiskers": list(nlqd_w), "clr_whisker": clr_w,
                  "diff_whiskers": list(diff_w)}
        cfgs = [
            NodeConfig("nLQD", alpha=alpha, distances=("L1", "Linf"),
                       whiskers=nlqd_w, regions=(region,)),
            NodeConfig("CLR", alpha=grid.tree_clr_alpha, distances=("L2",),
                       whiskers=(clr_w,)),
            NodeConfig("DIFF", distances=("L1", "Linf"), whiskers=diff_w),
            NodeConfig("MED", whiskers=(grid.tree_med_whisker,)),
        ]
        records.append(_run_one(run_id, "tree", params,
                                lambda: tree_detect(pdfs, cfgs).flagged))
        run_id += 1
    for alpha, region, vo_w in grid.fdo_combinations():
        params = {"alpha": alpha, "region": list(region),
                  "vo_whisker": vo_w, "mo_whisker": grid.fdo_mo_whisker}
        records.append(_run_one(
            run_id, "qf_fdo", params,
            lambda: qf_fdo_detect(pdfs, alpha=alpha, region=region,
                                  mo_whisker=grid.fdo_mo_whisker,
                                  vo_whisker=vo_w).flagged))
        run_id += 1
    return records


def _run_one(run_id: int, kind: str, params: dict, fn) -> RunRecord:
    try:
        flagged = frozenset(fn())
    except Exception as exc:  # noqa: BLE001 - per-run isolation is the contract
        return RunRecord(run_id, kind, params, frozenset(), failed=True,
                         error=str(exc))
    return RunRecord(run_id, kind, params, flagged)


def filter_unstable(records, whisker: float = 2.5) -> list[RunRecord]:
    """Drop runs whose detection count is abnormally large.

    Failed runs are excluded outright so they cannot distort the fence.
    """
    ok = [r for r in records if not r.failed]
    if len(ok) < 4:
        raise ValueError("need at least 4 successful runs to assess stability")
    counts = np.array([r.count for r in ok], dtype=float)
    # the fence applies even when the quartiles coincide: if most runs agree
    # on one count, anything above it is exactly what this filter is for
    q25, q75 = np.percentile(counts, [25.0, 75.0])
    fence = q75 + whisker * (q75 - q25)
    return [r for r, c in zip(ok, counts) if c <= fence]


def consolidate(retained, severity_breaks=(1 / 3, 2 / 3),
                filtered_ids=(), failed_ids=(), n_runs=None) -> MultiReport:
    """Detection frequencies and severity classes over the retained runs."""
    retained = list(retained)
    if not retained:
        raise ValueError("no retained runs to consolidate")
    freq: dict[int, int] = {}
    for rec in retained:
        for idx in rec.flagged:
            freq[idx] = freq.get(idx, 0) + 1
    severity: dict[int, str] = {}
    if freq:
        top = max(freq.values())
        b1, b2 = severity_breaks
        for idx, j in freq.items():
            ratio = j / top
            severity[idx] = ("heavy" if ratio > b2
                             else "mild" if ratio <= b1 else "moderate")
    return MultiReport(
        frequencies=freq,
        severity=severity,
        retained_ids=[r.run_id for r in retained],
        filtered_ids=list(filtered_ids),
        failed_ids=list(failed_ids),
        n_runs=n_runs if n_runs is not None else len(retained),
    )


def multi_detect(pdfs, grid: ParamGrid | None = None, whisker: float = 2.5,
                 severity_breaks=(1 / 3, 2 / 3)) -> MultiReport:
    """Full pipeline: sweep, stability filter, consolidation."""
    records = run_grid(pdfs, grid)
    retained = filter_unstable(records, whisker)
    retained_ids = {r.run_id for r in retained}
    failed_ids = [r.run_id for r in records if r.failed]
    filtered_ids = [r.run_id for r in records
                    if not r.failed and r.run_id not in retained_ids]
    return consolidate(retained, severity_breaks, filtered_ids, failed_ids,
                       n_runs=len(records))
