"""Benchmark harness: repeated simulate / contaminate / detect cycles.

Each experiment kind maps to one benchmark table layout: single-dataset
detection on mixture data, outlyingness-based detection, phase-distance
detection, association detection under exchange or insertion
contamination, the sinusoid dataset, and the robust-regression
comparison.  Repetitions use split random streams so results are
reproducible and order-independent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .boxplot import BoxplotParams, boxplot_detect
from .curves import DensityFn
from .detect import default_node_configs, node_detect, qf_fdo_detect, tree_detect
from .metrics import Metrics, detection_metrics, iae
from .regression import design_weights, fit, predict
from .regoutlier import RegDetectParams, detect_regression_outliers
from .simulate import (
    RandomStream,
    exchange_contaminate,
    gen_pairs,
    gen_scenario_pdfs,
    gen_sinusoid_dataset,
    insert_contaminate,
    insert_outliers,
)
from .transforms import clr_batch, lqd, phase_distance

EXPERIMENT_KINDS = ("tree_scenario", "fdo_scenario", "phase_scenario", "reg_exchange",
                    "tree_sinusoid", "reg_insert", "robust_regression")

MODEL_ETAS = {"I": 0.0, "II": 0.15, "III": 0.30, "IV": 0.45}


@dataclass
class ExperimentSpec:
    kind: str
    repetitions: int = 100
    seed: int = 0
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in EXPERIMENT_KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")


def _average(metric_dicts: list[dict[str, Metrics]]) -> dict[str, dict]:
    """Average per-label metrics over repetitions."""
    labels = metric_dicts[0].keys()
    out = {}
    for label in labels:
        pcs = [m[label].p_c for m in metric_dicts if m[label].p_c is not None]
        pfs = [m[label].p_f for m in metric_dicts]
        out[label] = {
            "p_c": float(np.mean(pcs)) if pcs else None,
            "p_f": float(np.mean(pfs)),
            "repetitions": len(metric_dicts),
        }
    return out


def _scenario_dataset(stream: RandomStream, scenario: str, model: str,
                      n: int = 100, n_o: int = 10):
    pdfs = gen_scenario_pdfs(n, scenario, MODEL_ETAS[model], stream)
    return insert_outliers(pdfs, n_o, zeta_hs=0.0, varpi=0.2, stream=stream)


def _rep_tree_scenario(stream: RandomStream, params: dict) -> dict[str, Metrics]:
    scenario = params.get("scenario", "I")
    model = params.get("model", "I")
    pdfs, truth = _scenario_dataset(stream, scenario, model)
    n = len(pdfs)
    results = {}
    merged = None
    for cfg in default_node_configs():
        rep = node_detect(pdfs, cfg)
        results[cfg.node] = detection_metrics(rep.flagged, truth, n)
        merged = rep.flagged if merged is None else merged | rep.flagged
    results["TREE"] = detection_metrics(merged, truth, n)
    return results


def _rep_fdo_scenario(stream: RandomStream, params: dict) -> dict[str, Metrics]:
    scenario = params.get("scenario", "I")
    model = params.get("model", "I")
    region = tuple(params.get("region", (0.2, 0.8)))
    mo_whisker = params.get("mo_whisker", 1.5)
    vo_whiskers = params.get("vo_whiskers", (1.5, 2.0, 2.5))
    pdfs, truth = _scenario_dataset(stream, scenario, model)
    n = len(pdfs)
    results = {}
    for vo in vo_whiskers:
        rep = qf_fdo_detect(pdfs, alpha=1e-10, region=region,
                            mo_whisker=mo_whisker, vo_whisker=vo)
        results[f"VO={vo}"] = detection_metrics(rep.flagged, truth, n)
    return results


def _rep_phase_scenario(stream: RandomStream, params: dict) -> dict[str, Metrics]:
    scenario = params.get("scenario", "I")
    model = params.get("model", "I")
    whisker = params.get("whisker", 2.0)
    pdfs, truth = _scenario_dataset(stream, scenario, model)
    n = len(pdfs)
    # phase outlyingness surrogate: mean phase distance to all other curves
    scores = np.zeros(n)
    dmat = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d = phase_distance(pdfs[i], pdfs[j]).phase_distance
            dmat[i, j] = dmat[j, i] = d
    scores = dmat.sum(axis=1) / (n - 1)
    flagged = boxplot_detect(scores, BoxplotParams(whisker, "one_sided_upper"))
    return {"PHASE": detection_metrics(flagged, truth, n)}


def _rep_tree_sinusoid(stream: RandomStream, params: dict) -> dict[str, Metrics]:
    pdfs, truth = gen_sinusoid_dataset(params.get("n", 100),
                                       params.get("n_o", 10), stream)
    n = len(pdfs)
    results = {}
    merged = None
    for cfg in default_node_configs():
        rep = node_detect(pdfs, cfg)
        results[cfg.node] = detection_metrics(rep.flagged, truth, n)
        merged = rep.flagged if merged is None else merged | rep.flagged
    results["TREE"] = detection_metrics(merged, truth, n)
    return results


def _rep_reg_exchange(stream: RandomStream, params: dict) -> dict[str, Metrics]:
    m_g, m_f = params.get("m_g", 0), params.get("m_f", 5)
    n = params.get("n", 100)
    pairs = gen_pairs(n, "mixture_beta", stream)
    pairs, truth = exchange_contaminate(pairs, m_g, m_f, stream)
    flagged = detect_regression_outliers(pairs, RegDetectParams())
    return {"REG": detection_metrics(flagged, truth, n)}


def _rep_reg_insert(stream: RandomStream, params: dict) -> dict[str, Metrics]:
    n_g, n_f = params.get("n_g", 10), params.get("n_f", 0)
    n = params.get("n", 100)
    pairs = gen_pairs(n, "simple_beta", stream)
    pairs, truth = insert_contaminate(pairs, n_g, n_f, zeta_hs=0.0,
                                      varpi=0.25, stream=stream)
    flagged = detect_regression_outliers(pairs, RegDetectParams())
    return {"REG": detection_metrics(flagged, truth, n)}


def _typeI_stats(pdfs) -> np.ndarray:
    """Per-curve (delta, sigma) outlyingness statistics of one dataset."""
    psis = [lqd(f, 1e-10) for f in pdfs]
    vals = np.array([p.values for p in psis])
    center = np.median(vals, axis=0)
    grid = psis[0].grid
    deltas = np.trapezoid(np.abs(vals - center), grid, axis=1)
    clrs = clr_batch(pdfs)
    cvals = np.array([c.values for c in clrs])
    ccenter = np.median(cvals, axis=0)
    sigmas = np.sqrt(np.trapezoid((cvals - ccenter) ** 2, clrs[0].grid, axis=1))
    return np.column_stack([deltas, sigmas])


def robust_regression_trial(stream: RandomStream, params: dict | None = None) -> dict:
    """One contaminated-training / clean-holdout comparison.

    Training pairs are contaminated by a mix of insertions and
    exchanges; the robust fit downweights pairs flagged by the
    single-dataset and association detectors, the standard fit uses
    unit weights; both are scored by the integrated absolute error of
    held-out predictions.
    """
    params = params or {}
    n_train = params.get("n_train", 60)
    n_test = params.get("n_test", 35)
    lambda_s = params.get("lambda_s", 0.1)
    rho1 = params.get("rho1", 1.0)
    rho2 = params.get("rho2", 1.0)
    alpha = params.get("alpha", 0.3)
    m = params.get("m", 5)
    n_ins_g = params.get("n_ins_g", 0)
    n_ins_f = params.get("n_ins_f", 10)
    m_ex_g = params.get("m_ex_g", 1)
    m_ex_f = params.get("m_ex_f", 0)
    zeta_hs = params.get("zeta_hs", 1.0)

    pairs = gen_pairs(n_train, "mixture_beta", stream)
    pairs, ide_ins = insert_contaminate(pairs, n_ins_g, n_ins_f,
                                        zeta_hs=zeta_hs, varpi=0.2,
                                        stream=stream)
    for _ in range(100):
        exchanged, ide_exc = exchange_contaminate(pairs, m_ex_g, m_ex_f, stream)
        if not (ide_exc & ide_ins):
            pairs = exchanged
            break
    holdout = gen_pairs(n_test, "mixture_beta", stream)

    gs = [p[0] for p in pairs]
    fs = [p[1] for p in pairs]
    flags_g = tree_detect(gs).flagged
    flags_f = tree_detect(fs).flagged
    flagged_t2, residuals = detect_regression_outliers(
        pairs, RegDetectParams(), return_residuals=True)
    # residuals of the two directions carry independent evidence on the
    # same pair; averaging them stabilizes the downweighting statistic
    eps_b = (residuals["forward"][0] + residuals["reverse"][0]) / 2.0
    eps_l = (residuals["forward"][1] + residuals["reverse"][1]) / 2.0
    weights = design_weights(
        n_train,
        typeI_flags_g=flags_g, typeI_flags_f=flags_f,
        typeI_stats_g=_typeI_stats(gs), typeI_stats_f=_typeI_stats(fs),
        typeII_flags=flagged_t2,
        typeII_residuals=np.column_stack([eps_b, eps_l]),
        rho1=rho1, rho2=rho2)

    robust = fit(gs, fs, lambda_s=lambda_s, alpha=alpha, m=m, weights=weights)
    standard = fit(gs, fs, lambda_s=lambda_s, alpha=alpha, m=m)
    err_r = [iae(predict(robust, g0), f0) for g0, f0 in holdout]
    err_s = [iae(predict(standard, g0), f0) for g0, f0 in holdout]
    return {
        "iae_robust_median": float(np.median(err_r)),
        "iae_standard_median": float(np.median(err_s)),
        "robust_wins": bool(np.median(err_r) < np.median(err_s)),
    }


_REP_FNS = {
    "tree_scenario": _rep_tree_scenario,
    "fdo_scenario": _rep_fdo_scenario,
    "phase_scenario": _rep_phase_scenario,
    "reg_exchange": _rep_reg_exchange,
    "tree_sinusoid": _rep_tree_sinusoid,
    "reg_insert": _rep_reg_insert,
}


def run_experiment(spec: ExperimentSpec) -> dict:
    """Run a benchmark and average its metrics over the repetitions."""
    streams = RandomStream(spec.seed).split(spec.repetitions)
    if spec.kind == "robust_regression":
        trials = [robust_regression_trial(s, spec.params) for s in streams]
        wins = sum(t["robust_wins"] for t in trials)
        return {
            "kind": spec.kind,
            "seed": spec.seed,
            "repetitions": spec.repetitions,
            "robust_wins": wins,
            "trials": trials,
        }
    rep_fn = _REP_FNS[spec.kind]
    failures = 0
    metric_dicts = []
    for stream in streams:
        try:
            metric_dicts.append(rep_fn(stream, spec.params))
        except Exception:  # noqa: BLE001 - per-repetition isolation
            failures += 1
    if not metric_dicts:
        raise RuntimeError("every repetition failed")
    return {
        "kind": spec.kind,
        "seed": spec.seed,
        "repetitions": spec.repetitions,
        "failures": failures,
        "params": spec.params,
        "table": _average(metric_dicts),
    }
