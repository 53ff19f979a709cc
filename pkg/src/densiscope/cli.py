"""Command line entry point.

Subcommands: simulate (emit curve CSVs), detect (single-dataset
detection), multidetect (parameter-sweep detection), regress (fit or
predict a regressor), regoutlier (association detection for pairs), and
bench (run a benchmark experiment).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .detect import NodeConfig, default_node_configs, qf_fdo_detect, tree_detect
from .experiments import EXPERIMENT_KINDS, ExperimentSpec, run_experiment
from .io import (
    read_curves,
    read_json,
    read_pairs,
    write_curves,
    write_json,
    write_report_jsonl,
)
from .multidetect import ParamGrid, multi_detect
from .regression import RegressionModel, fit, predict
from .regoutlier import RegDetectParams, detect_regression_outliers
from .simulate import (
    RandomStream,
    gen_pairs,
    gen_scenario_pdfs,
    gen_sinusoid_dataset,
    insert_outliers,
)

DEFAULT_SEED_ENV = "DENSISCOPE_SEED"


def _default_seed() -> int:
    return int(os.environ.get(DEFAULT_SEED_ENV, "0"))


def _cmd_simulate(args) -> int:
    stream = RandomStream(args.seed)
    manifest = {"seed": args.seed, "generator": args.generator, "n": args.n}
    if args.generator == "scenario":
        pdfs = gen_scenario_pdfs(args.n, args.scenario, args.eta, stream)
        outliers: set[int] = set()
        if args.n_outliers:
            pdfs, outliers = insert_outliers(pdfs, args.n_outliers,
                                             args.zeta_hs, args.varpi, stream)
        manifest.update(scenario=args.scenario, eta=args.eta,
                        outliers=sorted(outliers))
        write_curves(args.output, pdfs)
    elif args.generator == "sinusoid":
        pdfs, outliers = gen_sinusoid_dataset(args.n, args.n_outliers, stream)
        manifest.update(outliers=sorted(outliers))
        write_curves(args.output, pdfs)
    else:  # pairs
        pairs = gen_pairs(args.n, args.variant, stream)
        base, ext = os.path.splitext(args.output)
        write_curves(f"{base}_g{ext}", [p[0] for p in pairs])
        write_curves(f"{base}_f{ext}", [p[1] for p in pairs])
        manifest.update(variant=args.variant,
                        files=[f"{base}_g{ext}", f"{base}_f{ext}"])
    write_json(args.output + ".manifest.json", manifest)
    return 0


def _cmd_detect(args) -> int:
    pdfs, _ = read_curves(args.input)
    if args.method == "tree":
        report = tree_detect(pdfs)
    else:
        report = qf_fdo_detect(pdfs, alpha=args.alpha,
                               region=(args.region[0], args.region[1]),
                               mo_whisker=args.mo_whisker,
                               vo_whisker=args.vo_whisker)
    write_report_jsonl(args.output, report)
    print(f"flagged {len(report.flagged)} of {len(pdfs)} curves")
    return 0


def _cmd_multidetect(args) -> int:
    pdfs, _ = read_curves(args.input)
    grid = ParamGrid() if args.grid is None else ParamGrid(**read_json(args.grid))
    report = multi_detect(pdfs, grid, whisker=args.whisker)
    write_json(args.output, report.to_dict())
    print(f"{len(report.frequencies)} outliers over "
          f"{len(report.retained_ids)} retained runs")
    return 0


def _cmd_regress(args) -> int:
    if args.action == "fit":
        pairs = read_pairs(args.predictors, args.responses)
        model = fit([p[0] for p in pairs], [p[1] for p in pairs],
                    lambda_s=args.lambda_s, alpha=args.alpha, m=args.m)
        write_json(args.model, model.to_dict())
        print(f"fitted on {len(pairs)} pairs; model written to {args.model}")
    else:
        model = RegressionModel.from_dict(read_json(args.model))
        pdfs, ids = read_curves(args.predictors)
        preds = [predict(model, g) for g in pdfs]
        write_curves(args.output, preds, ids)
        print(f"predicted {len(preds)} densities")
    return 0


def _cmd_regoutlier(args) -> int:
    pairs = read_pairs(args.predictors, args.responses)
    params = RegDetectParams(**read_json(args.params)) if args.params \
        else RegDetectParams()
    flagged = detect_regression_outliers(pairs, params)
    write_json(args.output, {"flagged": sorted(flagged)})
    print(f"flagged {len(flagged)} of {len(pairs)} pairs")
    return 0


def _cmd_bench(args) -> int:
    params = read_json(args.params) if args.params else {}
    spec = ExperimentSpec(kind=args.kind, repetitions=args.repetitions,
                          seed=args.seed, params=params)
    result = run_experiment(spec)
    write_json(args.output, result)
    print(json.dumps({k: v for k, v in result.items() if k != "trials"},
                     indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="densiscope",
        description="outlier detection and robust regression for density-valued data")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate synthetic density data")
    p.add_argument("--generator", choices=["scenario", "sinusoid", "pairs"],
                   default="scenario")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--scenario", choices=["I", "II"], default="I")
    p.add_argument("--eta", type=float, default=0.0)
    p.add_argument("--variant", choices=["mixture_beta", "simple_beta"],
                   default="mixture_beta")
    p.add_argument("--n-outliers", type=int, default=0)
    p.add_argument("--zeta-hs", type=float, default=0.0)
    p.add_argument("--varpi", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--output", required=True)
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("detect", help="single-dataset outlier detection")
    p.add_argument("--input", required=True)
    p.add_argument("--method", choices=["tree", "qf_fdo"], default="tree")
    p.add_argument("--alpha", type=float, default=1e-10)
    p.add_argument("--region", type=float, nargs=2, default=[0.2, 0.8])
    p.add_argument("--mo-whisker", type=float, default=1.5)
    p.add_argument("--vo-whisker", type=float, default=1.5)
    p.add_argument("--output", required=True)
    p.set_defaults(fn=_cmd_detect)

    p = sub.add_parser("multidetect", help="parameter-sweep detection")
    p.add_argument("--input", required=True)
    p.add_argument("--grid", help="JSON file of grid overrides")
    p.add_argument("--whisker", type=float, default=2.5)
    p.add_argument("--output", required=True)
    p.set_defaults(fn=_cmd_multidetect)

    p = sub.add_parser("regress", help="fit or apply the regressor")
    p.add_argument("action", choices=["fit", "predict"])
    p.add_argument("--predictors", required=True)
    p.add_argument("--responses")
    p.add_argument("--model", required=True)
    p.add_argument("--lambda-s", type=float, default=0.1, dest="lambda_s")
    p.add_argument("--alpha", type=float, default=0.3)
    p.add_argument("--m", type=int, default=5)
    p.add_argument("--output")
    p.set_defaults(fn=_cmd_regress)

    p = sub.add_parser("regoutlier", help="association outlier detection")
    p.add_argument("--predictors", required=True)
    p.add_argument("--responses", required=True)
    p.add_argument("--params", help="JSON file of detector settings")
    p.add_argument("--output", required=True)
    p.set_defaults(fn=_cmd_regoutlier)

    p = sub.add_parser("bench", help="run a benchmark experiment")
    p.add_argument("--kind", choices=list(EXPERIMENT_KINDS), required=True)
    p.add_argument("--repetitions", type=int, default=100)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--params", help="JSON file of experiment parameters")
    p.add_argument("--output", required=True)
    p.set_defaults(fn=_cmd_bench)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        json.dump({"error": type(exc).__name__, "message": str(exc)},
                  sys.stderr)
        sys.stderr.write("\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
