"""Command-line driver.

Subcommands: analyze (full curve analysis with artifacts and plots), dif
(group comparison), simulate (synthetic data from parametric items), and
cv-curve (cross-validation bandwidth profiles). Every flag can be defaulted
through an IRTSMOOTH_<FLAG> environment variable for CI use.
"""

from __future__ import annotations

import argparse
import os
import sys

from .data import MissingMode
from .errors import IrtSmoothError
from .kernel import Kernel
from .runner import (AnalysisConfig, run_analysis, run_cv_curve, run_dif,
                     run_simulate)

ENV_PREFIX = "IRTSMOOTH_"


def _env_default(flag: str, fallback):
    return os.environ.get(ENV_PREFIX + flag.upper().replace("-", "_"), fallback)


def _add_dataset_args(parser: argparse.ArgumentParser):
    parser.add_argument("dataset", help="response CSV (header row of item labels)")
    parser.add_argument("--format", dest="formats",
                        default=_env_default("format", None),
                        help="item format, scalar or comma list: 1|mc, 2|rating, 3|nominal")
    parser.add_argument("--key", default=_env_default("key", None),
                        help="key sidecar file (one integer per item)")
    parser.add_argument("--weights", default=_env_default("weights", None),
                        help="explicit weight table file (m_j values per item line)")
    parser.add_argument("--option-counts", default=_env_default("option_counts", None),
                        help="option-count sidecar file (one integer per item)")
    parser.add_argument("--missing-token", default=_env_default("missing_token", "NA"),
                        help="cell text marking a missing answer")


def _add_analysis_args(parser: argparse.ArgumentParser):
    parser.add_argument("--kernel", choices=[k.value for k in Kernel],
                        default=_env_default("kernel", "gaussian"))
    parser.add_argument("--bandwidth", default=_env_default("bandwidth", "rot"),
                        help='"rot", "cv", or a comma list of per-item values')
    parser.add_argument("--nevalpoints", type=int,
                        default=int(_env_default("nevalpoints", 51)))
    parser.add_argument("--evalpoints", default=_env_default("evalpoints", None),
                        help="file of explicit evaluation points (one per line)")
    parser.add_argument("--theta-dist", default=_env_default("theta_dist", "normal:0,1"),
                        help="latent distribution, e.g. normal:0,1 | uniform:0,1 | logistic:0,1")
    parser.add_argument("--miss", choices=[m.value for m in MissingMode],
                        default=_env_default("miss", "option"))
    parser.add_argument("--na-weight", type=float,
                        default=float(_env_default("na_weight", 0.0)),
                        help="weight of the synthetic missing option")
    parser.add_argument("--alpha", type=float,
                        default=float(_env_default("alpha", 0.05)))
    parser.add_argument("--axis", choices=["scores", "distribution"],
                        default=_env_default("axis", "scores"))
    parser.add_argument("--seed", type=int, default=int(_env_default("seed", 0)))
    parser.add_argument("--rank-stat", choices=["total", "mean", "median"],
                        default=_env_default("rank_stat", "total"))
    parser.add_argument("--items", default=_env_default("items", None),
                        help="comma list of 1-based item numbers to plot/export")
    parser.add_argument("--subjects", default=_env_default("subjects", None),
                        help="comma list of 1-based subject numbers for RCC plots")
    parser.add_argument("--exact", action="store_true",
                        help="use the exact (unbinned) estimator")
    parser.add_argument("--out", required=True, help="output directory")


def _int_list(text: str | None) -> tuple[int, ...] | None:
    if text is None or text == "":
        return None
    return tuple(int(tok) for tok in text.split(",") if tok.strip())


def _config_from(args, plots: tuple[str, ...]) -> AnalysisConfig:
    eval_points = None
    if args.evalpoints:
        with open(args.evalpoints, "r", encoding="utf-8") as fh:
            eval_points = tuple(float(tok) for tok in fh.read().split())
    return AnalysisConfig(
        out_dir=args.out,
        kernel=Kernel(args.kernel),
        bandwidth=args.bandwidth,
        theta_dist=args.theta_dist,
        n_eval_points=args.nevalpoints,
        eval_points=eval_points,
        miss=MissingMode(args.miss),
        na_weight=args.na_weight,
        seed=args.seed,
        alpha=args.alpha,
        axis=args.axis,
        plots=plots,
        items=_int_list(args.items),
        subjects=_int_list(args.subjects),
        rank_stat=args.rank_stat,
        exact=args.exact,
        min_group_size=int(_env_default("min_group_size", 30)),
    )


def _dataset_kwargs(args) -> dict:
    return {
        "formats": args.formats,
        "key_path": args.key,
        "weights_path": args.weights,
        "counts_path": args.option_counts,
        "missing_token": args.missing_token,
    }


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="irtsmooth",
        description="Kernel-smoothing item response theory analysis")
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="estimate curves and emit artifacts")
    _add_dataset_args(analyze)
    _add_analysis_args(analyze)
    analyze.add_argument("--plot", default=_env_default("plot", ""),
                         help="comma list: occ,eis,ets,sd,density,rcc,"
                              "triangle,tetrahedron,pca")

    dif = sub.add_parser("dif", help="group-wise curves and comparisons")
    _add_dataset_args(dif)
    _add_analysis_args(dif)
    dif.add_argument("--groups", required=True,
                     help="grouping column name in the dataset, or a label "
                          "file (one label per subject)")
    dif.add_argument("--plot", default=_env_default("plot", ""),
                     help="comma list: expected,density,occ,eis")

    cv = sub.add_parser("cv-curve", help="emit CV(h) profiles per item")
    _add_dataset_args(cv)
    _add_analysis_args(cv)

    sim = sub.add_parser("simulate", help="sample responses from parametric items")
    sim.add_argument("--items", required=True, help="item spec JSON file")
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--seed", type=int, default=int(_env_default("seed", 0)))
    sim.add_argument("--out", required=True, help="output CSV path")
    sim.add_argument("--key-out", default=None,
                     help="also write the key sidecar here")
    sim.add_argument("--truth-out", default=None,
                     help="also write true abilities and item parameters (JSON)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "analyze":
            plots = tuple(t for t in args.plot.split(",") if t.strip())
            config = _config_from(args, plots)
            run_analysis(config, args.dataset, **_dataset_kwargs(args))
        elif args.command == "dif":
            plots = tuple(t for t in args.plot.split(",") if t.strip())
            config = _config_from(args, plots)
            run_dif(config, args.dataset, groups=args.groups,
                    **_dataset_kwargs(args))
        elif args.command == "cv-curve":
            config = _config_from(args, ())
            run_cv_curve(config, args.dataset, **_dataset_kwargs(args))
        elif args.command == "simulate":
            run_simulate(args.items, args.n, args.seed, args.out,
                         key_out=args.key_out, truth_out=args.truth_out)
    except IrtSmoothError as exc:
        print(f"error: {exc.diagnostic()}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
