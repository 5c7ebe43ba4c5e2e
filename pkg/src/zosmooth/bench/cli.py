"""``zo`` command line: run, plan, compare-estimators, parse."""

from __future__ import annotations

import argparse
import json
import os
import sys

from ..estimators import EstimatorError
from ..oracles import OracleError
from ..problems import DataError, ProblemError, load_libsvm
from ..smoothing import PlanError, plan_report
from ..solvers import SolverError
from .config import ConfigError, load_config
from .runner import compare_estimators, run_experiment

EXIT_OK, EXIT_CONFIG, EXIT_DATA = 0, 2, 3
WORKERS_ENV = "ZO_WORKERS"


def _seed_list(text: str) -> list[int]:
    try:
        seeds = [int(s) for s in text.replace(" ", "").split(",") if s]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed list {text!r}") from None
    if not seeds:
        raise argparse.ArgumentTypeError("seed list is empty")
    return seeds


def _default_workers() -> int | None:
    raw = os.environ.get(WORKERS_ENV)
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None


def _load(args):
    cfg = load_config(args.config)
    workers = args.workers if args.workers is not None else _default_workers()
    return cfg.with_overrides(seeds=args.seed_list, workers=workers, output=args.out,
                              max_batch=args.max_batch)


def cmd_run(args) -> int:
    res = run_experiment(_load(args))
    s = res.summary
    for r in s["runs"]:
        flag = f"  aborted at {r['abort_iteration']}: {r['abort_reason']}" if r["aborted"] else ""
        print(f"seed {r['seed']}: final {r['final_objective']!r} after {r['oracle_calls']} calls{flag}")
    print(f"wrote {res.csv_path}")
    return EXIT_OK


def cmd_compare(args) -> int:
    rep = compare_estimators(_load(args))
    print(f"threshold {rep['threshold']:.6g} (f0 {rep['f0']:.6g}), call budget {rep['call_budget']}")
    for name, r in rep["schemes"].items():
        print(f"{name:14s} calls/iter {r['calls_per_iteration']}  final {r['final_mean_objective']:.6g}"
              f"  calls to threshold {r['calls_to_threshold']}")
    return EXIT_OK


def cmd_plan(args) -> int:
    rep = plan_report(args.eps, args.M, args.M2, args.R, args.p, args.d, max_batch=args.max_batch)
    if args.json:
        print(json.dumps({k: v for k, v in rep.items() if k != "text"}, indent=2, default=str))
    else:
        print(rep["text"])
    return EXIT_OK


def cmd_parse(args) -> int:
    ds = load_libsvm(args.file, d=args.d)
    kind = "classification (+/-1)" if ds.is_classification else "regression"
    storage = "sparse" if ds.is_sparse else "dense"
    print(f"{args.file}: {ds.n} rows, {ds.d} features, {storage}, {kind} labels")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="zo", description="Gradient-free optimization experiments")
    sub = ap.add_subparsers(dest="command", required=True)

    def with_run_flags(p):
        p.add_argument("config")
        p.add_argument("--seed-list", type=_seed_list, default=None, help="comma separated")
        p.add_argument("--workers", type=int, default=None,
                       help=f"evaluation threads (default: ${WORKERS_ENV} or config)")
        p.add_argument("--out", default=None, help="curve CSV path")
        p.add_argument("--max-batch", type=int, default=None, help="cap on the planned batch size")
        return p

    with_run_flags(sub.add_parser("run", help="run an experiment config")).set_defaults(fn=cmd_run)
    with_run_flags(sub.add_parser("compare-estimators", help="run one config per estimator")
                   ).set_defaults(fn=cmd_compare)

    p = sub.add_parser("plan", help="print smoothing-scheme parameters")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--M", type=float, required=True)
    p.add_argument("--M2", type=float, required=True)
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--max-batch", type=int, default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_plan)

    p = sub.add_parser("parse", help="validate a LibSVM file")
    p.add_argument("file")
    p.add_argument("--d", type=int, default=None, help="force the feature dimension")
    p.set_defaults(fn=cmd_parse)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.fn(args)
    except (DataError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ConfigError, PlanError, EstimatorError, SolverError, ProblemError, OracleError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
