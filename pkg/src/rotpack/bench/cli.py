"""Command-line entry point for the benchmark workflows.

Subcommands:
    run          execute a plan into a resumable output tree
    fit          scaling fits from a finished output tree
    crossover    clock-rate crossover estimate from a finished tree
    depth-table  measured vs reference circuit depths
    report       write the CSV/JSON report bundle
"""

from __future__ import annotations

import argparse
import json
import sys

from .orchestrate import load_summaries, run_experiment
from .plans import load_plan
from .reports import (
    compute_fits,
    crossover_report,
    depth_table,
    format_depth_table,
    write_reports,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bench", description="rotamer-packing benchmark driver"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a benchmark plan")
    p_run.add_argument("--plan", required=True, help="plan JSON file")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument(
        "--workers",
        type=int,
        default=None,
        help="trajectory parallelism (default: BENCH_WORKERS or 1)",
    )

    p_fit = sub.add_parser("fit", help="fit cost scaling per series")
    p_fit.add_argument("--in", dest="in_dir", required=True)
    p_fit.add_argument(
        "--fit-start-m",
        type=float,
        default=None,
        help="smallest qubit count included in the fit",
    )

    p_cross = sub.add_parser("crossover", help="estimate the crossover size")
    p_cross.add_argument("--in", dest="in_dir", required=True)
    p_cross.add_argument("--cpu-ghz", type=float, required=True)
    p_cross.add_argument("--qpu-khz", type=float, required=True)
    p_cross.add_argument("--quantum-series", default=None)
    p_cross.add_argument("--classical-series", default=None)
    p_cross.add_argument("--fit-start-m", type=float, default=None)

    p_depth = sub.add_parser(
        "depth-table", help="measured vs reference circuit depths"
    )
    p_depth.add_argument("--max-size", type=int, default=7)

    p_report = sub.add_parser("report", help="write the report bundle")
    p_report.add_argument("--in", dest="in_dir", required=True)
    p_report.add_argument("--fit-start-m", type=float, default=None)
    p_report.add_argument("--cpu-ghz", type=float, default=None)
    p_report.add_argument("--qpu-khz", type=float, default=None)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "run":
        plan = load_plan(args.plan)
        summaries = run_experiment(plan, args.out, workers=args.workers)
        for s in summaries:
            agg = s["aggregate"]
            ratio = agg.get("success_ratio")
            print(
                f"{s['series']:<24} M={s['num_qubits']:<4}"
                f" ratio={ratio if ratio is not None else '-'}"
                f" mean_cost={agg.get('mean_cost')}"
            )
        return 0

    if args.command == "fit":
        summaries = load_summaries(args.in_dir)
        if not summaries:
            print("no cell summaries found", file=sys.stderr)
            return 1
        fits = compute_fits(summaries, fit_start_m=args.fit_start_m)
        print(json.dumps(fits, indent=2, sort_keys=True))
        return 0

    if args.command == "crossover":
        summaries = load_summaries(args.in_dir)
        if not summaries:
            print("no cell summaries found", file=sys.stderr)
            return 1
        try:
            report = crossover_report(
                summaries,
                cpu_ghz=args.cpu_ghz,
                qpu_khz=args.qpu_khz,
                quantum_series=args.quantum_series,
                classical_series=args.classical_series,
                fit_start_m=args.fit_start_m,
            )
        except ValueError as exc:
            print(str(exc), file=sys.stderr)
            return 1
        print(json.dumps(report, indent=2, sort_keys=True))
        return 0

    if args.command == "depth-table":
        rows = depth_table(args.max_size)
        print(format_depth_table(rows))
        return 0

    if args.command == "report":
        summaries = load_summaries(args.in_dir)
        if not summaries:
            print("no cell summaries found", file=sys.stderr)
            return 1
        written = write_reports(
            summaries,
            args.in_dir,
            fit_start_m=args.fit_start_m,
            cpu_ghz=args.cpu_ghz,
            qpu_khz=args.qpu_khz,
        )
        for path in written:
            print(path)
        return 0

    raise AssertionError(f"unhandled command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
