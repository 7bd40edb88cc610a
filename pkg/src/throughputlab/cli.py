"""Command-line entry point: predict, simulate, bench, calibrate, compare, report.

Flags mirror the model's symbols (--W, --Ri, --M, --X, --C, --P, --N,
--alpha, --k). Exit codes: 0 success, 1 domain error (a violated
precondition is named on stderr), 2 usage error. Subcommands that
measure or simulate echo their seed; --csv appends rows in the shared
schema (see schema module).
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from . import bench as bench_mod
from .engine import SimulationError, simulate
from .model import (
    CalibrationError,
    CostModel,
    WorkloadParams,
    crossover_mcs,
    crossover_treiber,
    fit_alpha,
    predict_mcs,
    predict_treiber,
)
from .programs import build_mcs_program, build_treiber_program
from .report import report_files
from .schema import SchemaError, read_csv, row_from_prediction, row_from_sim, write_csv


def _formatter(prog: str) -> argparse.HelpFormatter:
    return argparse.HelpFormatter(prog, width=96)


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, default=1.0, help="machine scale factor (default: 1.0)")
    p.add_argument("--W", type=int, default=1, help="write/RMW cost in cycles (default: 1)")
    p.add_argument("--Ri", type=int, default=1, help="invalidated-read cost in cycles (default: 1)")
    p.add_argument("--M", type=int, default=1, help="shared atomic read cost in cycles (default: 1)")
    p.add_argument("--X", type=int, default=0, help="contended-RMW cost in cycles (default: 0)")


def _add_workload_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--N", type=int, required=True, help="worker count (required)")
    p.add_argument("--C", type=int, default=0, help="critical-section cycles (default: 0)")
    p.add_argument("--P", type=int, default=0, help="parallel-section cycles (default: 0)")


def _add_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--csv", metavar="PATH", default=None, help="append a schema row to PATH (default: none)")
    p.add_argument(
        "--host-tag",
        default=os.environ.get("THROUGHPUTLAB_HOST_TAG", ""),
        help="machine label for CSV rows (default: $THROUGHPUTLAB_HOST_TAG)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="throughputlab",
        description="Concurrency throughput lab: closed-form prediction, schedule simulation, and real-thread benchmarks.",
        formatter_class=_formatter,
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("predict", help="closed-form throughput prediction", formatter_class=_formatter)
    p.add_argument("--structure", choices=("mcs", "treiber"), required=True, help="workload to predict (required)")
    _add_model_flags(p)
    _add_workload_flags(p)
    p.add_argument("--seed", type=int, default=0, help="recorded in CSV rows (default: 0)")
    _add_output_flags(p)

    p = sub.add_parser("simulate", help="deterministic schedule simulation", formatter_class=_formatter)
    p.add_argument("--structure", choices=("mcs", "treiber"), required=True, help="program to simulate (required)")
    _add_model_flags(p)
    _add_workload_flags(p)
    p.add_argument("--horizon", type=int, default=1_000_000, help="simulated cycles (default: 1000000)")
    p.add_argument("--warmup", type=int, default=None, help="cycles excluded from the window (default: horizon//10)")
    p.add_argument("--seed", type=int, default=0, help="tie-break seed, echoed in output (default: 0)")
    _add_output_flags(p)

    p = sub.add_parser("bench", help="real-thread microbenchmark", formatter_class=_formatter)
    p.add_argument("--structure", choices=bench_mod.STRUCTURES, required=True, help="structure under test (required)")
    _add_workload_flags(p)
    p.add_argument("--k", type=int, default=32, help="skip-list node capacity (default: 32)")
    p.add_argument("--mix", default="90/5/5", help="contains/insert/remove percentages (default: 90/5/5)")
    p.add_argument("--key-range", type=int, default=100_000, help="key universe size (default: 100000)")
    p.add_argument("--prefill", type=float, default=0.5, help="fraction of key range preinserted (default: 0.5)")
    p.add_argument("--warmup-s", type=float, default=0.2, help="warmup seconds excluded (default: 0.2)")
    p.add_argument("--duration-s", type=float, default=1.0, help="measured seconds (default: 1.0)")
    p.add_argument("--seed", type=int, default=0, help="per-worker RNG seed base, echoed (default: 0)")
    p.add_argument("--pin-cores", action="store_true", help="pin workers to cores round-robin (default: off)")
    p.add_argument(
        "--switch-interval",
        type=float,
        default=0.1,
        help="sys.setswitchinterval during the run (default: 0.1)",
    )
    _add_output_flags(p)

    p = sub.add_parser("calibrate", help="fit alpha against measured rows", formatter_class=_formatter)
    p.add_argument("--structure", choices=("mcs", "treiber"), required=True, help="workload kind (required)")
    p.add_argument("--records", required=True, metavar="PATH", help="CSV with bench or sim rows (required)")
    _add_model_flags(p)
    p.add_argument(
        "--csv",
        metavar="PATH",
        default=None,
        help="append re-predicted rows at the fitted alpha (default: none)",
    )
    p.add_argument(
        "--host-tag",
        default=os.environ.get("THROUGHPUTLAB_HOST_TAG", ""),
        help="machine label for CSV rows (default: $THROUGHPUTLAB_HOST_TAG)",
    )

    p = sub.add_parser("compare", help="candidate/baseline throughput ratios", formatter_class=_formatter)
    p.add_argument("--baseline", required=True, metavar="PATH", help="baseline bench CSV (required)")
    p.add_argument("--candidate", required=True, metavar="PATH", help="candidate bench CSV (required)")

    p = sub.add_parser("report", help="join CSVs and print errors vs prediction", formatter_class=_formatter)
    p.add_argument("paths", nargs="+", metavar="CSV", help="schema CSV files to join")

    return parser


def _model_from(args) -> CostModel:
    return CostModel(alpha=args.alpha, W=args.W, Ri=args.Ri, M=args.M, X=args.X)


class _RecordView:
    """Adapts a schema Row to the attribute shape fit_alpha consumes."""

    __slots__ = ("N", "C", "P", "throughput_ops_s")

    def __init__(self, row) -> None:
        self.N = row.N
        self.C = row.C if row.C is not None else 0
        self.P = row.P if row.P is not None else 0
        self.throughput_ops_s = row.throughput_ops_s


def _cmd_predict(args) -> int:
    model = _model_from(args)
    w = WorkloadParams(N=args.N, C=args.C, P=args.P)
    prediction = (predict_mcs if args.structure == "mcs" else predict_treiber)(model, w)
    crossover = (
        crossover_mcs(model, args.C, args.N) if args.structure == "mcs" else crossover_treiber(model, args.N)
    )
    print(f"regime={prediction.regime} throughput={prediction.throughput:.6f} crossover_P={crossover}")
    if args.csv:
        write_csv(args.csv, [row_from_prediction(model, w, prediction, args.structure, args.seed, args.host_tag)])
    return 0


def _cmd_simulate(args) -> int:
    model = _model_from(args)
    w = WorkloadParams(N=args.N, C=args.C, P=args.P)
    program = build_mcs_program(args.C, args.P) if args.structure == "mcs" else build_treiber_program(args.P)
    warmup = args.horizon // 10 if args.warmup is None else args.warmup
    result = simulate(program, model, args.N, args.horizon, warmup, seed=args.seed)
    print(
        f"regime={result.regime_observed} throughput_per_cycle={result.throughput_per_cycle:.6f} "
        f"throughput_ops_s={result.throughput_ops_s:.6f} ops={result.total_ops} "
        f"wait_fraction={result.wait_fraction:.3f} cas_failures={result.cas_failures} seed={result.seed}"
    )
    if args.csv:
        write_csv(args.csv, [row_from_sim(result, args.host_tag)])
    return 0


def _parse_mix(text: str) -> tuple[int, int, int]:
    parts = text.split("/")
    if len(parts) != 3:
        raise ValueError(f"mix must be three percentages like 90/5/5, got {text!r}")
    try:
        a, b, c = (int(p) for p in parts)
    except ValueError:
        raise ValueError(f"mix must be three integers, got {text!r}") from None
    return a, b, c


def _cmd_bench(args) -> int:
    contains, insert, remove = _parse_mix(args.mix)
    cfg = bench_mod.BenchConfig(
        structure=args.structure,
        N=args.N,
        C=args.C,
        P=args.P,
        k=args.k,
        mix_contains=contains,
        mix_insert=insert,
        mix_remove=remove,
        key_range=args.key_range,
        prefill=args.prefill,
        warmup_s=args.warmup_s,
        duration_s=args.duration_s,
        seed=args.seed,
        host_tag=args.host_tag,
        pin_cores=args.pin_cores,
        switch_interval=args.switch_interval,
    )
    record = bench_mod.run_bench(cfg)
    print(
        f"structure={cfg.structure} N={cfg.N} throughput_ops_s={record.throughput_ops_s:.1f} "
        f"measured_s={record.measured_duration_s:.3f} empty_pops={record.empty_pops} seed={cfg.seed}"
    )
    if args.csv:
        write_csv(args.csv, [record.to_row()])
    return 0


def _cmd_calibrate(args) -> int:
    rows = [r for r in read_csv(args.records) if r.structure == args.structure and r.source in ("bench", "sim")]
    if not rows:
        raise CalibrationError(f"{args.records}: no bench/sim rows for structure {args.structure!r}")
    model = _model_from(args)
    fitted = fit_alpha([_RecordView(r) for r in rows], model, args.structure)
    print(f"alpha={fitted.alpha:.10g} records={len(rows)}")
    if args.csv:
        predictor = predict_mcs if args.structure == "mcs" else predict_treiber
        out = []
        for r in rows:
            w = WorkloadParams(N=r.N, C=r.C or 0, P=r.P or 0)
            out.append(
                row_from_prediction(fitted, w, predictor(fitted, w), args.structure, r.seed or 0, args.host_tag)
            )
        write_csv(args.csv, out)
    return 0


class _RowRecord:
    """Presents a CSV row as a comparable bench record."""

    __slots__ = ("config", "throughput_ops_s")

    def __init__(self, row) -> None:
        self.config = bench_mod.BenchConfig(
            structure=row.structure,
            N=row.N,
            C=row.C or 0,
            P=row.P or 0,
            k=row.k or 32,
            mix_contains=row.mix_contains if row.mix_contains is not None else 90,
            mix_insert=row.mix_insert if row.mix_insert is not None else 5,
            mix_remove=row.mix_remove if row.mix_remove is not None else 5,
            key_range=row.key_range or 100_000,
            prefill=row.prefill if row.prefill is not None else 0.5,
            seed=row.seed or 0,
            host_tag=row.host_tag,
        )
        self.throughput_ops_s = row.throughput_ops_s


def _cmd_compare(args) -> int:
    baseline = [_RowRecord(r) for r in read_csv(args.baseline) if r.source == "bench"]
    candidate = [_RowRecord(r) for r in read_csv(args.candidate) if r.source == "bench"]
    report = bench_mod.compare(baseline, candidate)
    print(report.summary())
    return 0


def _cmd_report(args) -> int:
    report_files(args.paths)
    return 0


_COMMANDS = {
    "predict": _cmd_predict,
    "simulate": _cmd_simulate,
    "bench": _cmd_bench,
    "calibrate": _cmd_calibrate,
    "compare": _cmd_compare,
    "report": _cmd_report,
}


def dispatch(argv: list[str]) -> int:
    """Parse and run; returns the process exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, SimulationError, CalibrationError, SchemaError, bench_mod.HarnessError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
