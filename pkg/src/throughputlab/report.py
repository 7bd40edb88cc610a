"""Joins predict/sim/bench CSV rows and tabulates relative errors."""

from __future__ import annotations

import statistics
import sys
from dataclasses import dataclass
from typing import Optional

from .schema import Row, read_csv


@dataclass(frozen=True)
class ReportLine:
    structure: str
    N: Optional[int]
    C: Optional[int]
    P: Optional[int]
    predict: Optional[float]
    sim: Optional[float]
    bench: Optional[float]
    sim_err: Optional[float]
    bench_err: Optional[float]


@dataclass(frozen=True)
class ReportResult:
    lines: tuple
    mape: dict  # (structure, source) -> mean absolute percentage error

    def render(self) -> str:
        header = (
            f"{'structure':<9} {'N':>4} {'C':>7} {'P':>8} "
            f"{'predict':>12} {'sim':>12} {'bench':>12} {'sim_err%':>9} {'bench_err%':>10}"
        )
        out = [header, "-" * len(header)]
        for ln in self.lines:
            out.append(
                f"{ln.structure:<9} {_fmt_int(ln.N):>4} {_fmt_int(ln.C):>7} {_fmt_int(ln.P):>8} "
                f"{_fmt(ln.predict):>12} {_fmt(ln.sim):>12} {_fmt(ln.bench):>12} "
                f"{_fmt_pct(ln.sim_err):>9} {_fmt_pct(ln.bench_err):>10}"
            )
        for (structure, source), value in sorted(self.mape.items()):
            out.append(f"MAPE {structure} {source}-vs-predict: {value * 100:.2f}%")
        return "\n".join(out)


def _fmt(v: Optional[float]) -> str:
    return "" if v is None else f"{v:.6g}"


def _fmt_int(v: Optional[int]) -> str:
    return "" if v is None else str(v)


def _fmt_pct(v: Optional[float]) -> str:
    return "" if v is None else f"{v * 100:.2f}"


def _key(row: Row) -> tuple:
    return (row.structure, row.N, row.C, row.P)


def build_report(rows: list[Row]) -> ReportResult:
    """Group rows by (structure, N, C, P) and compute errors vs predict."""
    groups: dict[tuple, dict[str, list[float]]] = {}
    for row in rows:
        if row.throughput_ops_s is None:
            continue
        groups.setdefault(_key(row), {}).setdefault(row.source, []).append(row.throughput_ops_s)
    lines = []
    errors: dict[tuple, list[float]] = {}
    for key in sorted(groups, key=lambda k: tuple(-1 if v is None else v for v in k[1:])):
        structure, N, C, P = key
        by_source = {src: statistics.fmean(vals) for src, vals in groups[key].items()}
        predict = by_source.get("predict")
        sim = by_source.get("sim")
        bench = by_source.get("bench")
        sim_err = bench_err = None
        if predict:
            if sim is not None:
                sim_err = (sim - predict) / predict
                errors.setdefault((structure, "sim"), []).append(abs(sim_err))
            if bench is not None:
                bench_err = (bench - predict) / predict
                errors.setdefault((structure, "bench"), []).append(abs(bench_err))
        lines.append(ReportLine(structure, N, C, P, predict, sim, bench, sim_err, bench_err))
    mape = {key: statistics.fmean(vals) for key, vals in errors.items()}
    return ReportResult(lines=tuple(lines), mape=mape)


def report_files(paths: list[str], out=None) -> ReportResult:
    rows: list[Row] = []
    for path in paths:
        rows.extend(read_csv(path))
    result = build_report(rows)
    if not result.lines:
        print("warning: no joinable rows found", file=sys.stderr)
    print(result.render(), file=out if out is not None else sys.stdout)
    return result
