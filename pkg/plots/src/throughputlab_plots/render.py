"""Render throughput CSV files into comparison figures.

The input is the shared schema produced by the throughputlab tools (this
package deliberately parses it on its own; the CSV file format is the
interface). One figure is produced per (structure, fixed-parameter
slice) for a chosen x axis (N, P, or k); within a figure each source is
one series with a fixed color: predictions red, benchmark measurements
blue, simulations green.

Points are plotted exactly as present in the files, in file order: no
sorting, no interpolation, no aggregation. File names are deterministic
functions of the slice, and the structural dump (``dump_figures``)
serializes everything a test needs without diffing pixels.
"""

from __future__ import annotations

import csv
import os
import sys
from dataclasses import dataclass, field

CSV_HEADER = [
    "source",
    "structure",
    "N",
    "C",
    "P",
    "k",
    "mix_contains",
    "mix_insert",
    "mix_remove",
    "key_range",
    "prefill",
    "alpha",
    "W",
    "Ri",
    "M",
    "duration_s",
    "throughput_ops_s",
    "seed",
    "host_tag",
]

X_FIELDS = ("N", "P", "k")

SOURCE_COLORS = {"predict": "red", "bench": "blue", "sim": "green"}
SOURCE_ORDER = ("predict", "bench", "sim")

X_LABELS = {
    "N": "workers (N)",
    "P": "parallel section P (cycles)",
    "k": "node capacity (k)",
}

_INT_FIELDS = {"N", "C", "P", "k", "mix_contains", "mix_insert", "mix_remove", "key_range", "W", "Ri", "M", "seed"}
_FLOAT_FIELDS = {"prefill", "alpha", "duration_s", "throughput_ops_s"}

# everything that identifies a workload point; whichever is not the x
# axis must be constant within one figure
_SLICE_FIELDS = ("N", "C", "P", "k", "mix_contains", "mix_insert", "mix_remove", "key_range", "prefill")


class PlotInputError(ValueError):
    """Malformed or non-conforming input CSV."""


@dataclass(frozen=True)
class PlotSpec:
    csv_paths: tuple
    x_field: str
    out_dir: str = "figures"
    image_format: str = "png"

    def __post_init__(self) -> None:
        if self.x_field not in X_FIELDS:
            raise PlotInputError(f"x axis must be one of {X_FIELDS}, got {self.x_field!r}")
        if self.image_format not in ("png", "svg"):
            raise PlotInputError(f"format must be png or svg, got {self.image_format!r}")
        if not self.csv_paths:
            raise PlotInputError("no input CSV files given")


def read_rows(path: str) -> list[dict]:
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise PlotInputError(f"cannot read {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise PlotInputError(f"{path}: empty file") from None
        if header != CSV_HEADER:
            raise PlotInputError(f"{path}: bad header {','.join(header)!r}")
        rows = []
        for lineno, record in enumerate(reader, start=2):
            if not record:
                continue
            if len(record) != len(CSV_HEADER):
                raise PlotInputError(f"{path}: row {lineno} has {len(record)} fields, expected {len(CSV_HEADER)}")
            row = {}
            for name, raw in zip(CSV_HEADER, record):
                if raw == "":
                    row[name] = None
                    continue
                try:
                    if name in _INT_FIELDS:
                        row[name] = int(raw)
                    elif name in _FLOAT_FIELDS:
                        row[name] = float(raw)
                    else:
                        row[name] = raw
                except ValueError:
                    raise PlotInputError(f"{path}: row {lineno}: bad value {raw!r} for {name}") from None
            rows.append(row)
    return rows


def _slice_key(row: dict, x_field: str) -> tuple:
    return tuple((name, row[name]) for name in _SLICE_FIELDS if name != x_field and row[name] is not None)


def _slice_name(structure: str, key: tuple, x_field: str, image_format: str) -> str:
    parts = [structure, f"vs-{x_field}"]
    parts += [f"{name}{value:g}" if isinstance(value, float) else f"{name}{value}" for name, value in key]
    return "_".join(parts) + "." + image_format


def build_figures(spec: PlotSpec) -> list[dict]:
    """Group rows into figure descriptions (no rendering involved)."""
    rows: list[dict] = []
    for path in spec.csv_paths:
        rows.extend(read_rows(path))
    figures: dict[tuple, dict] = {}
    skipped = 0
    for row in rows:
        if row["source"] not in SOURCE_COLORS:
            raise PlotInputError(f"unknown source {row['source']!r}")
        if row[spec.x_field] is None or row["throughput_ops_s"] is None:
            skipped += 1
            continue
        key = (row["structure"], _slice_key(row, spec.x_field))
        fig = figures.setdefault(
            key,
            {
                "structure": row["structure"],
                "fixed": dict(key[1]),
                "file": _slice_name(row["structure"], key[1], spec.x_field, spec.image_format),
                "x_field": spec.x_field,
                "series": {},
            },
        )
        series = fig["series"].setdefault(
            row["source"], {"source": row["source"], "color": SOURCE_COLORS[row["source"]], "x": [], "y": []}
        )
        series["x"].append(row[spec.x_field])
        series["y"].append(row["throughput_ops_s"])
    if skipped:
        print(f"warning: skipped {skipped} rows without {spec.x_field}/throughput values", file=sys.stderr)
    ordered = []
    for key in sorted(figures, key=lambda k: figures[k]["file"]):
        fig = figures[key]
        fig["series"] = [fig["series"][s] for s in SOURCE_ORDER if s in fig["series"]]
        for series in fig["series"]:
            series["points"] = len(series["x"])
        fixed = ", ".join(f"{n}={v}" for n, v in fig["fixed"].items())
        fig["title"] = f"{fig['structure']}: throughput vs {spec.x_field}" + (f" ({fixed})" if fixed else "")
        if spec.x_field == "k":
            ys = [(y, s["x"][i]) for s in fig["series"] for i, y in enumerate(s["y"])]
            fig["max_at"] = max(ys)[1] if ys else None
        ordered.append(fig)
    return ordered


def dump_figures(spec: PlotSpec) -> dict:
    """Structural dump of what render would draw; stable across runs."""
    figures = []
    for fig in build_figures(spec):
        entry = {
            "file": fig["file"],
            "title": fig["title"],
            "structure": fig["structure"],
            "x_field": fig["x_field"],
            "series": [
                {"source": s["source"], "color": s["color"], "points": s["points"], "x": s["x"], "y": s["y"]}
                for s in fig["series"]
            ],
        }
        if "max_at" in fig:
            entry["max_at"] = fig["max_at"]
        figures.append(entry)
    return {"x_field": spec.x_field, "figures": figures}


def render(spec: PlotSpec) -> list[str]:
    """Write one image per slice; returns the paths, skipping empty slices."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    figures = build_figures(spec)
    if not figures:
        print("warning: nothing to plot", file=sys.stderr)
        return []
    os.makedirs(spec.out_dir, exist_ok=True)
    written = []
    for fig in figures:
        plt.figure(figsize=(7, 4.5))
        for series in fig["series"]:
            plt.plot(
                series["x"],
                series["y"],
                marker="o",
                linestyle="-",
                color=series["color"],
                label=series["source"],
            )
        if fig.get("max_at") is not None:
            plt.axvline(fig["max_at"], color="gray", linestyle=":", label=f"max at k={fig['max_at']}")
        plt.xlabel(X_LABELS[spec.x_field])
        plt.ylabel("throughput (ops/s)")
        plt.title(fig["title"])
        plt.legend()
        plt.tight_layout()
        path = os.path.join(spec.out_dir, fig["file"])
        plt.savefig(path)
        plt.close()
        written.append(path)
    return written
