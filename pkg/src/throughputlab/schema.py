"""Shared CSV schema for prediction, simulation, and benchmark rows.

One fixed header; fields that do not apply to a row stay empty. Numbers
use '.' decimals and no quoting, so files concatenate and re-parse
cleanly. All emitters (CLI, benchmark harness, sweep scripts) and all
consumers (report, comparison, the plotting tool) speak exactly this.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, fields
from typing import Iterable, Optional

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

SOURCES = ("bench", "sim", "predict")


class SchemaError(ValueError):
    """Raised for files that do not conform to the shared schema."""


@dataclass
class Row:
    source: str
    structure: str
    N: Optional[int] = None
    C: Optional[int] = None
    P: Optional[int] = None
    k: Optional[int] = None
    mix_contains: Optional[int] = None
    mix_insert: Optional[int] = None
    mix_remove: Optional[int] = None
    key_range: Optional[int] = None
    prefill: Optional[float] = None
    alpha: Optional[float] = None
    W: Optional[int] = None
    Ri: Optional[int] = None
    M: Optional[int] = None
    duration_s: Optional[float] = None
    throughput_ops_s: Optional[float] = None
    seed: Optional[int] = None
    host_tag: str = ""


_INT_FIELDS = {"N", "C", "P", "k", "mix_contains", "mix_insert", "mix_remove", "key_range", "W", "Ri", "M", "seed"}
_FLOAT_FIELDS = {"prefill", "alpha", "duration_s", "throughput_ops_s"}

assert [f.name for f in fields(Row)] == CSV_HEADER


def _format(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def write_csv(path: str, rows: Iterable[Row]) -> None:
    """Append rows, creating the header when the file is new or empty.

    An existing file must already carry the shared header.
    """
    exists = os.path.exists(path) and os.path.getsize(path) > 0
    if exists:
        with open(path, newline="") as fh:
            first = fh.readline().strip()
        if first.split(",") != CSV_HEADER:
            raise SchemaError(f"{path}: existing header {first!r} does not match the shared schema")
    try:
        with open(path, "a", newline="") as fh:
            writer = csv.writer(fh)
            if not exists:
                writer.writerow(CSV_HEADER)
            for row in rows:
                writer.writerow([_format(getattr(row, name)) for name in CSV_HEADER])
    except OSError as exc:
        raise SchemaError(f"cannot write {path}: {exc}") from exc


def read_csv(path: str) -> list[Row]:
    """Parse a schema file; raises SchemaError naming the offending row."""
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, expected header {','.join(CSV_HEADER)}") from None
        if header != CSV_HEADER:
            raise SchemaError(f"{path}: bad header {','.join(header)!r}")
        rows = []
        for lineno, record in enumerate(reader, start=2):
            if not record:
                continue
            if len(record) != len(CSV_HEADER):
                raise SchemaError(f"{path}: row {lineno} has {len(record)} fields, expected {len(CSV_HEADER)}")
            kwargs = {}
            for name, raw in zip(CSV_HEADER, record):
                if raw == "":
                    kwargs[name] = None if name != "host_tag" else ""
                    continue
                try:
                    if name in _INT_FIELDS:
                        kwargs[name] = int(raw)
                    elif name in _FLOAT_FIELDS:
                        kwargs[name] = float(raw)
                    else:
                        kwargs[name] = raw
                except ValueError:
                    raise SchemaError(f"{path}: row {lineno}: bad value {raw!r} for {name}") from None
            rows.append(Row(**kwargs))
    return rows


def row_from_prediction(model, w, prediction, structure: str, seed: int = 0, host_tag: str = "") -> Row:
    return Row(
        source="predict",
        structure=structure,
        N=w.N,
        C=w.C if structure == "mcs" else None,
        P=w.P,
        alpha=model.alpha,
        W=model.W,
        Ri=model.Ri if structure == "mcs" else None,
        M=model.M if structure == "treiber" else None,
        throughput_ops_s=prediction.throughput,
        seed=seed,
        host_tag=host_tag,
    )


def row_from_sim(result, host_tag: str = "") -> Row:
    model = result.model
    structure = result.structure
    return Row(
        source="sim",
        structure=structure,
        N=result.N,
        C=result.C if structure == "mcs" else None,
        P=result.P,
        alpha=model.alpha,
        W=model.W,
        Ri=model.Ri if structure == "mcs" else None,
        M=model.M if structure == "treiber" else None,
        throughput_ops_s=result.throughput_ops_s,
        seed=result.seed,
        host_tag=host_tag,
    )
