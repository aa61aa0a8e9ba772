"""Deterministic CSV/JSON serialization of flat records.

Floats are written with 17 significant digits so values round-trip
exactly. None becomes an empty CSV cell and JSON null; non-finite floats
become "nan"/"inf" in CSV and null in JSON.
"""

from __future__ import annotations

import csv
import io
import json
import math
import numbers
from typing import Iterable, Sequence

import numpy as np

__all__ = ["format_float", "to_csv", "to_json", "render"]

FORMATS = ("csv", "json")


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def _plain(v):
    """Unwrap numpy scalars so bools and ints format like Python's."""
    if isinstance(v, np.generic):
        return v.item()
    return v


def _csv_cell(v) -> str:
    v = _plain(v)
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format_float(v)
    return str(v)


def _json_value(v) -> str:
    v = _plain(v)
    if isinstance(v, bool) or v is None:
        return json.dumps(v)
    if isinstance(v, float):
        return format_float(v) if math.isfinite(v) else "null"
    if isinstance(v, numbers.Integral):
        return str(int(v))
    return json.dumps(str(v), ensure_ascii=False)


def _columns(records: Sequence[dict]) -> list:
    cols: list = []
    for r in records:
        for k in r:
            if k not in cols:
                cols.append(k)
    return cols


def to_csv(records: Sequence[dict], columns: Iterable[str] | None = None) -> str:
    cols = list(columns) if columns is not None else _columns(records)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in records:
        w.writerow([_csv_cell(r.get(c)) for c in cols])
    return buf.getvalue()


def to_json(records: Sequence[dict], columns: Iterable[str] | None = None) -> str:
    cols = list(columns) if columns is not None else _columns(records)
    lines = []
    for r in records:
        body = ", ".join(f"{json.dumps(c)}: {_json_value(r.get(c))}" for c in cols)
        lines.append("  {" + body + "}")
    if not lines:
        return "[]\n"
    return "[\n" + ",\n".join(lines) + "\n]\n"


def render(records: Sequence[dict], fmt: str, columns: Iterable[str] | None = None) -> str:
    if fmt == "csv":
        return to_csv(records, columns)
    if fmt == "json":
        return to_json(records, columns)
    raise ValueError(f"unknown format {fmt!r}")
