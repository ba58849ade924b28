"""Byte-stable JSON/CSV serialization of experiment reports."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any


@dataclass
class Table:
    columns: tuple[str, ...]
    rows: list[tuple] = field(default_factory=list)

    def add(self, *row) -> None:
        if len(row) != len(self.columns):
            raise ValueError(f"row has {len(row)} fields, table has {len(self.columns)} columns")
        self.rows.append(tuple(row))


@dataclass
class ExperimentReport:
    command: str
    seed: int
    version: str
    parameters: dict[str, Any] = field(default_factory=dict)
    results: dict[str, Any] = field(default_factory=dict)
    verdicts: dict[str, bool] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    table: Table | None = None

    @property
    def ok(self) -> bool:
        return all(self.verdicts.values())

    def as_dict(self) -> dict[str, Any]:
        out = {
            "command": self.command,
            "version": self.version,
            "seed": self.seed,
            "parameters": self.parameters,
            "results": self.results,
            "verdicts": self.verdicts,
            "warnings": self.warnings,
            "ok": self.ok,
        }
        if self.table is not None:
            out["table"] = {
                "columns": list(self.table.columns),
                "rows": [list(r) for r in self.table.rows],
            }
        return out


def format_float(x: float) -> str:
    """17 significant digits, always with a decimal point or exponent."""
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    s = format(x, ".17g")
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def _json(obj: Any, indent: int) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        s = format_float(obj)
        return json.dumps(s) if not math.isfinite(obj) else s
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(_json(v, indent + 1) for v in obj) + "]"
        items = [inner + _json(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if hasattr(obj, "item"):  # numpy scalar
        return _json(obj.item(), indent)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _csv_cell(v: Any) -> str:
    if hasattr(v, "item"):
        v = v.item()
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format_float(v)
    return str(v)


def emit_report(report: ExperimentReport, fmt: str = "json") -> bytes:
    if fmt == "json":
        return (_json(report.as_dict(), 0) + "\n").encode("utf-8")
    if fmt == "csv":
        if report.table is None:
            raise ValueError("report has no table to write as CSV")
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(report.table.columns)
        for row in report.table.rows:
            writer.writerow([_csv_cell(v) for v in row])
        return buf.getvalue().encode("utf-8")
    raise ValueError(f"unknown report format {fmt!r}")
