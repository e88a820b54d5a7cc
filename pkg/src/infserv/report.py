"""Tabular reports with full-precision values and display-only rounding."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

from . import __version__

Formatter = Callable[[Any], str]


def fixed(decimals: int) -> Formatter:
    def fmt(v):
        if isinstance(v, float):
            if math.isnan(v):
                return "-"
            return f"{v:.{decimals}f}"
        return str(v)

    return fmt


def sig(digits: int) -> Formatter:
    def fmt(v):
        if isinstance(v, float):
            if math.isnan(v):
                return "-"
            return f"{v:.{digits}g}"
        return str(v)

    return fmt


def as_is(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def file_digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]


@dataclass
class Report:
    kind: str  # "table", "metric-set" or "comparison"
    title: str
    columns: list[str]
    rows: list[list[Any]]
    formats: list[Formatter] | None = None
    provenance: dict[str, Any] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def __post_init__(self):
        n = len(self.columns)
        for i, row in enumerate(self.rows):
            if len(row) != n:
                raise ValueError(f"row {i} has {len(row)} cells, expected {n}")
        if self.formats is None:
            self.formats = [as_is] * n
        self.provenance.setdefault("tool_version", __version__)

    def display_rows(self) -> list[list[str]]:
        return [[f(v) for f, v in zip(self.formats, row)] for row in self.rows]

    def to_text(self) -> str:
        cells = [self.columns] + self.display_rows()
        widths = [max(len(r[i]) for r in cells) for i in range(len(self.columns))]
        lines = [self.title]
        for k, r in enumerate(cells):
            lines.append("  ".join(c.rjust(w) for c, w in zip(r, widths)))
            if k == 0:
                lines.append("  ".join("-" * w for w in widths))
        lines.extend(self.notes)
        prov = ", ".join(f"{k}={v}" for k, v in sorted(self.provenance.items()))
        lines.append(f"[{prov}]")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([_csv_cell(v) for v in row])
        return buf.getvalue()

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "title": self.title,
            "columns": self.columns,
            "rows": [[_json_cell(v) for v in row] for row in self.rows],
            "records": [{c: _json_cell(v) for c, v in zip(self.columns, row)} for row in self.rows],
            "notes": self.notes,
            "provenance": dict(sorted(self.provenance.items())),
        }

    def render(self, fmt: str) -> str:
        if fmt == "text":
            return self.to_text()
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return json.dumps(self.to_dict(), indent=2, allow_nan=True) + "\n"
        raise ValueError(f"unknown output format {fmt!r}")


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _json_cell(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def write_csv(path: str | Path, report: Report) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(report.to_csv())


def read_csv_rows(path: str | Path) -> tuple[list[str], list[list[str]]]:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def render_many(reports: Sequence[Report], fmt: str) -> str:
    if fmt == "json":
        return json.dumps([r.to_dict() for r in reports], indent=2) + "\n"
    sep = "\n" if fmt == "text" else ""
    return sep.join(r.render(fmt) for r in reports)
