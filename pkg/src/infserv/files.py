"""Scenario and failure-log file loading."""
from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any

from .net import NetworkSpec
from .repair import RepairScenario, scenario_from_dict

LOG_HEADER = ["timestamp_weeks", "site", "transported"]


class InputError(ValueError):
    """Unreadable or malformed input file."""


def load_json(path: str | Path) -> dict[str, Any]:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None


def is_network(obj: dict[str, Any]) -> bool:
    return "nodes" in obj and "routing" in obj


def load_network(path: str | Path) -> NetworkSpec:
    obj = load_json(path)
    if not is_network(obj):
        raise InputError(f"{path}: network file needs 'nodes' and 'routing'")
    nodes, routing = obj["nodes"], obj["routing"]
    if not isinstance(routing, list) or len(routing) != len(nodes):
        raise InputError(f"{path}: routing has {len(routing)} rows for {len(nodes)} nodes")
    for i, row in enumerate(routing):
        if not isinstance(row, list) or len(row) != len(nodes):
            n = len(row) if isinstance(row, list) else "no"
            raise InputError(f"{path}: routing row {i + 1} has {n} entries, expected {len(nodes)}")
    for i, node in enumerate(nodes):
        if "service" not in node:
            raise InputError(f"{path}: node {i + 1} has no 'service'")
    try:
        return NetworkSpec.from_dict(obj)
    except (ValueError, TypeError, KeyError) as exc:
        raise InputError(f"{path}: {exc}") from None


def load_scenario(path: str | Path) -> tuple[RepairScenario, list[float]]:
    obj = load_json(path)
    try:
        return scenario_from_dict(obj)
    except (ValueError, TypeError, KeyError) as exc:
        raise InputError(f"{path}: {exc}") from None


_TRUE = {"1", "true", "yes", "y", "t"}
_FALSE = {"0", "false", "no", "n", "f", ""}


def read_failure_log(path: str | Path) -> list[tuple[float, str, bool]]:
    """Parse a failure log CSV; every problem is reported with its line number."""
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != LOG_HEADER:
            raise InputError(f"{path}: line 1: header must be {','.join(LOG_HEADER)}")
        events = []
        errors = []
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                errors.append(f"line {line}: expected 3 fields, got {len(row)}")
                continue
            ts, site, tr = (c.strip() for c in row)
            try:
                t = float(ts)
            except ValueError:
                errors.append(f"line {line}: bad timestamp {ts!r}")
                continue
            site = site.lower()
            if site not in ("base", "station"):
                errors.append(f"line {line}: site must be base or station, got {site!r}")
                continue
            flag = tr.lower()
            if flag not in _TRUE | _FALSE:
                errors.append(f"line {line}: bad transported flag {tr!r}")
                continue
            events.append((t, site, flag in _TRUE))
    if errors:
        raise InputError(f"{path}:\n  " + "\n  ".join(errors))
    return events


def write_failure_log(path: str | Path, events) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(LOG_HEADER)
        for t, site, tr in events:
            w.writerow([repr(float(t)), site, "true" if tr else "false"])
