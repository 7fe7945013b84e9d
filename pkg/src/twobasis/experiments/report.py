"""CSV and JSON serialization of sweep results."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from .sweeps import CSV_COLUMNS, SweepResult

__all__ = ["ReportIOError", "to_csv", "to_json", "emit_report", "load_result"]


class ReportIOError(OSError):
    """Reading or writing a report failed; the message names the path."""


def to_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in result.rows:
        writer.writerow([_cell(getattr(row, c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def _cell(value):
    return repr(value) if isinstance(value, float) else value


def to_json(result: SweepResult) -> str:
    return json.dumps(result.to_dict(), indent=2, sort_keys=True) + "\n"


def emit_report(result: SweepResult, format: str, path) -> Path:
    """Write ``result`` as ``csv`` or ``json`` to ``path`` and return the path."""
    if format not in ("csv", "json"):
        raise ValueError(f"unknown report format {format!r}")
    path = Path(path)
    text = to_csv(result) if format == "csv" else to_json(result)
    try:
        path.write_text(text)
    except OSError as exc:
        raise ReportIOError(f"cannot write report to {path}: {exc.strerror or exc}") from exc
    return path


def load_result(path) -> SweepResult:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ReportIOError(f"cannot read results from {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise ReportIOError(f"{path} is not valid JSON: {exc}") from exc
    return SweepResult.from_dict(data)
