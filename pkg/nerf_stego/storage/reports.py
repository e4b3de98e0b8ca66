"""CSV and JSON export of sweep and capacity reports."""

import csv
import io
import json
from dataclasses import asdict, fields
from pathlib import Path
from typing import Any, Sequence, Union

from ..models import CapacityRow, SweepReport, SweepRow

PathLike = Union[str, Path]

SWEEP_COLUMNS = tuple(f.name for f in fields(SweepRow))
CAPACITY_COLUMNS = tuple(f.name for f in fields(CapacityRow))


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _csv_text(columns: Sequence[str], rows: Sequence[dict[str, Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row[c]) for c in columns])
    return buffer.getvalue()


def sweep_csv(report: SweepReport) -> str:
    """theta_deg,phi_deg,offset_deg,acc,rs_bpp with one line per offset."""
    return _csv_text(SWEEP_COLUMNS, [asdict(r) for r in report.rows])


def sweep_json(report: SweepReport) -> str:
    payload = {
        "axis": report.axis,
        "depth": report.depth,
        "rows": [asdict(r) for r in report.rows],
    }
    return json.dumps(payload, indent=2) + "\n"


def capacity_csv(rows: Sequence[CapacityRow]) -> str:
    return _csv_text(CAPACITY_COLUMNS, [asdict(r) for r in rows])


def capacity_json(rows: Sequence[CapacityRow]) -> str:
    return json.dumps({"rows": [asdict(r) for r in rows]}, indent=2) + "\n"


def write_report(path: PathLike, report: Union[SweepReport, Sequence[CapacityRow]]) -> Path:
    """Write a sweep or capacity report; ``.json`` selects JSON, anything else CSV."""
    path = Path(path)
    as_json = path.suffix.lower() == ".json"
    if isinstance(report, SweepReport):
        text = sweep_json(report) if as_json else sweep_csv(report)
    else:
        text = capacity_json(report) if as_json else capacity_csv(report)
    path.write_text(text)
    return path


__all__ = [
    "SWEEP_COLUMNS",
    "CAPACITY_COLUMNS",
    "sweep_csv",
    "sweep_json",
    "capacity_csv",
    "capacity_json",
    "write_report",
]
