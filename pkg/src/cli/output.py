"""Report serialization: CSV tables and JSON documents.

CSV: header row, comma separator, LF line endings, floats with 12
significant digits, empty cells for masked or non-finite values.
JSON: sorted keys, two-space indent, non-finite floats written as null.
"""

import csv
import io
import json
import math
import sys
from typing import Any, Optional, Sequence, Union

from pydantic import BaseModel

from src.utils.logging import log, get_logger

MODULE = "output"
logger = get_logger()

Cell = Union[float, int, str, bool, None]


class Table(BaseModel):
    """Column names plus rows of cells in column order."""
    columns: list[str]
    rows: list[list[Cell]]

    def records(self) -> list[dict[str, Cell]]:
        return [dict(zip(self.columns, row)) for row in self.rows]


def format_cell(value: Cell) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            return ""
        return f"{value:.12g}"
    return str(value)


def render_csv(table: Table) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_cell(v) for v in row])
    return buf.getvalue()


def _finite_or_null(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _finite_or_null(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite_or_null(v) for v in value]
    return value


def render_json(payload: Union[BaseModel, Table]) -> str:
    if isinstance(payload, Table):
        data: Any = {"columns": payload.columns, "rows": payload.records()}
    else:
        data = payload.model_dump(mode="python")
    return json.dumps(_finite_or_null(data), sort_keys=True, indent=2, allow_nan=False) + "\n"


def as_table(payload: BaseModel) -> Table:
    """Flatten a report into a table: its ``rows`` when it has them, else one row."""
    rows = getattr(payload, "rows", None)
    if isinstance(rows, list) and rows and isinstance(rows[0], BaseModel):
        columns = list(type(rows[0]).model_fields)
        return Table(columns=columns, rows=[[getattr(r, c) for c in columns] for r in rows])
    data = payload.model_dump(mode="python")
    scalars = {k: v for k, v in data.items() if not isinstance(v, (dict, list, tuple))}
    return Table(columns=list(scalars), rows=[list(scalars.values())])


def emit(payload: Union[BaseModel, Table], fmt: str, out: Optional[str] = None) -> str:
    """Serialize ``payload`` and write it to ``out`` (stdout when None)."""
    if fmt == "csv":
        text = render_csv(payload if isinstance(payload, Table) else as_table(payload))
    else:
        text = render_json(payload)

    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(out, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        log.info(logger, MODULE, "write_done", "Report written",
                 path=out, format=fmt, bytes=len(text.encode("utf-8")))
    return text


def parse_csv(text: str) -> Table:
    """Inverse of render_csv for numeric tables; empty cells come back as None."""
    reader = csv.reader(io.StringIO(text))
    header: Sequence[str] = next(reader)
    rows = [[float(v) if v != "" else None for v in row] for row in reader]
    return Table(columns=list(header), rows=rows)
