"""Tabular report container with CSV and JSON emitters."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import numpy as np

NA = "NA"


def format_number(value: Any) -> str:
    """Positional decimal with 9 significant digits; NA for missing values."""
    if value is None:
        return NA
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    x = float(value)
    if not math.isfinite(x):
        return NA
    if x == 0.0:
        return "0"
    return np.format_float_positional(x, precision=9, unique=False, fractional=False, trim="-")


def _json_value(cell: str) -> Any:
    if cell == NA:
        return None
    try:
        return int(cell)
    except ValueError:
        pass
    try:
        return float(cell)
    except ValueError:
        return cell


@dataclass
class ReportTable:
    columns: Sequence[str]
    rows: list[dict[str, Any]] = field(default_factory=list)
    metadata: dict[str, Any] = field(default_factory=dict)

    def add(self, **row: Any) -> None:
        missing = set(self.columns) - set(row)
        extra = set(row) - set(self.columns)
        if missing or extra:
            raise KeyError(f"row does not match schema: missing={sorted(missing)} extra={sorted(extra)}")
        self.rows.append(row)

    def formatted_rows(self) -> list[list[str]]:
        return [[format_number(row[c]) for c in self.columns] for row in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        writer.writerows(self.formatted_rows())
        return buf.getvalue()

    def to_json(self) -> str:
        rows = [
            {c: _json_value(cell) for c, cell in zip(self.columns, cells)}
            for cells in self.formatted_rows()
        ]
        return json.dumps({"metadata": self.metadata, "columns": list(self.columns), "rows": rows}, indent=2) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        raise ValueError(f"unknown format {fmt!r}")

    def write(self, fmt: str, path: Optional[str]) -> str:
        text = self.render(fmt)
        if path is None or path == "-":
            print(text, end="")
        else:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        return text
