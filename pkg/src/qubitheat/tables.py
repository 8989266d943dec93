"""Deterministic table emission: one CSV dialect, one JSON layout.

CSV dialect: comma separator, '.' decimal point, header row, LF line endings,
floats at a fixed number of significant digits.  Identical inputs produce
byte-identical files.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

DEFAULT_PRECISION = 12


@dataclass(frozen=True)
class Table:
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError(
                    f"row width {len(row)} does not match {len(self.columns)} columns"
                )

    def column(self, name: str) -> list:
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]


def format_value(value, precision: int = DEFAULT_PRECISION) -> str:
    if value is None or value == "":
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value)
    v = float(value)
    if v == 0.0:
        v = 0.0  # normalize negative zero
    return format(v, f".{precision}g")


def render_csv(table: Table, precision: int = DEFAULT_PRECISION) -> str:
    lines = [",".join(table.columns)]
    for row in table.rows:
        lines.append(",".join(format_value(v, precision) for v in row))
    return "\n".join(lines) + "\n"


def write_csv(table: Table, path, precision: int = DEFAULT_PRECISION) -> Path:
    path = Path(path)
    path.write_text(render_csv(table, precision), encoding="utf-8", newline="\n")
    return path


def render_json(table: Table, precision: int = DEFAULT_PRECISION) -> str:
    import json

    def convert(value):
        if value is None or value == "":
            return None
        if isinstance(value, (bool, int, str)):
            return value
        return float(format_value(value, precision))

    payload = {
        "columns": list(table.columns),
        "rows": [[convert(v) for v in row] for row in table.rows],
    }
    return json.dumps(payload, separators=(",", ":"), ensure_ascii=True) + "\n"


def write_json(table: Table, path, precision: int = DEFAULT_PRECISION) -> Path:
    path = Path(path)
    path.write_text(render_json(table, precision), encoding="utf-8", newline="\n")
    return path


def write_table(table: Table, path, fmt: str, precision: int = DEFAULT_PRECISION) -> Path:
    if fmt == "csv":
        return write_csv(table, path, precision)
    if fmt == "json":
        return write_json(table, path, precision)
    raise ValueError(f"unknown output format {fmt!r}")
