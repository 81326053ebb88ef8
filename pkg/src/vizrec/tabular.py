"""Tabular data ingestion, column type inference, and table sketches.

A DataTable is the raw table; a TableSketch is its compressed form
(feature names and types only) that gets embedded into prompts in place
of actual cell values.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

Scalar = Union[str, float, int, None]

MAX_CELLS = 1_000_000

_YEAR_TOKEN = re.compile(r"(^|[_\s-])year([_\s-]|$)|^yr$", re.IGNORECASE)
_ISO_DATE = re.compile(r"^\d{4}-\d{2}-\d{2}([ T]\d{2}:\d{2}(:\d{2})?)?$")
_NUMBER = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")
_FOUR_DIGIT_YEAR = re.compile(r"^\d{4}$")


class ColumnType(str, Enum):
    NOMINAL = "nominal"
    QUANTITATIVE = "quantitative"
    TEMPORAL = "temporal"


class EmptyInputError(ValueError):
    """Raised when CSV input has no header row."""


class RaggedRowError(ValueError):
    """Raised when a CSV row's cell count differs from the header.

    `line` is the 1-based data-row ordinal (the header is row 0).
    """

    def __init__(self, line: int) -> None:
        super().__init__(f"data row {line} has wrong number of cells")
        self.line = line


class EncodingError(ValueError):
    """Raised when input bytes are not valid UTF-8 text."""


class TableTooLargeError(ValueError):
    """Raised when the table exceeds the configured cell budget."""


@dataclass(frozen=True)
class TableSketch:
    """Compact table representation: feature names/types, no cell data."""

    table_name: str
    features: tuple[tuple[str, ColumnType], ...]
    row_count: int

    def feature_names(self) -> list[str]:
        return [name for name, _ in self.features]

    def type_of(self, column: str) -> Optional[ColumnType]:
        for name, ctype in self.features:
            if name == column:
                return ctype
        return None

    def to_dict(self) -> dict:
        return {
            "table_name": self.table_name,
            "features": [{"name": n, "type": t.value} for n, t in self.features],
            "row_count": self.row_count,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TableSketch":
        return cls(
            table_name=data["table_name"],
            features=tuple(
                (f["name"], ColumnType(f["type"])) for f in data["features"]
            ),
            row_count=data["row_count"],
        )


@dataclass(frozen=True)
class DataTable:
    """An immutable table: ordered typed columns plus rows of scalars."""

    name: str
    columns: tuple[tuple[str, ColumnType], ...]
    rows: tuple[tuple[Scalar, ...], ...] = field(default=())

    def __post_init__(self) -> None:
        names = [n for n, _ in self.columns]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate column names in table {self.name!r}")
        width = len(self.columns)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise ValueError(f"row {i} has {len(row)} cells, expected {width}")

    def column_names(self) -> list[str]:
        return [n for n, _ in self.columns]

    def column_index(self, name: str) -> int:
        for i, (n, _) in enumerate(self.columns):
            if n == name:
                return i
        raise KeyError(name)

    def column_values(self, name: str) -> list[Scalar]:
        idx = self.column_index(name)
        return [row[idx] for row in self.rows]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "columns": [{"name": n, "type": t.value} for n, t in self.columns],
            "rows": [list(row) for row in self.rows],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False)

    @classmethod
    def from_dict(cls, data: dict) -> "DataTable":
        return cls(
            name=data["name"],
            columns=tuple((c["name"], ColumnType(c["type"])) for c in data["columns"]),
            rows=tuple(tuple(row) for row in data["rows"]),
        )


def infer_column_type(values: list[str], header: str = "") -> ColumnType:
    """Infer a column's type from its raw string values.

    Empty strings count as nulls. Quantitative wins when every non-null
    value is numeric and the temporal rule does not apply; temporal when
    values are ISO dates, or 4-digit integers in [1500, 2100] under a
    year-like header; nominal otherwise. All-null columns are nominal.
    """
    non_null = [v for v in values if v != ""]
    if not non_null:
        return ColumnType.NOMINAL

    if all(_ISO_DATE.match(v) for v in non_null):
        return ColumnType.TEMPORAL

    if _YEAR_TOKEN.search(header) and all(
        _FOUR_DIGIT_YEAR.match(v) and 1500 <= int(v) <= 2100 for v in non_null
    ):
        return ColumnType.TEMPORAL

    if all(_NUMBER.match(v) for v in non_null):
        return ColumnType.QUANTITATIVE

    return ColumnType.NOMINAL


def _coerce(raw: str, ctype: ColumnType) -> Scalar:
    if raw == "":
        return None
    if ctype is ColumnType.QUANTITATIVE:
        num = float(raw)
        return int(num) if num.is_integer() and "." not in raw and "e" not in raw.lower() else num
    return raw


def load_csv(data: bytes, name: str, max_cells: int = MAX_CELLS) -> DataTable:
    """Parse RFC-4180 CSV bytes into a typed DataTable.

    The first row is the header; column types come from infer_column_type
    applied per column. Empty cells become nulls.
    """
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise EncodingError(f"input is not valid UTF-8: {exc}") from exc

    reader = csv.reader(io.StringIO(text))
    records = [row for row in reader]
    if not records or not any(cell.strip() for cell in records[0]):
        raise EmptyInputError("CSV input has no header row")

    header = records[0]
    body = records[1:]
    for i, row in enumerate(body):
        if len(row) != len(header):
            raise RaggedRowError(i + 1)

    if len(header) * len(body) > max_cells:
        raise TableTooLargeError(
            f"table has {len(header) * len(body)} cells, limit {max_cells}"
        )

    col_types = []
    for ci, col_name in enumerate(header):
        raw_values = [row[ci] for row in body]
        col_types.append(infer_column_type(raw_values, header=col_name))

    rows = tuple(
        tuple(_coerce(row[ci], col_types[ci]) for ci in range(len(header)))
        for row in body
    )
    return DataTable(
        name=name,
        columns=tuple(zip(header, col_types)),
        rows=rows,
    )


def sketch(table: DataTable) -> TableSketch:
    """Compress a table to its feature list; no cell values escape."""
    return TableSketch(
        table_name=table.name,
        features=table.columns,
        row_count=len(table.rows),
    )
