"""Execute a spec against a table: filter, bin, group/aggregate, sort, topk.

Semantics, fixed for determinism:
- filter comparisons against null cells are false; numbers compare
  numerically, strings lexicographically; type-mismatched operands are
  equal-never (so `=` is false and `!=` is true);
- grouping keys on the (possibly binned) x column, plus color when present;
- count counts rows; mean/sum/min/max skip nulls (sum of none is 0, the
  others yield null);
- grouped output is ordered by group key ascending (nulls first) before any
  explicit sort clause applies; sorting is stable, topk keeps the first k.
"""

from __future__ import annotations

import datetime
from typing import Optional

from ..tabular import ColumnType, DataTable, Scalar
from .spec import Aggregate, BinUnit, Comparison, Mark, Predicate, SortAxis, SortDir, VegaZeroSpec

COUNT_COLUMN = "count"


class EvalError(ValueError):
    """A filter predicate references a column missing from the table."""


def _compare(cell: Scalar, op: str, literal) -> bool:
    if cell is None:
        return False
    cell_num = isinstance(cell, (int, float)) and not isinstance(cell, bool)
    lit_num = isinstance(literal, (int, float)) and not isinstance(literal, bool)
    if cell_num != lit_num:
        return op == "!="
    if op == "=":
        return cell == literal
    if op == "!=":
        return cell != literal
    if op == "<":
        return cell < literal
    if op == "<=":
        return cell <= literal
    if op == ">":
        return cell > literal
    return cell >= literal


def _matches(row: tuple[Scalar, ...], pred: Predicate, index: dict[str, int]) -> bool:
    def holds(comp: Comparison) -> bool:
        if comp.column not in index:
            raise EvalError(f"filter references unknown column {comp.column!r}")
        return _compare(row[index[comp.column]], comp.op, comp.value)

    return any(all(holds(c) for c in group) for group in pred.groups)


def bin_value(value: Scalar, unit: BinUnit) -> Optional[int]:
    """Project a temporal cell onto a calendar unit (ints; weekday 1=Mon)."""
    if value is None:
        return None
    if isinstance(value, (int, float)):
        return int(value) if unit is BinUnit.YEAR else None
    text = str(value)
    try:
        if unit is BinUnit.YEAR:
            return int(text[:4])
        date = datetime.date.fromisoformat(text[:10])
    except ValueError:
        return None
    if unit is BinUnit.MONTH:
        return date.month
    return date.isoweekday()


def _order_key(value: Scalar):
    return (value is not None, "" if value is None else value)


def _aggregate(values: list[Scalar], aggregate: Aggregate) -> Scalar:
    if aggregate is Aggregate.COUNT:
        return len(values)
    present = [v for v in values if v is not None]
    if aggregate is Aggregate.SUM:
        return sum(present) if present else 0
    if not present:
        return None
    if aggregate is Aggregate.MEAN:
        return sum(present) / len(present)
    if aggregate is Aggregate.MIN:
        return min(present)
    return max(present)


def execute(spec: VegaZeroSpec, table: DataTable) -> DataTable:
    """Materialize the spec's data view; caller must have validated."""
    index = {name: i for i, (name, _) in enumerate(table.columns)}
    for column in spec.referenced_columns():
        if column not in index:
            raise EvalError(f"spec references unknown column {column!r}")
    types = dict(table.columns)

    rows = list(table.rows)
    if spec.filter:
        rows = [r for r in rows if _matches(r, spec.filter, index)]

    xi, yi = index[spec.x], index[spec.y]
    ci = index[spec.color] if spec.color else None

    def x_of(row: tuple[Scalar, ...]) -> Scalar:
        value = row[xi]
        return bin_value(value, spec.bin_unit) if spec.bin_unit else value

    if spec.aggregate is not Aggregate.NONE:
        groups: dict[tuple, list[Scalar]] = {}
        for row in rows:
            key = (x_of(row),) + ((row[ci],) if ci is not None else ())
            groups.setdefault(key, []).append(row[yi])
        ordered = sorted(groups.items(), key=lambda kv: tuple(_order_key(p) for p in kv[0]))
        out_rows = [
            (key[0], _aggregate(values, spec.aggregate)) + key[1:]
            for key, values in ordered
        ]
    else:
        out_rows = [
            (x_of(row), row[yi]) + ((row[ci],) if ci is not None else ())
            for row in rows
        ]

    if spec.sort:
        axis, direction = spec.sort
        col = 0 if axis is SortAxis.X else 1
        out_rows.sort(key=lambda r: _order_key(r[col]), reverse=direction is SortDir.DESC)

    if spec.topk is not None:
        out_rows = out_rows[: spec.topk]

    x_type = ColumnType.QUANTITATIVE if spec.bin_unit else types[spec.x]
    if spec.aggregate is Aggregate.COUNT:
        y_name = COUNT_COLUMN if spec.x != COUNT_COLUMN else "count_y"
        y_type = ColumnType.QUANTITATIVE
    else:
        y_name = spec.y
        y_type = ColumnType.QUANTITATIVE if spec.aggregate is not Aggregate.NONE else types[spec.y]

    columns = [(spec.x, x_type), (y_name, y_type)]
    if spec.color:
        if spec.color in (spec.x, y_name):
            # The color channel re-reads an existing output column; a third
            # copy would make the inline data ambiguous.
            out_rows = [row[:2] for row in out_rows]
        else:
            columns.append((spec.color, types[spec.color]))

    return DataTable(name=table.name, columns=tuple(columns), rows=tuple(out_rows))
