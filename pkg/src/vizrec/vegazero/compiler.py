"""Compile a validated spec plus its table into a Vega-Lite (v5) document.

Transforms are materialized by the executor first, so the emitted document
carries inline data and no aggregate directives. Arc marks encode the y
column on theta and the x column on color.
"""

from __future__ import annotations

import json

from ..tabular import ColumnType, DataTable, sketch
from .executor import execute
from .spec import Aggregate, Mark, SortAxis, SortDir, VegaZeroSpec
from .validate import Violation, validate

VEGA_LITE_SCHEMA = "https://vega.github.io/schema/vega-lite/v5.json"

VegaLiteDoc = dict


class CompileError(ValueError):
    def __init__(self, violations: list[Violation]) -> None:
        details = "; ".join(f"{v.code.value} at {v.location}: {v.message}" for v in violations)
        super().__init__(f"spec does not validate: {details}")
        self.violations = violations


def _channel_type(column_type: ColumnType) -> str:
    return column_type.value


def compile_spec(spec: VegaZeroSpec, table: DataTable) -> VegaLiteDoc:
    violations = validate(spec, sketch(table))
    if violations:
        raise CompileError(violations)

    executed = execute(spec, table)
    names = executed.column_names()
    values = [dict(zip(names, row)) for row in executed.rows]

    col_types = dict(executed.columns)
    x_name, y_name = names[0], names[1]

    x_channel: dict = {
        "field": x_name,
        "type": "ordinal" if spec.bin_unit else _channel_type(col_types[x_name]),
    }
    if spec.sort:
        axis, direction = spec.sort
        if axis is SortAxis.X:
            x_channel["sort"] = "ascending" if direction is SortDir.ASC else "descending"
        else:
            x_channel["sort"] = "y" if direction is SortDir.ASC else "-y"

    y_channel = {"field": y_name, "type": _channel_type(col_types[y_name])}

    encoding: dict
    if spec.mark is Mark.ARC:
        encoding = {"theta": y_channel, "color": x_channel}
    else:
        encoding = {"x": x_channel, "y": y_channel}
        if spec.color:
            encoding["color"] = {
                "field": spec.color,
                "type": _channel_type(col_types[spec.color]),
            }

    return {
        "$schema": VEGA_LITE_SCHEMA,
        "data": {"values": values},
        "mark": spec.mark.value,
        "encoding": encoding,
    }


def doc_to_json(doc: VegaLiteDoc) -> str:
    """Canonical serialization used for golden-file comparisons."""
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
