"""Static validation of a spec against a table sketch.

Violations are values, not exceptions; an empty list means the spec is
grounded in the sketch and satisfies every type invariant.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from ..tabular import ColumnType, TableSketch
from .spec import Aggregate, VegaZeroSpec


class ViolationCode(str, Enum):
    UNKNOWN_COLUMN = "UnknownColumn"
    TYPE_MISMATCH = "TypeMismatch"
    ILLEGAL_AGGREGATE = "IllegalAggregate"
    BIN_ON_NON_TEMPORAL = "BinOnNonTemporal"
    TOPK_WITHOUT_SORT = "TopkWithoutSort"


@dataclass(frozen=True)
class Violation:
    code: ViolationCode
    message: str
    location: str

    def to_dict(self) -> dict:
        return {"code": self.code.value, "message": self.message, "location": self.location}


def validate(spec: VegaZeroSpec, sketch: TableSketch) -> list[Violation]:
    violations: list[Violation] = []
    known = dict(sketch.features)

    locations = [("x", spec.x), ("y", spec.y)]
    if spec.color:
        locations.append(("color", spec.color))
    if spec.filter:
        locations.extend(("filter", c) for c in spec.filter.columns())
    for location, column in locations:
        if column not in known:
            violations.append(
                Violation(
                    ViolationCode.UNKNOWN_COLUMN,
                    f"column {column!r} not in table {sketch.table_name!r}",
                    location,
                )
            )

    if spec.x == spec.y and spec.aggregate is not Aggregate.COUNT:
        violations.append(
            Violation(
                ViolationCode.TYPE_MISMATCH,
                f"x and y both map column {spec.x!r} without a count aggregate",
                "y",
            )
        )

    if (
        spec.aggregate in (Aggregate.MEAN, Aggregate.SUM, Aggregate.MIN, Aggregate.MAX)
        and known.get(spec.y) is not None
        and known[spec.y] is not ColumnType.QUANTITATIVE
    ):
        violations.append(
            Violation(
                ViolationCode.ILLEGAL_AGGREGATE,
                f"aggregate {spec.aggregate.value} requires a quantitative y column,"
                f" {spec.y!r} is {known[spec.y].value}",
                "y",
            )
        )

    if (
        spec.bin_unit is not None
        and known.get(spec.x) is not None
        and known[spec.x] is not ColumnType.TEMPORAL
    ):
        violations.append(
            Violation(
                ViolationCode.BIN_ON_NON_TEMPORAL,
                f"bin requires a temporal x column, {spec.x!r} is {known[spec.x].value}",
                "x",
            )
        )

    if spec.topk is not None and spec.sort is None:
        violations.append(
            Violation(
                ViolationCode.TOPK_WITHOUT_SORT,
                "topk requires a sort clause",
                "topk",
            )
        )

    return violations
