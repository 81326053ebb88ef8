"""AST types and canonical rendering for the keyword-sequence chart grammar.

The grammar is a flat keyword sequence:

    mark <M> [data <name>] encoding x <col> y aggregate <agg> <col>
    [color <col>]
    [transform [filter <pred>] [group x] [bin x by <unit>]
               [sort <axis> <dir>] [topk <k>]]

Keywords are case-insensitive; column names are taken verbatim.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

Literal = Union[str, int, float]


class Mark(str, Enum):
    BAR = "bar"
    LINE = "line"
    POINT = "point"
    ARC = "arc"


class Aggregate(str, Enum):
    NONE = "none"
    COUNT = "count"
    MEAN = "mean"
    SUM = "sum"
    MIN = "min"
    MAX = "max"


class BinUnit(str, Enum):
    YEAR = "year"
    MONTH = "month"
    WEEKDAY = "weekday"


class SortAxis(str, Enum):
    X = "x"
    Y = "y"


class SortDir(str, Enum):
    ASC = "asc"
    DESC = "desc"


COMPARISON_OPS = ("=", "!=", "<", "<=", ">", ">=")


@dataclass(frozen=True)
class Comparison:
    """A single `<col> <op> <literal>` clause of a filter predicate."""

    column: str
    op: str
    value: Literal

    def __post_init__(self) -> None:
        if self.op not in COMPARISON_OPS:
            raise ValueError(f"unknown comparison operator {self.op!r}")


@dataclass(frozen=True)
class Predicate:
    """Disjunction of conjunctions: `and` binds tighter than `or`."""

    groups: tuple[tuple[Comparison, ...], ...]

    def columns(self) -> list[str]:
        seen: list[str] = []
        for group in self.groups:
            for comp in group:
                if comp.column not in seen:
                    seen.append(comp.column)
        return seen


@dataclass(frozen=True)
class VegaZeroSpec:
    mark: Mark
    x: str
    y: str
    aggregate: Aggregate = Aggregate.NONE
    data_name: Optional[str] = None
    color: Optional[str] = None
    filter: Optional[Predicate] = None
    group_x: bool = False
    bin_unit: Optional[BinUnit] = None
    sort: Optional[tuple[SortAxis, SortDir]] = None
    topk: Optional[int] = None

    def referenced_columns(self) -> list[str]:
        """Every data column the spec names, in first-appearance order."""
        cols = [self.x, self.y]
        if self.color:
            cols.append(self.color)
        if self.filter:
            cols.extend(self.filter.columns())
        out: list[str] = []
        for c in cols:
            if c not in out:
                out.append(c)
        return out


def _render_literal(value: Literal) -> str:
    if isinstance(value, bool):
        raise TypeError("boolean literals are not part of the grammar")
    if isinstance(value, (int, float)):
        return repr(value)
    return f'"{value}"'


def _render_predicate(pred: Predicate) -> str:
    return " or ".join(
        " and ".join(f"{c.column} {c.op} {_render_literal(c.value)}" for c in group)
        for group in pred.groups
    )


def render(spec: VegaZeroSpec) -> str:
    """Canonical single-space, lowercase-keyword form.

    parse(render(s)) structurally equals s for every valid spec; transform
    clauses are emitted in the fixed order filter, group, bin, sort, topk.
    """
    parts = ["mark", spec.mark.value]
    if spec.data_name:
        parts += ["data", spec.data_name]
    parts += ["encoding", "x", spec.x, "y", "aggregate", spec.aggregate.value, spec.y]
    if spec.color:
        parts += ["color", spec.color]

    transform: list[str] = []
    if spec.filter:
        transform += ["filter", _render_predicate(spec.filter)]
    if spec.group_x:
        transform += ["group", "x"]
    if spec.bin_unit:
        transform += ["bin", "x", "by", spec.bin_unit.value]
    if spec.sort:
        axis, direction = spec.sort
        transform += ["sort", axis.value, direction.value]
    if spec.topk is not None:
        transform += ["topk", str(spec.topk)]
    if transform:
        parts += ["transform"] + transform

    return " ".join(parts)
