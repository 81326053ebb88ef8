"""Recursive-descent parser for the chart grammar.

Any deviation from the grammar raises VegaZeroSyntaxError carrying the
character offset of the offending token; that error is the signal the
syntax-correctness metric consumes.
"""

from __future__ import annotations

import re
from typing import Optional

from .spec import (
    Aggregate,
    BinUnit,
    COMPARISON_OPS,
    Comparison,
    Literal,
    Mark,
    Predicate,
    SortAxis,
    SortDir,
    VegaZeroSpec,
)

_TOKEN = re.compile(r'"[^"]*"|\S+')
_INT = re.compile(r"^[+-]?\d+$")
_NUMBER = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")

# Clause keywords that terminate a filter predicate.
_TRANSFORM_KEYWORDS = {"group", "bin", "sort", "topk"}


class VegaZeroSyntaxError(ValueError):
    def __init__(self, position: int, expected: str) -> None:
        super().__init__(f"at offset {position}: expected {expected}")
        self.position = position
        self.expected = expected


class _Tokens:
    def __init__(self, text: str) -> None:
        self.items = [(m.group(0), m.start()) for m in _TOKEN.finditer(text)]
        self.pos = 0
        self.end = len(text)

    def peek(self) -> Optional[str]:
        if self.pos < len(self.items):
            return self.items[self.pos][0]
        return None

    def offset(self) -> int:
        if self.pos < len(self.items):
            return self.items[self.pos][1]
        return self.end

    def next(self, expected: str) -> str:
        token = self.peek()
        if token is None:
            raise VegaZeroSyntaxError(self.end, expected)
        self.pos += 1
        return token

    def keyword(self, word: str) -> None:
        offset = self.offset()
        token = self.next(f"keyword '{word}'")
        if token.lower() != word:
            raise VegaZeroSyntaxError(offset, f"keyword '{word}'")

    def try_keyword(self, word: str) -> bool:
        token = self.peek()
        if token is not None and token.lower() == word:
            self.pos += 1
            return True
        return False

    def enum(self, cls, what: str):
        offset = self.offset()
        token = self.next(what).lower()
        try:
            return cls(token)
        except ValueError:
            raise VegaZeroSyntaxError(offset, what) from None

    def column(self, what: str) -> str:
        offset = self.offset()
        token = self.next(what)
        if token.startswith('"'):
            raise VegaZeroSyntaxError(offset, what)
        return token


def _parse_literal(token: str) -> Literal:
    if token.startswith('"') and token.endswith('"'):
        return token[1:-1]
    if _INT.match(token):
        return int(token)
    if _NUMBER.match(token):
        return float(token)
    return token


def _parse_predicate(tokens: _Tokens) -> Predicate:
    groups: list[tuple[Comparison, ...]] = []
    current: list[Comparison] = []
    while True:
        column = tokens.column("filter column")
        op_offset = tokens.offset()
        op = tokens.next("comparison operator")
        if op not in COMPARISON_OPS:
            raise VegaZeroSyntaxError(op_offset, "comparison operator")
        value = _parse_literal(tokens.next("literal"))
        current.append(Comparison(column, op, value))

        nxt = tokens.peek()
        if nxt is not None and nxt.lower() == "and":
            tokens.pos += 1
            continue
        if nxt is not None and nxt.lower() == "or":
            tokens.pos += 1
            groups.append(tuple(current))
            current = []
            continue
        break
    groups.append(tuple(current))
    return Predicate(tuple(groups))


def _parse_transform(tokens: _Tokens) -> dict:
    out: dict = {}
    if tokens.try_keyword("filter"):
        out["filter"] = _parse_predicate(tokens)
    if tokens.try_keyword("group"):
        tokens.keyword("x")
        out["group_x"] = True
    if tokens.try_keyword("bin"):
        tokens.keyword("x")
        tokens.keyword("by")
        out["bin_unit"] = tokens.enum(BinUnit, "bin unit (year, month, weekday)")
    if tokens.try_keyword("sort"):
        axis = tokens.enum(SortAxis, "sort axis (x or y)")
        direction = tokens.enum(SortDir, "sort direction (asc or desc)")
        out["sort"] = (axis, direction)
    if tokens.try_keyword("topk"):
        offset = tokens.offset()
        token = tokens.next("positive integer")
        if not _INT.match(token) or int(token) <= 0:
            raise VegaZeroSyntaxError(offset, "positive integer")
        out["topk"] = int(token)
    if not out:
        raise VegaZeroSyntaxError(tokens.offset(), "transform clause")
    return out


def parse(text: str) -> VegaZeroSpec:
    """Parse grammar text into a VegaZeroSpec AST."""
    tokens = _Tokens(text)

    tokens.keyword("mark")
    mark = tokens.enum(Mark, "mark keyword (bar, line, point, arc)")

    data_name = None
    if tokens.try_keyword("data"):
        data_name = tokens.column("data name")

    tokens.keyword("encoding")
    tokens.keyword("x")
    x = tokens.column("x column")
    tokens.keyword("y")
    tokens.keyword("aggregate")
    aggregate = tokens.enum(Aggregate, "aggregate (none, count, mean, sum, min, max)")
    y = tokens.column("y column")

    color = None
    if tokens.try_keyword("color"):
        color = tokens.column("color column")

    transform: dict = {}
    if tokens.try_keyword("transform"):
        transform = _parse_transform(tokens)

    if tokens.peek() is not None:
        raise VegaZeroSyntaxError(tokens.offset(), "end of input")

    return VegaZeroSpec(
        mark=mark,
        x=x,
        y=y,
        aggregate=aggregate,
        data_name=data_name,
        color=color,
        filter=transform.get("filter"),
        group_x=transform.get("group_x", False),
        bin_unit=transform.get("bin_unit"),
        sort=transform.get("sort"),
        topk=transform.get("topk"),
    )
