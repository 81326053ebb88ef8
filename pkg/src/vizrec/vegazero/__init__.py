"""Visualization grammar core: parse, render, validate, execute, compile."""

from .compiler import CompileError, VEGA_LITE_SCHEMA, VegaLiteDoc, compile_spec, doc_to_json
from .executor import COUNT_COLUMN, EvalError, bin_value, execute
from .parser import VegaZeroSyntaxError, parse
from .spec import (
    Aggregate,
    BinUnit,
    Comparison,
    Mark,
    Predicate,
    SortAxis,
    SortDir,
    VegaZeroSpec,
    render,
)
from .validate import Violation, ViolationCode, validate

__all__ = [
    "Aggregate",
    "BinUnit",
    "COUNT_COLUMN",
    "Comparison",
    "CompileError",
    "EvalError",
    "Mark",
    "Predicate",
    "SortAxis",
    "SortDir",
    "VEGA_LITE_SCHEMA",
    "VegaLiteDoc",
    "VegaZeroSpec",
    "VegaZeroSyntaxError",
    "Violation",
    "ViolationCode",
    "bin_value",
    "compile_spec",
    "doc_to_json",
    "execute",
    "parse",
    "render",
    "validate",
]
