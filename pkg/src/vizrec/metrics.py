"""Layered quantitative evaluation: syntax correctness, data mapping, mark
correctness, and axes quality, plus a rule-based error classifier and
per-model comparison reports.

The stack is strictly layered: a record that fails the syntax level gets
n/a on every level above it, and report denominators count only applicable
records.
"""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .enrichment import CorpusTriple
from .response import (
    MissingSectionError,
    NoSpecFoundError,
    Recommendation,
    SpecSyntaxError,
    lenient_extract,
    parse_response,
)
from .tabular import ColumnType, sketch
from .vegazero import Aggregate, CompileError, EvalError, VegaZeroSpec, compile_spec, validate


class ErrorClass(str, Enum):
    INCORRECT_SCALING = "IncorrectScaling"
    INVERTED_AXES = "InvertedAxes"
    NON_OPTIMAL_SPACING = "NonOptimalSpacing"
    HALLUCINATION = "Hallucination"
    MISSING_DATA = "MissingData"
    INPUT_ERROR = "InputError"


# Human-only classes: no sound automatic rule exists, they are recorded via
# the study service and never emitted by classify_errors.
HUMAN_ONLY_ERRORS = frozenset({ErrorClass.NON_OPTIMAL_SPACING, ErrorClass.HALLUCINATION})

LEVELS = ("syntax", "data_mapping", "mark", "axes")


@dataclass(frozen=True)
class EvalRecord:
    sample_id: str
    model_name: str
    syntax: int
    data_mapping: Optional[int] = None
    mark: Optional[int] = None
    axes: Optional[int] = None
    errors: frozenset = frozenset()
    lenient: bool = False
    hardness: Optional[str] = None

    def __post_init__(self) -> None:
        if self.syntax == 0 and any(
            v is not None for v in (self.data_mapping, self.mark, self.axes)
        ):
            raise ValueError("levels above a failed syntax check must be n/a")

    def to_dict(self) -> dict:
        return {
            "sample_id": self.sample_id,
            "model_name": self.model_name,
            "syntax": self.syntax,
            "data_mapping": self.data_mapping,
            "mark": self.mark,
            "axes": self.axes,
            "errors": sorted(e.value for e in self.errors),
            "lenient": self.lenient,
            "hardness": self.hardness,
        }


@dataclass(frozen=True)
class EvalReport:
    model_name: str
    n_samples: int
    accuracy: dict
    per_hardness: dict
    error_counts: dict

    def to_dict(self) -> dict:
        return {
            "model_name": self.model_name,
            "n_samples": self.n_samples,
            "accuracy": self.accuracy,
            "per_hardness": self.per_hardness,
            "error_counts": self.error_counts,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"


def mapped_columns(spec: VegaZeroSpec) -> frozenset:
    """Data columns a spec maps: x, y (unless count), color, filter columns."""
    cols = {spec.x}
    if spec.aggregate is not Aggregate.COUNT:
        cols.add(spec.y)
    if spec.color:
        cols.add(spec.color)
    if spec.filter:
        cols.update(spec.filter.columns())
    return frozenset(cols)


def eval_syntax(raw: str, allow_lenient: bool = False) -> int:
    """1 iff the completion yields a grammatical spec (strict mode by
    default; lenient extractions count only when enabled)."""
    try:
        parse_response(raw)
        return 1
    except (MissingSectionError, SpecSyntaxError):
        if not allow_lenient:
            return 0
    try:
        lenient_extract(raw)
        return 1
    except NoSpecFoundError:
        return 0


def eval_data_mapping(pred: VegaZeroSpec, truth: VegaZeroSpec, partial: bool = False):
    """Set equality over mapped columns; `partial` reports Jaccard overlap."""
    p, t = mapped_columns(pred), mapped_columns(truth)
    if partial:
        return len(p & t) / len(p | t) if p | t else 1.0
    return int(p == t)


def eval_mark(pred: VegaZeroSpec, truth: VegaZeroSpec) -> int:
    return int(pred.mark is truth.mark)


def eval_axes(pred: VegaZeroSpec, truth: VegaZeroSpec) -> int:
    """Order-sensitive axis check: x, y, and the y aggregate must all match."""
    return int(
        pred.x == truth.x and pred.y == truth.y and pred.aggregate is truth.aggregate
    )


def _doc_channel_types(doc: dict) -> list[tuple[str, str]]:
    return [
        (channel.get("field"), channel.get("type"))
        for channel in doc.get("encoding", {}).values()
        if isinstance(channel, dict) and channel.get("field")
    ]


def classify_errors(pred: Recommendation, truth: CorpusTriple) -> set:
    """Rule-based detection of the automatically detectable error classes."""
    errors: set = set()
    truth_sketch = sketch(truth.table)

    if validate(truth.spec, truth_sketch):
        errors.add(ErrorClass.INPUT_ERROR)

    if (
        eval_axes(pred.spec, truth.spec) == 0
        and pred.spec.x == truth.spec.y
        and pred.spec.y == truth.spec.x
        and pred.spec.aggregate is truth.spec.aggregate
    ):
        errors.add(ErrorClass.INVERTED_AXES)

    doc = pred.doc
    if doc is None:
        try:
            doc = compile_spec(pred.spec, truth.table)
        except (CompileError, EvalError):
            doc = None

    if doc is not None:
        types = dict(truth_sketch.features)
        for field_name, channel_type in _doc_channel_types(doc):
            if (
                channel_type == "quantitative"
                and types.get(field_name) is ColumnType.TEMPORAL
            ):
                errors.add(ErrorClass.INCORRECT_SCALING)
        if not doc.get("data", {}).get("values") and truth.table.rows:
            errors.add(ErrorClass.MISSING_DATA)

    return errors


def evaluate_sample(
    sample_id: str,
    raw: str,
    truth: CorpusTriple,
    model_name: str,
    allow_lenient: bool = False,
) -> EvalRecord:
    """Score one completion against its ground-truth triple."""
    rec: Optional[Recommendation] = None
    lenient = False
    try:
        rec = parse_response(raw)
    except (MissingSectionError, SpecSyntaxError):
        if allow_lenient:
            try:
                rec = lenient_extract(raw)
                lenient = rec.lenient
            except NoSpecFoundError:
                rec = None

    if rec is None:
        return EvalRecord(
            sample_id=sample_id,
            model_name=model_name,
            syntax=0,
            hardness=truth.hardness.value,
        )

    return EvalRecord(
        sample_id=sample_id,
        model_name=model_name,
        syntax=1,
        data_mapping=eval_data_mapping(rec.spec, truth.spec),
        mark=eval_mark(rec.spec, truth.spec),
        axes=eval_axes(rec.spec, truth.spec),
        errors=frozenset(classify_errors(rec, truth)),
        lenient=lenient,
        hardness=truth.hardness.value,
    )


def _level_accuracy(records: list[EvalRecord]) -> dict:
    accuracy = {}
    for level in LEVELS:
        values = [getattr(r, level) for r in records if getattr(r, level) is not None]
        accuracy[level] = (sum(values) / len(values)) if values else None
    return accuracy


def aggregate_report(records: list[EvalRecord]) -> EvalReport:
    """Fold per-sample records into one model's report."""
    if not records:
        raise ValueError("no records to aggregate")
    models = {r.model_name for r in records}
    if len(models) != 1:
        raise ValueError(f"records span multiple models: {sorted(models)}")

    ordered = sorted(records, key=lambda r: r.sample_id)
    per_hardness = {}
    for hardness in sorted({r.hardness for r in ordered if r.hardness}):
        per_hardness[hardness] = _level_accuracy(
            [r for r in ordered if r.hardness == hardness]
        )

    error_counts: dict = {}
    for record in ordered:
        for error in record.errors:
            error_counts[error.value] = error_counts.get(error.value, 0) + 1

    return EvalReport(
        model_name=models.pop(),
        n_samples=len(ordered),
        accuracy=_level_accuracy(ordered),
        per_hardness=per_hardness,
        error_counts=dict(sorted(error_counts.items())),
    )


def comparison_table(reports: list[EvalReport]) -> str:
    """Side-by-side per-level accuracy table for two or more models."""
    header = ["level"] + [r.model_name for r in reports]
    rows = [header]
    for level in LEVELS:
        row = [level]
        for report in reports:
            value = report.accuracy.get(level)
            row.append("n/a" if value is None else f"{value:.2f}")
        rows.append(row)
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    lines = []
    for i, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(widths[j]) for j, cell in enumerate(row)))
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def comparison_html(reports: list[EvalReport]) -> str:
    head = "".join(f"<th>{r.model_name}</th>" for r in reports)
    body = []
    for level in LEVELS:
        cells = []
        for report in reports:
            value = report.accuracy.get(level)
            cells.append(f"<td>{'n/a' if value is None else f'{value:.2f}'}</td>")
        body.append(f"<tr><td>{level}</td>{''.join(cells)}</tr>")
    return (
        "<table><thead><tr><th>level</th>"
        + head
        + "</tr></thead><tbody>"
        + "".join(body)
        + "</tbody></table>\n"
    )
