"""Prompt construction: teacher CoT prompts, the student training-instance
template, the student inference prompt, and the zero-shot baseline prompt.

All wording lives in versioned template files under templates/; prompts are
pure functions of their inputs plus the template set, whose hash is recorded
in every exported artifact.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from typing import Optional, Union

from .narrative import Narrative
from .tabular import TableSketch
from .vegazero import VegaZeroSpec, ViolationCode, render, validate

VEGAZERO_TEMPLATE = (
    "mark [MARK] data [TABLE] encoding x [X] y aggregate [AGG] [Y] color [COLOR] "
    "transform filter [PREDICATE] group x bin x by [UNIT] sort [AXIS] [DIRECTION] topk [K]"
)

DEFAULT_SUGGESTION_COUNT = 3
_SLOT = re.compile(r"\{\{(\w+)\}\}")
_TEMPLATE_FILES = (
    "t1_explain.txt",
    "t2_caption.txt",
    "t3_suggest.txt",
    "header.txt",
    "input.txt",
    "body.txt",
    "response.txt",
    "response_format.txt",
    "baseline.txt",
)


class TeacherTask(str, Enum):
    T1_EXPLAIN = "T1_explain"
    T2_CAPTION = "T2_caption"
    T3_SUGGEST = "T3_suggest"


class Hardness(str, Enum):
    EASY = "easy"
    MEDIUM = "medium"
    HARD = "hard"
    EXTRA_HARD = "extra_hard"


class InvalidInputError(ValueError):
    """T1 received a spec referencing columns absent from the sketch."""


class IncompleteNarrativeError(ValueError):
    def __init__(self, missing: list[str]) -> None:
        super().__init__(f"narrative missing parts: {', '.join(missing)}")
        self.missing = missing


@dataclass(frozen=True)
class PromptText:
    text: str
    task: Union[TeacherTask, str]
    section_markers: tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class TrainingInstance:
    header: str
    input: str
    body: str
    response: str
    source: tuple
    hardness: Hardness

    @property
    def prompt(self) -> str:
        return self.header + "\n" + self.input

    @property
    def completion(self) -> str:
        return self.body + "\n" + self.response


def _load(name: str) -> str:
    return resources.files("vizrec.templates").joinpath(name).read_text(encoding="utf-8")


def _fill(template: str, values: dict[str, str]) -> str:
    def sub(match: re.Match) -> str:
        key = match.group(1)
        if key not in values:
            raise KeyError(f"template slot {{{{{key}}}}} has no value")
        return values[key]

    return _SLOT.sub(sub, template)


def template_set_hash() -> str:
    """SHA-256 over the shipped template files, for artifact provenance."""
    digest = hashlib.sha256()
    for name in _TEMPLATE_FILES:
        digest.update(name.encode())
        digest.update(b"\0")
        digest.update(_load(name).encode())
    return digest.hexdigest()


def _features_block(sketch: TableSketch) -> str:
    return "\n".join(f"- {name} ({ctype.value})" for name, ctype in sketch.features)


def _suggestion_slots(count: int) -> str:
    return "\n".join(f"{i}) <follow-up question>" for i in range(1, count + 1))


def _block_markers(text: str) -> tuple[tuple[str, int], ...]:
    markers = []
    for label in ("A", "B", "C"):
        idx = text.find(f"[BLOCK-{label}]")
        if idx >= 0:
            markers.append((label, idx))
    return tuple(markers)


def teacher_prompt(
    task: TeacherTask,
    sketch: Optional[TableSketch],
    query: Optional[str],
    spec: VegaZeroSpec,
    suggestion_count: int = DEFAULT_SUGGESTION_COUNT,
) -> PromptText:
    """Build one of the three teacher CoT prompts.

    T1 needs the sketch and query; T2/T3 only consume the spec.
    """
    if task is TeacherTask.T1_EXPLAIN:
        if sketch is None or query is None:
            raise InvalidInputError("T1 requires a table sketch and a query")
        unknown = [
            v for v in validate(spec, sketch) if v.code is ViolationCode.UNKNOWN_COLUMN
        ]
        if unknown:
            raise InvalidInputError(
                f"spec references unknown columns: {[v.message for v in unknown]}"
            )
        text = _fill(
            _load("t1_explain.txt"),
            {
                "vegazero_template": VEGAZERO_TEMPLATE,
                "table_name": sketch.table_name,
                "features": _features_block(sketch),
                "query": query,
                "spec": render(spec),
            },
        )
    elif task is TeacherTask.T2_CAPTION:
        text = _fill(
            _load("t2_caption.txt"),
            {"vegazero_template": VEGAZERO_TEMPLATE, "spec": render(spec)},
        )
    else:
        if not 1 <= suggestion_count <= 5:
            raise InvalidInputError("suggestion count must be in [1, 5]")
        text = _fill(
            _load("t3_suggest.txt"),
            {
                "vegazero_template": VEGAZERO_TEMPLATE,
                "spec": render(spec),
                "suggestion_count": str(suggestion_count),
                "suggestion_slots": _suggestion_slots(suggestion_count),
            },
        )
    return PromptText(text=text, task=task, section_markers=_block_markers(text))


def _header_text() -> str:
    return _fill(_load("header.txt"), {"vegazero_template": VEGAZERO_TEMPLATE})


def _input_text(sketch: TableSketch, query: str) -> str:
    return _fill(
        _load("input.txt"),
        {
            "table_name": sketch.table_name,
            "features": _features_block(sketch),
            "query": query,
        },
    )


def render_suggestions(suggestions: tuple[str, ...]) -> str:
    return "\n".join(f"{i}) {s}" for i, s in enumerate(suggestions, start=1))


def response_text(spec: VegaZeroSpec, narrative: Narrative) -> str:
    return _fill(
        _load("response.txt"),
        {
            "spec": render(spec),
            "e1": narrative.e1,
            "e2": narrative.e2,
            "caption": narrative.caption,
            "suggestions": render_suggestions(narrative.suggestions),
        },
    )


def training_instance(
    sketch: TableSketch,
    query: str,
    spec: VegaZeroSpec,
    narrative: Narrative,
    hardness: Hardness,
) -> TrainingInstance:
    """Assemble the four-part fine-tuning instance from an enriched sample."""
    missing = narrative.missing_parts()
    if missing:
        raise IncompleteNarrativeError(missing)
    body = _fill(_load("body.txt"), {"e1": narrative.e1, "e2": narrative.e2})
    return TrainingInstance(
        header=_header_text(),
        input=_input_text(sketch, query),
        body=body,
        response=response_text(spec, narrative),
        source=(sketch, query, spec, narrative),
        hardness=hardness,
    )


def _assemble(parts: list[tuple[str, str]], task: str) -> PromptText:
    offsets = []
    pieces = []
    pos = 0
    for label, piece in parts:
        offsets.append((label, pos))
        pieces.append(piece)
        pos += len(piece) + 1
    return PromptText(
        text="\n".join(pieces), task=task, section_markers=tuple(offsets)
    )


def inference_prompt(
    sketch: TableSketch,
    query: str,
    suggestion_count: int = DEFAULT_SUGGESTION_COUNT,
) -> PromptText:
    """Prompt for the fine-tuned student: header/input framing, no answer."""
    response_format = _fill(
        _load("response_format.txt"),
        {"suggestion_slots": _suggestion_slots(suggestion_count)},
    )
    return _assemble(
        [
            ("header", _header_text()),
            ("input", _input_text(sketch, query)),
            ("response_format", response_format),
        ],
        task="inference",
    )


def baseline_cot_prompt(
    sketch: TableSketch,
    query: str,
    suggestion_count: int = DEFAULT_SUGGESTION_COUNT,
) -> PromptText:
    """Zero-shot CoT prompt for an untuned model, mirroring the student's
    response format exactly."""
    response_format = _fill(
        _load("response_format.txt"),
        {"suggestion_slots": _suggestion_slots(suggestion_count)},
    )
    text = _fill(
        _load("baseline.txt"),
        {
            "header": _header_text(),
            "input": _input_text(sketch, query),
            "response_format": response_format,
        },
    )
    return PromptText(text=text, task="baseline", section_markers=())
