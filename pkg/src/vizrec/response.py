"""Parse raw model completions into structured recommendations.

Strict parsing locates the five labeled sections emitted by the training
template; lenient extraction is a fallback for baseline models that drift
from the format, and is always flagged as such so metrics can separate the
two modes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .narrative import Narrative
from .vegazero import VegaLiteDoc, VegaZeroSpec, VegaZeroSyntaxError, parse

SECTION_NAMES = ("VEGAZERO", "EXPLANATION-1", "EXPLANATION-2", "CAPTION", "SUGGESTIONS")

_MARKER = re.compile(
    r"^\s*\[(" + "|".join(re.escape(n) for n in SECTION_NAMES) + r")\]\s*$",
    re.IGNORECASE | re.MULTILINE,
)
# Items are "1) ..." anywhere, or "1." / "1:" / "1-" at line starts only
# (to avoid splitting decimals like 3.5 inside prose).
_NUMBERED_ITEM = re.compile(r"(?:^|(?<=\s))\d+\s*\)\s*|^\s*\d+\s*[.:-]\s+", re.MULTILINE)
_SPEC_LINE = re.compile(r"^\s*mark\s+(bar|line|point|arc)\b.*\bencoding\b", re.IGNORECASE)
_AXIS_WORDS = re.compile(r"\b(axis|axes|x-axis|y-axis)\b", re.IGNORECASE)


class MissingSectionError(ValueError):
    def __init__(self, name: str, raw_text: str) -> None:
        super().__init__(f"response is missing section [{name}]")
        self.name = name
        self.raw_text = raw_text


class SpecSyntaxError(ValueError):
    """The [VEGAZERO] section did not parse; scores 0 on the syntax metric."""

    def __init__(self, cause: VegaZeroSyntaxError, raw_text: str) -> None:
        super().__init__(str(cause))
        self.cause = cause
        self.raw_text = raw_text


class NoSpecFoundError(ValueError):
    def __init__(self, raw_text: str) -> None:
        super().__init__("no chart specification line found in response")
        self.raw_text = raw_text


@dataclass(frozen=True)
class Recommendation:
    spec: VegaZeroSpec
    narrative: Narrative
    raw_text: str
    doc: Optional[VegaLiteDoc] = None
    lenient: bool = False

    def with_doc(self, doc: VegaLiteDoc) -> "Recommendation":
        return Recommendation(
            spec=self.spec,
            narrative=self.narrative,
            raw_text=self.raw_text,
            doc=doc,
            lenient=self.lenient,
        )


def split_suggestions(text: str) -> tuple[str, ...]:
    """Split a numbered-list blob into individual suggestion strings."""
    parts = _NUMBERED_ITEM.split(text)
    items = tuple(p.strip() for p in parts if p.strip())
    if items:
        return items
    stripped = text.strip()
    return (stripped,) if stripped else ()


def find_sections(text: str) -> dict[str, str]:
    """Locate labeled sections (case-insensitive, order-tolerant)."""
    return _sections(text)


def _sections(text: str) -> dict[str, str]:
    found: dict[str, str] = {}
    matches = list(_MARKER.finditer(text))
    for i, match in enumerate(matches):
        name = match.group(1).upper()
        start = match.end()
        end = matches[i + 1].start() if i + 1 < len(matches) else len(text)
        found[name] = text[start:end].strip()
    return found


def parse_response(text: str) -> Recommendation:
    """Strict parse of a labeled five-section completion."""
    sections = _sections(text)
    for name in SECTION_NAMES:
        if name not in sections:
            raise MissingSectionError(name, text)
    try:
        spec = parse(sections["VEGAZERO"])
    except VegaZeroSyntaxError as exc:
        raise SpecSyntaxError(exc, text) from exc
    narrative = Narrative(
        e1=sections["EXPLANATION-1"],
        e2=sections["EXPLANATION-2"],
        caption=sections["CAPTION"],
        suggestions=split_suggestions(sections["SUGGESTIONS"]),
    )
    return Recommendation(spec=spec, narrative=narrative, raw_text=text)


def lenient_extract(text: str) -> Recommendation:
    """Heuristic fallback for unmarked responses.

    Strict-first: a response that parses strictly is returned unchanged with
    lenient=False. Otherwise the first parseable `mark ... encoding ...` line
    becomes the spec, the first prose paragraph the explanation, a paragraph
    mentioning axes the caption, and a numbered list the suggestions.
    """
    try:
        return parse_response(text)
    except (MissingSectionError, SpecSyntaxError):
        pass

    lines = text.splitlines()
    spec = None
    spec_line_idx = None
    for i, line in enumerate(lines):
        if _SPEC_LINE.match(line):
            try:
                spec = parse(line.strip())
                spec_line_idx = i
                break
            except VegaZeroSyntaxError:
                continue
    if spec is None:
        raise NoSpecFoundError(text)

    prose_lines = [
        l
        for i, l in enumerate(lines)
        if i != spec_line_idx and not _MARKER.match(l)
    ]
    paragraphs = [
        p.strip()
        for p in re.split(r"\n\s*\n", "\n".join(prose_lines))
        if p.strip()
    ]

    e1 = ""
    caption = ""
    suggestions: tuple[str, ...] = ()
    for para in paragraphs:
        if _NUMBERED_ITEM.search(para) and not suggestions:
            suggestions = split_suggestions(para)
        elif _AXIS_WORDS.search(para) and not caption:
            caption = para
        elif not e1 and not para.endswith(":"):
            # Colon-terminated paragraphs are lead-ins, not explanations.
            e1 = para

    narrative = Narrative(e1=e1, e2="", caption=caption, suggestions=suggestions)
    return Recommendation(spec=spec, narrative=narrative, raw_text=text, lenient=True)
