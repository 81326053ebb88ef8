"""The narrative triple attached to a recommendation: explanation (split
into intent summary and design rationale), caption, and follow-up
suggestions."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Narrative:
    e1: str
    e2: str
    caption: str
    suggestions: tuple[str, ...]

    def missing_parts(self) -> list[str]:
        missing = []
        if not self.e1.strip():
            missing.append("E1")
        if not self.e2.strip():
            missing.append("E2")
        if not self.caption.strip():
            missing.append("C")
        if not any(s.strip() for s in self.suggestions):
            missing.append("S")
        return missing

    @property
    def is_complete(self) -> bool:
        return not self.missing_parts()

    def to_dict(self) -> dict:
        return {
            "e1": self.e1,
            "e2": self.e2,
            "caption": self.caption,
            "suggestions": list(self.suggestions),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Narrative":
        return cls(
            e1=data["e1"],
            e2=data["e2"],
            caption=data["caption"],
            suggestions=tuple(data["suggestions"]),
        )
