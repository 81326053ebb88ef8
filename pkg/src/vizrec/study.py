"""Blind comparative-study backend: sample pool, least-loaded assignment,
Likert rating persistence, and unblinded aggregate summaries.

Model identity is stored server-side only; every payload serialized for a
study client carries anonymous sides a/b and no model tag.
"""

from __future__ import annotations

import json
import random
import statistics
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Union

from .narrative import Narrative
from .tabular import TableSketch

ASSIGNMENT_SIZE = 10

SCORE_DIMENSIONS = (
    "vis_quality",
    "e_informativeness",
    "e_usefulness",
    "c_informativeness",
    "c_usefulness",
    "s_informativeness",
    "s_usefulness",
    "overall_narrative",
)
SIDES = ("a", "b")


class PoolExhaustedError(RuntimeError):
    """Not enough unassigned samples remain for a full assignment."""


class NotAssignedError(ValueError):
    """Rating references a (participant, sample) pair that was never assigned."""


class RangeError(ValueError):
    def __init__(self, field_name: str) -> None:
        super().__init__(f"score {field_name!r} must be an integer in [1, 5]")
        self.field = field_name


@dataclass(frozen=True)
class StudyResponse:
    """One model's answer to a study sample, with the tag kept server-side."""

    model_tag: str
    vegazero: str
    narrative: Narrative
    doc: Optional[dict] = None

    def blinded_dict(self) -> dict:
        return {
            "vegazero": self.vegazero,
            "narrative": self.narrative.to_dict(),
            "doc": self.doc,
        }

    def to_dict(self) -> dict:
        return {"model_tag": self.model_tag, **self.blinded_dict()}

    @classmethod
    def from_dict(cls, data: dict) -> "StudyResponse":
        return cls(
            model_tag=data["model_tag"],
            vegazero=data["vegazero"],
            narrative=Narrative.from_dict(data["narrative"]),
            doc=data.get("doc"),
        )


@dataclass
class StudySample:
    id: str
    sketch: TableSketch
    query: str
    responses: tuple[StudyResponse, StudyResponse]
    assignment_count: int = 0

    def blinded_payload(self) -> dict:
        """Client view: sides a/b only, model identity withheld."""
        return {
            "id": self.id,
            "sketch": self.sketch.to_dict(),
            "query": self.query,
            "responses": {
                side: resp.blinded_dict()
                for side, resp in zip(SIDES, self.responses)
            },
        }

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "sketch": self.sketch.to_dict(),
            "query": self.query,
            "responses": [r.to_dict() for r in self.responses],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "StudySample":
        responses = tuple(StudyResponse.from_dict(r) for r in data["responses"])
        if len(responses) != 2:
            raise ValueError("a study sample carries exactly two responses")
        return cls(
            id=data["id"],
            sketch=TableSketch.from_dict(data["sketch"]),
            query=data["query"],
            responses=responses,
        )


@dataclass(frozen=True)
class Assignment:
    participant_id: str
    sample_ids: tuple[str, ...]

    def to_dict(self) -> dict:
        return {"participant_id": self.participant_id, "sample_ids": list(self.sample_ids)}


@dataclass(frozen=True)
class Rating:
    participant_id: str
    sample_id: str
    scores: dict
    timestamp: str
    expertise: Optional[int] = None

    @staticmethod
    def score_keys() -> list[str]:
        return [f"{dim}_{side}" for dim in SCORE_DIMENSIONS for side in SIDES]

    def validate(self) -> None:
        for key in self.score_keys():
            value = self.scores.get(key)
            if not isinstance(value, int) or isinstance(value, bool) or not 1 <= value <= 5:
                raise RangeError(key)

    def to_dict(self) -> dict:
        return {
            "participant_id": self.participant_id,
            "sample_id": self.sample_id,
            "scores": dict(self.scores),
            "timestamp": self.timestamp,
            "expertise": self.expertise,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Rating":
        return cls(
            participant_id=data["participant_id"],
            sample_id=data["sample_id"],
            scores=dict(data["scores"]),
            timestamp=data["timestamp"],
            expertise=data.get("expertise"),
        )


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class StudyStore:
    """Append-only JSONL persistence with an in-memory index; all mutations
    serialize through one lock."""

    def __init__(self, data_dir: Union[str, Path]) -> None:
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self.samples: dict[str, StudySample] = {}
        self.assignments: dict[str, Assignment] = {}
        self.ratings: dict[tuple[str, str], Rating] = {}
        self._reload()

    def _path(self, name: str) -> Path:
        return self.data_dir / f"{name}.jsonl"

    def _append(self, name: str, record: dict) -> None:
        with self._path(name).open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")

    def _reload(self) -> None:
        if self._path("study_samples").exists():
            for line in self._path("study_samples").read_text(encoding="utf-8").splitlines():
                if line.strip():
                    sample = StudySample.from_dict(json.loads(line))
                    self.samples[sample.id] = sample
        if self._path("assignments").exists():
            for line in self._path("assignments").read_text(encoding="utf-8").splitlines():
                if line.strip():
                    data = json.loads(line)
                    assignment = Assignment(data["participant_id"], tuple(data["sample_ids"]))
                    self.assignments[assignment.participant_id] = assignment
                    for sid in assignment.sample_ids:
                        if sid in self.samples:
                            self.samples[sid].assignment_count += 1
        if self._path("ratings").exists():
            for line in self._path("ratings").read_text(encoding="utf-8").splitlines():
                if line.strip():
                    rating = Rating.from_dict(json.loads(line))
                    self.ratings[(rating.participant_id, rating.sample_id)] = rating

    def add_samples(self, samples: list[StudySample]) -> None:
        with self._lock:
            for sample in samples:
                if sample.id in self.samples:
                    raise ValueError(f"duplicate study sample id {sample.id!r}")
                self.samples[sample.id] = sample
                self._append("study_samples", sample.to_dict())

    def assign_samples(
        self, participant_id: str, seed: int = 0, size: int = ASSIGNMENT_SIZE
    ) -> Assignment:
        """Least-loaded-first pick of `size` samples; idempotent per participant."""
        with self._lock:
            if participant_id in self.assignments:
                return self.assignments[participant_id]
            candidates = list(self.samples.values())
            if len(candidates) < size:
                raise PoolExhaustedError(
                    f"pool has {len(candidates)} samples, need {size}"
                )
            rng = random.Random((seed, participant_id).__repr__())
            rng.shuffle(candidates)
            candidates.sort(key=lambda s: s.assignment_count)
            chosen = candidates[:size]
            for sample in chosen:
                sample.assignment_count += 1
            assignment = Assignment(participant_id, tuple(s.id for s in chosen))
            self.assignments[participant_id] = assignment
            self._append("assignments", assignment.to_dict())
            return assignment

    def next_sample(self, participant_id: str, seed: int = 0) -> Optional[StudySample]:
        """The participant's next unrated assigned sample, or None when done."""
        assignment = self.assign_samples(participant_id, seed=seed)
        for sid in assignment.sample_ids:
            if (participant_id, sid) not in self.ratings:
                return self.samples[sid]
        return None

    def record_rating(self, rating: Rating) -> None:
        rating.validate()
        with self._lock:
            assignment = self.assignments.get(rating.participant_id)
            if assignment is None or rating.sample_id not in assignment.sample_ids:
                raise NotAssignedError(
                    f"sample {rating.sample_id!r} is not assigned to participant "
                    f"{rating.participant_id!r}"
                )
            self.ratings[(rating.participant_id, rating.sample_id)] = rating
            self._append("ratings", rating.to_dict())

    def study_summary(self) -> dict:
        """Unblinded per-model mean/std for each dimension, plus expertise
        cohorts (expert = declared expertise above 3)."""
        if not self.ratings:
            raise ValueError("no ratings recorded")

        def cohort_of(rating: Rating) -> str:
            if rating.expertise is None:
                return "unspecified"
            return "expert" if rating.expertise > 3 else "non_expert"

        def summarize(ratings: list[Rating]) -> dict:
            buckets: dict[tuple[str, str], list[int]] = {}
            for rating in ratings:
                sample = self.samples.get(rating.sample_id)
                if sample is None:
                    continue
                for side, response in zip(SIDES, sample.responses):
                    for dim in SCORE_DIMENSIONS:
                        key = (response.model_tag, dim)
                        buckets.setdefault(key, []).append(rating.scores[f"{dim}_{side}"])
            out: dict = {}
            for (model, dim), values in sorted(buckets.items()):
                out.setdefault(model, {})[dim] = {
                    "n": len(values),
                    "mean": sum(values) / len(values),
                    "std": statistics.stdev(values) if len(values) > 1 else None,
                }
            return out

        ratings = list(self.ratings.values())
        cohorts: dict[str, list[Rating]] = {}
        for rating in ratings:
            cohorts.setdefault(cohort_of(rating), []).append(rating)
        return {
            "n_ratings": len(ratings),
            "overall": summarize(ratings),
            "cohorts": {name: summarize(members) for name, members in sorted(cohorts.items())},
        }


def make_rating(
    participant_id: str,
    sample_id: str,
    scores: dict,
    expertise: Optional[int] = None,
    timestamp: Optional[str] = None,
) -> Rating:
    return Rating(
        participant_id=participant_id,
        sample_id=sample_id,
        scores=scores,
        timestamp=timestamp or _now(),
        expertise=expertise,
    )
