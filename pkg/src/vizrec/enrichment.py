"""Training-phase pipeline: run the three teacher tasks over corpus triples,
assemble narratives, and export fine-tuning corpora plus a manifest that
hands the externalized hyperparameters to the trainer.

Teacher failures quarantine the sample and let the run continue; quarantined
samples are never exported and are enumerated in the manifest.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Union

from .gateway import Gateway
from .narrative import Narrative
from .prompts import (
    Hardness,
    TeacherTask,
    TrainingInstance,
    teacher_prompt,
    template_set_hash,
    training_instance,
)
from .response import find_sections, split_suggestions
from .tabular import DataTable, sketch
from .vegazero import VegaZeroSpec, render

# Externalized fine-tune settings recorded in every export manifest; the
# training run itself happens outside this artifact.
FINE_TUNE_HYPERPARAMETERS = {
    "lora_r": 64,
    "lora_alpha": 128,
    "batch_size": 4,
    "learning_rate": 1e-4,
    "optimizer": "AdamW",
}


@dataclass(frozen=True)
class CorpusTriple:
    id: str
    table: DataTable
    query: str
    hardness: Hardness
    spec: VegaZeroSpec


@dataclass(frozen=True)
class EnrichedSample:
    triple: CorpusTriple
    narrative: Narrative
    teacher_meta: dict

    def to_instance(self) -> TrainingInstance:
        return training_instance(
            sketch(self.triple.table),
            self.triple.query,
            self.triple.spec,
            self.narrative,
            self.triple.hardness,
        )


class TeacherParseFailureError(ValueError):
    def __init__(self, task: TeacherTask, raw_text: str, missing: list[str]) -> None:
        super().__init__(
            f"teacher response for {task.value} lacks sections: {', '.join(missing)}"
        )
        self.task = task
        self.raw_text = raw_text
        self.missing = missing


class InsufficientClassError(ValueError):
    def __init__(self, hardness: Hardness) -> None:
        super().__init__(f"hardness class {hardness.value} has no samples")
        self.hardness = hardness


@dataclass(frozen=True)
class ExportManifest:
    n_samples: int
    hardness_counts: dict
    template_hash: str
    hyperparameters: dict
    quarantined: list

    def to_dict(self) -> dict:
        return {
            "n_samples": self.n_samples,
            "hardness_counts": self.hardness_counts,
            "template_hash": self.template_hash,
            "hyperparameters": self.hyperparameters,
            "quarantined": self.quarantined,
        }


def _require_sections(
    task: TeacherTask, raw: str, names: tuple[str, ...]
) -> dict[str, str]:
    sections = find_sections(raw)
    missing = [n for n in names if not sections.get(n, "").strip()]
    if missing:
        raise TeacherParseFailureError(task, raw, missing)
    return sections


def enrich(
    triple: CorpusTriple, teacher: Gateway, suggestion_count: int = 3
) -> EnrichedSample:
    """Issue T1/T2/T3 prompts and assemble the narrative for one triple."""
    table_sketch = sketch(triple.table)

    r1 = teacher.complete(
        teacher_prompt(TeacherTask.T1_EXPLAIN, table_sketch, triple.query, triple.spec)
    )
    s1 = _require_sections(
        TeacherTask.T1_EXPLAIN, r1.text, ("EXPLANATION-1", "EXPLANATION-2")
    )

    r2 = teacher.complete(teacher_prompt(TeacherTask.T2_CAPTION, None, None, triple.spec))
    s2 = _require_sections(TeacherTask.T2_CAPTION, r2.text, ("CAPTION",))

    r3 = teacher.complete(
        teacher_prompt(
            TeacherTask.T3_SUGGEST, None, None, triple.spec, suggestion_count
        )
    )
    s3 = _require_sections(TeacherTask.T3_SUGGEST, r3.text, ("SUGGESTIONS",))
    suggestions = split_suggestions(s3["SUGGESTIONS"])
    if not suggestions:
        raise TeacherParseFailureError(TeacherTask.T3_SUGGEST, r3.text, ["SUGGESTIONS"])

    narrative = Narrative(
        e1=s1["EXPLANATION-1"],
        e2=s1["EXPLANATION-2"],
        caption=s2["CAPTION"],
        suggestions=suggestions,
    )
    return EnrichedSample(
        triple=triple,
        narrative=narrative,
        teacher_meta={
            "model_name": teacher.config.model_name,
            "template_hash": template_set_hash(),
            "timestamp": datetime.now(timezone.utc).isoformat(),
        },
    )


def enrich_corpus(
    triples: list[CorpusTriple], teacher: Gateway, suggestion_count: int = 3
) -> tuple[list[EnrichedSample], list[tuple[CorpusTriple, TeacherParseFailureError]]]:
    """Enrich every triple; parse failures are quarantined, not fatal."""
    samples: list[EnrichedSample] = []
    quarantine: list[tuple[CorpusTriple, TeacherParseFailureError]] = []
    for triple in sorted(triples, key=lambda t: t.id):
        try:
            samples.append(enrich(triple, teacher, suggestion_count))
        except TeacherParseFailureError as exc:
            quarantine.append((triple, exc))
    return samples, quarantine


def export_jsonl(
    samples: list[EnrichedSample],
    path: Union[str, Path],
    quarantined: Union[list, None] = None,
) -> ExportManifest:
    """Write one training record per line, deterministically ordered by id."""
    if not samples:
        raise ValueError("no samples to export")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    hardness_counts = {h.value: 0 for h in Hardness}
    lines = []
    for sample in sorted(samples, key=lambda s: s.triple.id):
        triple = sample.triple
        instance = sample.to_instance()
        hardness_counts[triple.hardness.value] += 1
        lines.append(
            json.dumps(
                {
                    "id": triple.id,
                    "query": triple.query,
                    "hardness": triple.hardness.value,
                    "sketch": sketch(triple.table).to_dict(),
                    "vegazero": render(triple.spec),
                    "e1": sample.narrative.e1,
                    "e2": sample.narrative.e2,
                    "caption": sample.narrative.caption,
                    "suggestions": list(sample.narrative.suggestions),
                    "prompt": instance.prompt,
                    "completion": instance.completion,
                },
                ensure_ascii=False,
            )
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    quarantined_entries = [
        {"id": triple.id, "task": exc.task.value, "reason": str(exc)}
        for triple, exc in (quarantined or [])
    ]
    return ExportManifest(
        n_samples=len(samples),
        hardness_counts=hardness_counts,
        template_hash=template_set_hash(),
        hyperparameters=dict(FINE_TUNE_HYPERPARAMETERS),
        quarantined=quarantined_entries,
    )


def split(
    samples: list,
    ratios: tuple[float, float],
    seed: int = 0,
) -> tuple[list, list]:
    """Stratified train/eval split by hardness, deterministic under a seed.

    Works over EnrichedSamples or CorpusTriples (anything carrying either a
    .hardness or a .triple.hardness).
    """
    train_ratio, eval_ratio = ratios
    if abs(train_ratio + eval_ratio - 1.0) > 1e-9:
        raise ValueError("split ratios must sum to 1")

    def hardness_of(sample) -> Hardness:
        return getattr(sample, "hardness", None) or sample.triple.hardness

    def id_of(sample) -> str:
        return getattr(sample, "id", None) or sample.triple.id

    by_class: dict[Hardness, list] = {h: [] for h in Hardness}
    for sample in samples:
        by_class[hardness_of(sample)].append(sample)
    for hardness, members in by_class.items():
        if not members:
            raise InsufficientClassError(hardness)

    rng = random.Random(seed)
    train: list = []
    evaluation: list = []
    for hardness in Hardness:
        members = sorted(by_class[hardness], key=id_of)
        rng.shuffle(members)
        n_train = round(train_ratio * len(members))
        train.extend(members[:n_train])
        evaluation.extend(members[n_train:])

    train.sort(key=id_of)
    evaluation.sort(key=id_of)
    return train, evaluation
