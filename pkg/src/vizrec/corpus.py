"""Adapters for benchmark-style corpora: a JSON-lines index pointing at CSV
tables, each record carrying a query, hardness class, and chart spec.

Records whose spec fails to parse or to validate against their own table are
quarantined and counted, never silently dropped; extra index fields are
tolerated.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from .enrichment import CorpusTriple
from .prompts import Hardness
from .tabular import ColumnType, DataTable, load_csv, sketch
from .vegazero import VegaZeroSyntaxError, parse, validate


class IndexMalformedError(ValueError):
    def __init__(self, line: int, reason: str) -> None:
        super().__init__(f"index line {line}: {reason}")
        self.line = line
        self.reason = reason


@dataclass
class CorpusStats:
    hardness_counts: dict = field(default_factory=dict)
    parse_failures: int = 0
    validation_failures: int = 0
    marks: dict = field(default_factory=dict)

    def total(self) -> int:
        return (
            sum(self.hardness_counts.values())
            + self.parse_failures
            + self.validation_failures
        )

    def to_dict(self) -> dict:
        return {
            "hardness_counts": dict(self.hardness_counts),
            "parse_failures": self.parse_failures,
            "validation_failures": self.validation_failures,
            "marks": dict(self.marks),
        }


@dataclass(frozen=True)
class QuarantinedRecord:
    id: str
    reason: str
    raw: dict


def _load_table(
    record: dict, base_dir: Path, cache: dict[str, DataTable]
) -> DataTable:
    table_file = record["table_file"]
    if table_file not in cache:
        table_path = base_dir / table_file
        table = load_csv(table_path.read_bytes(), name=Path(table_file).stem)
        overrides = record.get("column_types")
        if overrides:
            # Corpus-provided types win over inference.
            columns = tuple(
                (name, ColumnType(overrides.get(name, ctype.value)))
                for name, ctype in table.columns
            )
            table = DataTable(name=table.name, columns=columns, rows=table.rows)
        cache[table_file] = table
    return cache[table_file]


def import_corpus(
    index_path: Union[str, Path],
) -> tuple[list[CorpusTriple], CorpusStats, list[QuarantinedRecord]]:
    """Load, parse, and validate every index record."""
    index_path = Path(index_path)
    if not index_path.exists():
        raise IOError(f"corpus index not found: {index_path}")
    base_dir = index_path.parent

    triples: list[CorpusTriple] = []
    quarantine: list[QuarantinedRecord] = []
    stats = CorpusStats(hardness_counts={h.value: 0 for h in Hardness})
    tables: dict[str, DataTable] = {}

    with index_path.open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise IndexMalformedError(line_no, f"invalid JSON: {exc}") from exc
            for key in ("id", "table_file", "query", "hardness", "vegazero"):
                if key not in record:
                    raise IndexMalformedError(line_no, f"missing field {key!r}")

            table = _load_table(record, base_dir, tables)
            try:
                spec = parse(record["vegazero"])
            except VegaZeroSyntaxError as exc:
                stats.parse_failures += 1
                quarantine.append(
                    QuarantinedRecord(record["id"], f"parse: {exc}", record)
                )
                continue

            violations = validate(spec, sketch(table))
            if violations:
                stats.validation_failures += 1
                reasons = "; ".join(v.message for v in violations)
                quarantine.append(
                    QuarantinedRecord(record["id"], f"validation: {reasons}", record)
                )
                continue

            hardness = Hardness(record["hardness"])
            stats.hardness_counts[hardness.value] += 1
            stats.marks[spec.mark.value] = stats.marks.get(spec.mark.value, 0) + 1
            triples.append(
                CorpusTriple(
                    id=record["id"],
                    table=table,
                    query=record["query"],
                    hardness=hardness,
                    spec=spec,
                )
            )

    return triples, stats, quarantine


def corpus_stats(triples: list[CorpusTriple]) -> CorpusStats:
    """Pure tally over already-imported triples."""
    stats = CorpusStats(hardness_counts={h.value: 0 for h in Hardness})
    for triple in triples:
        stats.hardness_counts[triple.hardness.value] += 1
        stats.marks[triple.spec.mark.value] = stats.marks.get(triple.spec.mark.value, 0) + 1
    return stats
