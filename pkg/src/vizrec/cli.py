"""Command-line front door for the pipeline: ingest, enrich, export,
evaluate, recommend, serve.

Configuration is a TOML file with a [backends.<tag>] table per model
endpoint; secrets are referenced by environment-variable name only.
Exit codes: 0 success, 1 usage error, 2 pipeline failure (quarantine
written where applicable).
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import click

from .corpus import corpus_stats, import_corpus
from .enrichment import (
    EnrichedSample,
    enrich_corpus,
    export_jsonl,
    split,
)
from .gateway import BackendConfig, Gateway, mock_backend
from .metrics import aggregate_report, comparison_table, evaluate_sample
from .narrative import Narrative
from .service import DatasetStore, create_app
from .service import recommend as run_recommend
from .tabular import load_csv
from .vegazero import render

PIPELINE_FAILURE = 2


def _load_config(path: str) -> dict:
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _build_gateway(tag: str, config: dict) -> Gateway:
    backends = config.get("backends", {})
    if tag not in backends:
        raise click.UsageError(f"backend {tag!r} not present in config")
    entry = dict(backends[tag])
    cache_path = entry.pop("cache_path", None)
    script_file = entry.pop("script_file", None)
    if script_file is not None:
        script = json.loads(Path(script_file).read_text(encoding="utf-8"))
        backend = mock_backend(script, model_name=entry.get("model_name", tag))
    else:
        backend = BackendConfig(**entry)
    return Gateway(backend, cache_path=cache_path)


@click.group()
def main() -> None:
    """Natural-language-to-visualization pipeline tools."""


@main.command()
@click.argument("csv_path", type=click.Path(exists=True))
@click.option("--name", default=None, help="Table name (defaults to the file stem).")
def ingest(csv_path: str, name: str | None) -> None:
    """Load a CSV file and print the typed table as JSON."""
    path = Path(csv_path)
    table = load_csv(path.read_bytes(), name=name or path.stem)
    click.echo(table.to_json())


@main.command()
@click.option("--corpus", "corpus_index", required=True, type=click.Path(exists=True))
@click.option("--backend", "backend_tag", required=True)
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--suggestions", default=3, show_default=True)
def enrich(corpus_index, backend_tag, config_path, out_dir, suggestions) -> None:
    """Run the teacher tasks over a corpus; write enriched + quarantine files."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    gateway = _build_gateway(backend_tag, _load_config(config_path))

    triples, stats, import_quarantine = import_corpus(corpus_index)
    samples, teacher_quarantine = enrich_corpus(triples, gateway, suggestions)

    with (out / "enriched.jsonl").open("w", encoding="utf-8") as fh:
        for sample in samples:
            fh.write(
                json.dumps(
                    {
                        "id": sample.triple.id,
                        "narrative": sample.narrative.to_dict(),
                        "teacher_meta": sample.teacher_meta,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )
    with (out / "quarantine.jsonl").open("w", encoding="utf-8") as fh:
        for record in import_quarantine:
            fh.write(json.dumps({"id": record.id, "reason": record.reason}) + "\n")
        for triple, exc in teacher_quarantine:
            fh.write(json.dumps({"id": triple.id, "reason": str(exc)}) + "\n")

    click.echo(json.dumps({"enriched": len(samples), "stats": stats.to_dict()}))
    if not samples:
        click.echo("every sample was quarantined", err=True)
        sys.exit(PIPELINE_FAILURE)


@main.command()
@click.option("--corpus", "corpus_index", required=True, type=click.Path(exists=True))
@click.option("--enriched", "enriched_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--train-ratio", default=0.62, show_default=True)
@click.option("--seed", default=0, show_default=True)
def export(corpus_index, enriched_path, out_dir, train_ratio, seed) -> None:
    """Split enriched samples and export train/eval JSONL plus a manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    triples, _, quarantine = import_corpus(corpus_index)
    by_id = {t.id: t for t in triples}

    samples = []
    for line in Path(enriched_path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        record = json.loads(line)
        triple = by_id.get(record["id"])
        if triple is None:
            continue
        samples.append(
            EnrichedSample(
                triple=triple,
                narrative=Narrative.from_dict(record["narrative"]),
                teacher_meta=record.get("teacher_meta", {}),
            )
        )
    if not samples:
        click.echo("no enriched samples matched the corpus", err=True)
        sys.exit(PIPELINE_FAILURE)

    train, evaluation = split(samples, (train_ratio, 1.0 - train_ratio), seed=seed)
    manifest = export_jsonl(train, out / "train.jsonl")
    export_jsonl(evaluation, out / "eval.jsonl")
    manifest_dict = manifest.to_dict()
    manifest_dict["quarantined"] = [
        {"id": q.id, "reason": q.reason} for q in quarantine
    ]
    manifest_dict["eval_samples"] = len(evaluation)
    manifest_dict["split_seed"] = seed
    manifest_dict["train_ratio"] = train_ratio
    (out / "manifest.json").write_text(
        json.dumps(manifest_dict, indent=2) + "\n", encoding="utf-8"
    )
    click.echo(json.dumps({"train": len(train), "eval": len(evaluation)}))


@main.command()
@click.option("--corpus", "corpus_index", required=True, type=click.Path(exists=True))
@click.option("--completions", "completions_path", required=True, type=click.Path(exists=True))
@click.option("--model", "model_name", required=True)
@click.option("--out", "out_path", default=None, type=click.Path())
@click.option("--lenient", is_flag=True, default=False)
def evaluate(corpus_index, completions_path, model_name, out_path, lenient) -> None:
    """Score a completions file (JSONL of sample_id/text) against a corpus."""
    triples, _, _ = import_corpus(corpus_index)
    by_id = {t.id: t for t in triples}
    records = []
    for line in Path(completions_path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        item = json.loads(line)
        truth = by_id.get(item["sample_id"])
        if truth is None:
            click.echo(f"unknown sample {item['sample_id']!r}", err=True)
            sys.exit(PIPELINE_FAILURE)
        records.append(
            evaluate_sample(
                item["sample_id"], item["text"], truth, model_name, allow_lenient=lenient
            )
        )
    report = aggregate_report(records)
    if out_path:
        Path(out_path).write_text(report.to_json(), encoding="utf-8")
    click.echo(comparison_table([report]))


@main.command()
@click.option("--corpus", "corpus_index", required=True, type=click.Path(exists=True))
def stats(corpus_index) -> None:
    """Print corpus statistics."""
    triples, import_stats, _ = import_corpus(corpus_index)
    click.echo(json.dumps(import_stats.to_dict(), indent=2))


@main.command("recommend")
@click.option("--dataset", "dataset_path", required=True, type=click.Path(exists=True))
@click.option("--query", required=True)
@click.option("--backend", "backend_tag", required=True)
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
def recommend_cmd(dataset_path, query, backend_tag, config_path) -> None:
    """One-shot recommendation for a CSV dataset and a query."""
    path = Path(dataset_path)
    table = load_csv(path.read_bytes(), name=path.stem)
    gateway = _build_gateway(backend_tag, _load_config(config_path))
    rec, violations = run_recommend(table, query, gateway)
    click.echo(
        json.dumps(
            {
                "vegazero": render(rec.spec),
                "narrative": rec.narrative.to_dict(),
                "doc": rec.doc,
                "warnings": [v.to_dict() for v in violations],
            },
            indent=2,
            ensure_ascii=False,
        )
    )


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(config_path, host, port) -> None:
    """Run the HTTP service."""
    import uvicorn

    config = _load_config(config_path)
    data_dir = config.get("data_dir", "data")
    backends = {
        tag: _build_gateway(tag, config) for tag in config.get("backends", {})
    }
    app = create_app(data_dir, backends)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
