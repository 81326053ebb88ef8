"""HTTP front door: dataset upload, live recommendation, evaluation runs,
and the blind comparative-study API.

Stores are JSONL files under a data directory; backends are configured
gateways keyed by tag. Model tags never appear in study-client payloads.
"""

from __future__ import annotations

import hashlib
import json
import threading
from pathlib import Path
from typing import Optional, Union

from fastapi import FastAPI, HTTPException, Query
from pydantic import BaseModel, Field

from .corpus import import_corpus
from .gateway import Gateway
from .metrics import aggregate_report, comparison_table, evaluate_sample
from .prompts import inference_prompt
from .response import (
    MissingSectionError,
    Recommendation,
    SpecSyntaxError,
    parse_response,
)
from .study import (
    NotAssignedError,
    PoolExhaustedError,
    RangeError,
    Rating,
    StudySample,
    StudyStore,
    make_rating,
)
from .tabular import DataTable, EmptyInputError, RaggedRowError, load_csv, sketch
from .vegazero import CompileError, compile_spec, render, validate


class DatasetNotFoundError(KeyError):
    pass


class DatasetStore:
    """Read-mostly dataset index persisted as one JSONL file."""

    def __init__(self, data_dir: Union[str, Path]) -> None:
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.path = self.data_dir / "datasets.jsonl"
        self._lock = threading.Lock()
        self.tables: dict[str, DataTable] = {}
        if self.path.exists():
            for line in self.path.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    record = json.loads(line)
                    self.tables[record["id"]] = DataTable.from_dict(record["table"])

    def add(self, table: DataTable) -> str:
        digest = hashlib.sha256(table.to_json().encode()).hexdigest()[:12]
        dataset_id = f"{table.name}-{digest}"
        with self._lock:
            if dataset_id not in self.tables:
                self.tables[dataset_id] = table
                with self.path.open("a", encoding="utf-8") as fh:
                    fh.write(
                        json.dumps({"id": dataset_id, "table": table.to_dict()}) + "\n"
                    )
        return dataset_id

    def get(self, dataset_id: str) -> DataTable:
        try:
            return self.tables[dataset_id]
        except KeyError:
            raise DatasetNotFoundError(dataset_id) from None


def recommend(
    table: DataTable, query: str, gateway: Gateway
) -> tuple[Recommendation, list]:
    """Sketch, prompt, complete, parse, validate, compile; read-only on data."""
    table_sketch = sketch(table)
    completion = gateway.complete(inference_prompt(table_sketch, query))
    rec = parse_response(completion.text)
    violations = validate(rec.spec, table_sketch)
    if not violations:
        try:
            rec = rec.with_doc(compile_spec(rec.spec, table))
        except CompileError:
            pass
    return rec, violations


class DatasetUpload(BaseModel):
    name: str
    csv_text: str


class RecommendRequest(BaseModel):
    dataset_id: str
    query: str
    backend: str


class RatingRequest(BaseModel):
    participant_id: str
    sample_id: str
    scores: dict[str, int]
    expertise: Optional[int] = None


class PoolRequest(BaseModel):
    samples: list[dict]


class CompletionItem(BaseModel):
    sample_id: str
    text: str


class EvalRunRequest(BaseModel):
    model_name: str
    corpus_index: str
    completions: list[CompletionItem]
    allow_lenient: bool = False


def create_app(
    data_dir: Union[str, Path],
    backends: Optional[dict[str, Gateway]] = None,
    study_seed: int = 0,
) -> FastAPI:
    app = FastAPI(title="vizrec")
    datasets = DatasetStore(data_dir)
    study = StudyStore(data_dir)
    gateways = backends or {}
    reports_dir = Path(data_dir)

    @app.post("/datasets")
    def upload_dataset(payload: DatasetUpload):
        try:
            table = load_csv(payload.csv_text.encode("utf-8"), name=payload.name)
        except (EmptyInputError, RaggedRowError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        dataset_id = datasets.add(table)
        return {"id": dataset_id, "sketch": sketch(table).to_dict()}

    @app.get("/datasets/{dataset_id}")
    def get_dataset(dataset_id: str):
        try:
            return datasets.get(dataset_id).to_dict()
        except DatasetNotFoundError:
            raise HTTPException(status_code=404, detail=f"unknown dataset {dataset_id!r}")

    @app.post("/recommend")
    def post_recommend(payload: RecommendRequest):
        try:
            table = datasets.get(payload.dataset_id)
        except DatasetNotFoundError:
            raise HTTPException(
                status_code=404, detail=f"unknown dataset {payload.dataset_id!r}"
            )
        gateway = gateways.get(payload.backend)
        if gateway is None:
            raise HTTPException(
                status_code=404, detail=f"unknown backend {payload.backend!r}"
            )
        try:
            rec, violations = recommend(table, payload.query, gateway)
        except (MissingSectionError, SpecSyntaxError) as exc:
            raise HTTPException(
                status_code=422,
                detail={"error": str(exc), "raw_text": exc.raw_text},
            )
        return {
            "vegazero": render(rec.spec),
            "narrative": rec.narrative.to_dict(),
            "doc": rec.doc,
            "warnings": [v.to_dict() for v in violations],
            "raw_text": rec.raw_text,
        }

    @app.post("/study/pool")
    def load_pool(payload: PoolRequest):
        samples = [StudySample.from_dict(s) for s in payload.samples]
        study.add_samples(samples)
        return {"loaded": len(samples)}

    @app.get("/study/next")
    def study_next(participant: str = Query(...)):
        try:
            sample = study.next_sample(participant, seed=study_seed)
        except PoolExhaustedError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        if sample is None:
            return {"done": True}
        return {"done": False, "sample": sample.blinded_payload()}

    @app.post("/study/rating")
    def study_rating(payload: RatingRequest):
        rating = make_rating(
            payload.participant_id,
            payload.sample_id,
            payload.scores,
            expertise=payload.expertise,
        )
        try:
            study.record_rating(rating)
        except RangeError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        except NotAssignedError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return {"ok": True}

    @app.get("/study/summary")
    def study_summary():
        try:
            return study.study_summary()
        except ValueError as exc:
            raise HTTPException(status_code=404, detail=str(exc))

    @app.post("/eval/run")
    def eval_run(payload: EvalRunRequest):
        triples, _, _ = import_corpus(payload.corpus_index)
        by_id = {t.id: t for t in triples}
        records = []
        for item in payload.completions:
            truth = by_id.get(item.sample_id)
            if truth is None:
                raise HTTPException(
                    status_code=422, detail=f"unknown sample {item.sample_id!r}"
                )
            records.append(
                evaluate_sample(
                    item.sample_id,
                    item.text,
                    truth,
                    payload.model_name,
                    allow_lenient=payload.allow_lenient,
                )
            )
        report = aggregate_report(records)
        out = reports_dir / f"report_{payload.model_name}.json"
        out.write_text(report.to_json(), encoding="utf-8")
        return report.to_dict()

    @app.get("/eval/report")
    def eval_report(model: str = Query(...)):
        path = reports_dir / f"report_{model}.json"
        if not path.exists():
            raise HTTPException(status_code=404, detail=f"no report for model {model!r}")
        return json.loads(path.read_text(encoding="utf-8"))

    return app
