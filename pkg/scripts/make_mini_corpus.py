"""Regenerate the hand-curated mini-corpus fixture.

Writes fixtures/mini-corpus/: six CSV tables plus an index.jsonl of 60
records spanning all four hardness classes and all four marks. The output
is deterministic; run from the repo root.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "fixtures" / "mini-corpus"

rng = random.Random(20240601)

POSITIONS = ["Captain", "First Officer", "Instructor", "Reserve"]
NATIONALITIES = ["Italian", "French", "German", "Spanish"]
TEAMS = ["Alpha", "Bravo", "Delta"]
PRODUCT_LINES = ["Classic Cars", "Motorcycles", "Planes", "Ships", "Trains"]
REGIONS = ["North", "South", "East", "West"]
DEPARTMENTS = ["Engineering", "Sales", "Marketing", "Support"]
CITIES = ["Rome", "Milan", "Turin", "Naples"]
STATIONS = ["Fiumicino", "Ciampino", "Urbe"]
STATUSES = ["shipped", "pending", "cancelled"]
MAJORS = ["Physics", "Biology", "History", "Computer Science"]
GENDERS = ["F", "M"]


def iso_date(year: int) -> str:
    month = rng.randint(1, 12)
    day = rng.randint(1, 28)
    return f"{year:04d}-{month:02d}-{day:02d}"


def csv_lines(header: list[str], rows: list[list]) -> str:
    out = [",".join(header)]
    for row in rows:
        out.append(",".join(str(c) for c in row))
    return "\n".join(out) + "\n"


def make_tables() -> dict[str, dict]:
    tables: dict[str, dict] = {}

    rows = []
    for i in range(12):
        rows.append(
            [
                i + 1,
                f"Pilot{i + 1}",
                rng.randint(24, 55),
                rng.choice(NATIONALITIES),
                rng.randint(2001, 2020),
                rng.choice(TEAMS),
                rng.choice(POSITIONS),
                rng.randint(1, 20),
            ]
        )
    tables["pilots"] = {
        "header": ["pilot_id", "pilot_name", "age", "nationality", "join_year", "team", "position", "rank"],
        "rows": rows,
        "nominal": ["pilot_name", "nationality", "team", "position"],
        "quant": ["age", "rank"],
        "temporal": "join_year",
    }

    rows = []
    for i in range(15):
        rows.append(
            [
                rng.choice(PRODUCT_LINES),
                rng.randint(1000, 90000),
                rng.randint(5, 400),
                iso_date(rng.randint(2018, 2021)),
                rng.choice(REGIONS),
            ]
        )
    tables["sales"] = {
        "header": ["product_line", "revenue", "units", "order_date", "region"],
        "rows": rows,
        "nominal": ["product_line", "region"],
        "quant": ["revenue", "units"],
        "temporal": "order_date",
    }

    rows = []
    for i in range(14):
        rows.append(
            [
                f"Emp{i + 1}",
                rng.choice(DEPARTMENTS),
                rng.randint(28000, 95000),
                rng.randint(2005, 2022),
                rng.choice(CITIES),
            ]
        )
    tables["employees"] = {
        "header": ["name", "department", "salary", "hire_year", "city"],
        "rows": rows,
        "nominal": ["name", "department", "city"],
        "quant": ["salary"],
        "quant2": "salary",
        "temporal": "hire_year",
    }

    rows = []
    for i in range(16):
        year = rng.randint(2019, 2022)
        rows.append(
            [
                iso_date(year),
                round(rng.uniform(-3.0, 34.0), 1),
                rng.randint(20, 98),
                rng.choice(STATIONS),
            ]
        )
    tables["weather"] = {
        "header": ["date", "temperature", "humidity", "station"],
        "rows": rows,
        "nominal": ["station"],
        "quant": ["temperature", "humidity"],
        "temporal": "date",
    }

    rows = []
    for i in range(15):
        rows.append(
            [
                1000 + i,
                f"Customer{rng.randint(1, 8)}",
                rng.randint(40, 2500),
                iso_date(rng.randint(2020, 2023)),
                rng.choice(STATUSES),
            ]
        )
    tables["orders"] = {
        "header": ["order_id", "customer", "amount", "order_date", "status"],
        "rows": rows,
        "nominal": ["customer", "status"],
        "quant": ["amount"],
        "temporal": "order_date",
    }

    rows = []
    for i in range(14):
        rows.append(
            [
                i + 1,
                rng.choice(MAJORS),
                round(rng.uniform(2.0, 4.0), 2),
                rng.randint(2015, 2023),
                rng.choice(GENDERS),
            ]
        )
    tables["students"] = {
        "header": ["student_id", "major", "gpa", "enroll_year", "gender"],
        "rows": rows,
        "nominal": ["major", "gender"],
        "quant": ["gpa"],
        "temporal": "enroll_year",
    }

    return tables


def make_records(tables: dict[str, dict]) -> list[dict]:
    records = []
    counter = 0

    def add(table: str, hardness: str, query: str, vegazero: str) -> None:
        nonlocal counter
        counter += 1
        records.append(
            {
                "id": f"mc-{counter:03d}",
                "table_file": f"tables/{table}.csv",
                "query": query,
                "hardness": hardness,
                "vegazero": vegazero,
            }
        )

    for name, info in tables.items():
        n1, n2 = info["nominal"][-1], info["nominal"][0]
        quants = info["quant"]
        q1 = quants[0]
        q2 = quants[1] if len(quants) > 1 else quants[0]
        t = info["temporal"]
        nominal_value = str(info["rows"][0][info["header"].index(n1)])
        threshold = info["rows"][1][info["header"].index(q1)]

        # 4 easy
        add(name, "easy", f"What is the average {q1} for each {n1}?",
            f"mark bar encoding x {n1} y aggregate mean {q1} transform group x")
        add(name, "easy", f"How many records are there for each {n1}?",
            f"mark bar encoding x {n1} y aggregate count {n1} transform group x")
        add(name, "easy", f"Show the total {q1} per {n2} as a pie chart.",
            f"mark arc encoding x {n2} y aggregate sum {q1} transform group x")
        if q1 != q2:
            add(name, "easy", f"Show the relationship between {q1} and {q2}.",
                f"mark point encoding x {q1} y aggregate none {q2}")
        else:
            add(name, "easy", f"What is the maximum {q1} for each {n2}?",
                f"mark bar encoding x {n2} y aggregate max {q1} transform group x")

        # 3 medium
        add(name, "medium", f"How does the number of records change by year in {name}?",
            f"mark line encoding x {t} y aggregate count {t} transform bin x by year")
        add(name, "medium", f"What is the average {q1} per {n1}, for records with {q1} above {threshold}?",
            f"mark bar encoding x {n1} y aggregate mean {q1} transform filter {q1} > {threshold} group x")
        add(name, "medium", f"Show the minimum {q1} for each {n2}, sorted alphabetically.",
            f"mark bar encoding x {n2} y aggregate min {q1} transform group x sort x asc")

        # 2 hard
        add(name, "hard",
            f"Show the total {q1} by {n2} for {n1} {nominal_value}, from largest to smallest.",
            f'mark bar encoding x {n2} y aggregate sum {q1} transform filter {n1} = "{nominal_value}" group x sort y desc')
        add(name, "hard", f"What is the average {q1} per year in {name}?",
            f"mark line encoding x {t} y aggregate mean {q1} transform bin x by year sort x asc")

        # 1 extra_hard
        add(name, "extra_hard",
            f"Which three {n1} groups have the highest average {q1}, excluding {n2} {nominal_value}?",
            f'mark bar encoding x {n1} y aggregate mean {q1} transform filter {n2} != "{nominal_value}" group x sort y desc topk 3')

    return records


def main() -> None:
    tables = make_tables()
    (OUT / "tables").mkdir(parents=True, exist_ok=True)
    for name, info in tables.items():
        (OUT / "tables" / f"{name}.csv").write_text(
            csv_lines(info["header"], info["rows"]), encoding="utf-8"
        )
    records = make_records(tables)
    assert len(records) == 60, len(records)
    with (OUT / "index.jsonl").open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
    print(f"wrote {len(records)} records to {OUT}")


if __name__ == "__main__":
    main()
