"""Shared test utilities: seeded random AST/table generators, an independent
brute-force execution oracle, and canned mock-backend scripts."""

from __future__ import annotations

import random
import string

from vizrec.narrative import Narrative
from vizrec.tabular import ColumnType, DataTable
from vizrec.vegazero import (
    Aggregate,
    BinUnit,
    Comparison,
    Mark,
    Predicate,
    SortAxis,
    SortDir,
    VegaZeroSpec,
)

_NAME_ALPHABET = string.ascii_lowercase + "_"


def _name(rng: random.Random, prefix: str = "") -> str:
    return prefix + "".join(rng.choice(_NAME_ALPHABET) for _ in range(rng.randint(3, 8)))


def random_literal(rng: random.Random):
    kind = rng.randrange(3)
    if kind == 0:
        return rng.randint(-100, 100)
    if kind == 1:
        return round(rng.uniform(-100, 100), 3)
    return "".join(rng.choice(string.ascii_letters) for _ in range(rng.randint(1, 6)))


def random_predicate(rng: random.Random, columns: list[str]) -> Predicate:
    groups = []
    for _ in range(rng.randint(1, 2)):
        comps = tuple(
            Comparison(
                rng.choice(columns),
                rng.choice(("=", "!=", "<", "<=", ">", ">=")),
                random_literal(rng),
            )
            for _ in range(rng.randint(1, 3))
        )
        groups.append(comps)
    return Predicate(tuple(groups))


def random_ast(rng: random.Random) -> VegaZeroSpec:
    """A structurally valid random spec over synthetic column names.

    Honors the type-free invariants (distinct x/y unless count, topk only
    with sort) so the round-trip law applies.
    """
    columns = [_name(rng, "c") for _ in range(rng.randint(2, 6))]
    aggregate = rng.choice(list(Aggregate))
    x = rng.choice(columns)
    if aggregate is Aggregate.COUNT:
        y = rng.choice(columns)
    else:
        y = rng.choice([c for c in columns if c != x] or [x + "y"])
    color = rng.choice([None, rng.choice(columns)])
    sort = None
    if rng.random() < 0.5:
        sort = (rng.choice(list(SortAxis)), rng.choice(list(SortDir)))
    return VegaZeroSpec(
        mark=rng.choice(list(Mark)),
        x=x,
        y=y,
        aggregate=aggregate,
        data_name=_name(rng, "t") if rng.random() < 0.4 else None,
        color=color,
        filter=random_predicate(rng, columns) if rng.random() < 0.5 else None,
        group_x=rng.random() < 0.5,
        bin_unit=rng.choice(list(BinUnit)) if rng.random() < 0.25 else None,
        sort=sort,
        topk=rng.randint(1, 10) if sort and rng.random() < 0.5 else None,
    )


def random_table(rng: random.Random, max_rows: int = 20) -> DataTable:
    """Small random table: 1-2 nominal, 1-2 quantitative, one temporal column."""
    columns = []
    for i in range(rng.randint(1, 2)):
        columns.append((f"n{i}", ColumnType.NOMINAL))
    for i in range(rng.randint(1, 2)):
        columns.append((f"q{i}", ColumnType.QUANTITATIVE))
    columns.append(("event_year", ColumnType.TEMPORAL))

    def cell(ctype: ColumnType):
        if rng.random() < 0.1:
            return None
        if ctype is ColumnType.NOMINAL:
            return rng.choice(["red", "blue", "green", "gray"])
        if ctype is ColumnType.QUANTITATIVE:
            return rng.choice([rng.randint(-50, 50), round(rng.uniform(-50, 50), 2)])
        return rng.randint(1990, 2030)

    rows = tuple(
        tuple(cell(ctype) for _, ctype in columns)
        for _ in range(rng.randint(0, max_rows))
    )
    return DataTable(name="rand", columns=tuple(columns), rows=rows)


def random_spec_for_table(rng: random.Random, table: DataTable) -> VegaZeroSpec:
    """A spec that validates against the table (empty violation list)."""
    nominal = [n for n, t in table.columns if t is ColumnType.NOMINAL]
    quant = [n for n, t in table.columns if t is ColumnType.QUANTITATIVE]
    temporal = [n for n, t in table.columns if t is ColumnType.TEMPORAL]
    all_cols = [n for n, _ in table.columns]

    aggregate = rng.choice(list(Aggregate))
    if aggregate in (Aggregate.MEAN, Aggregate.SUM, Aggregate.MIN, Aggregate.MAX):
        y = rng.choice(quant)
        x = rng.choice([c for c in all_cols if c != y])
    elif aggregate is Aggregate.COUNT:
        x = rng.choice(all_cols)
        y = rng.choice(all_cols)
    else:
        x = rng.choice(all_cols)
        y = rng.choice([c for c in all_cols if c != x])

    bin_unit = None
    if x in temporal and rng.random() < 0.5:
        bin_unit = BinUnit.YEAR

    color = None
    candidates = [c for c in nominal if c not in (x, y)]
    if candidates and rng.random() < 0.3:
        color = rng.choice(candidates)

    filter_pred = None
    if rng.random() < 0.5:
        groups = []
        for _ in range(rng.randint(1, 2)):
            comps = []
            for _ in range(rng.randint(1, 2)):
                col = rng.choice(all_cols)
                ctype = dict(table.columns)[col]
                if ctype is ColumnType.NOMINAL:
                    value = rng.choice(["red", "blue", "green", "gray"])
                elif ctype is ColumnType.QUANTITATIVE:
                    value = rng.randint(-50, 50)
                else:
                    value = rng.randint(1990, 2030)
                comps.append(
                    Comparison(col, rng.choice(("=", "!=", "<", "<=", ">", ">=")), value)
                )
            groups.append(tuple(comps))
        filter_pred = Predicate(tuple(groups))

    sort = None
    if rng.random() < 0.5:
        sort = (rng.choice(list(SortAxis)), rng.choice(list(SortDir)))

    return VegaZeroSpec(
        mark=rng.choice(list(Mark)),
        x=x,
        y=y,
        aggregate=aggregate,
        color=color,
        filter=filter_pred,
        group_x=aggregate is not Aggregate.NONE and rng.random() < 0.7,
        bin_unit=bin_unit,
        sort=sort,
        topk=rng.randint(1, 8) if sort and rng.random() < 0.4 else None,
    )


# ---------------------------------------------------------------------------
# Independent brute-force oracle: naive nested-loop implementation written
# directly from the stated execution semantics, sharing no code with the
# executor under test.
# ---------------------------------------------------------------------------


def _oracle_compare(cell, op, literal) -> bool:
    if cell is None:
        return False
    cell_is_num = isinstance(cell, (int, float))
    lit_is_num = isinstance(literal, (int, float))
    if cell_is_num != lit_is_num:
        return op == "!="
    table = {
        "=": cell == literal,
        "!=": cell != literal,
        "<": cell < literal,
        "<=": cell <= literal,
        ">": cell > literal,
        ">=": cell >= literal,
    }
    return table[op]


def _oracle_bin(value, unit):
    import datetime

    if value is None:
        return None
    if isinstance(value, (int, float)):
        return int(value) if unit is BinUnit.YEAR else None
    try:
        if unit is BinUnit.YEAR:
            return int(str(value)[:4])
        d = datetime.date.fromisoformat(str(value)[:10])
    except ValueError:
        return None
    return d.month if unit is BinUnit.MONTH else d.isoweekday()


def oracle_execute(spec: VegaZeroSpec, table: DataTable) -> list[tuple]:
    """Reference result rows computed by exhaustive nested loops."""
    names = [n for n, _ in table.columns]
    dict_rows = [dict(zip(names, row)) for row in table.rows]

    if spec.filter:
        kept = []
        for row in dict_rows:
            ok = False
            for group in spec.filter.groups:
                if all(_oracle_compare(row[c.column], c.op, c.value) for c in group):
                    ok = True
            if ok:
                kept.append(row)
        dict_rows = kept

    def xval(row):
        v = row[spec.x]
        return _oracle_bin(v, spec.bin_unit) if spec.bin_unit else v

    def sort_key(v):
        return (v is not None, "" if v is None else v)

    if spec.aggregate is not Aggregate.NONE:
        keys = []
        for row in dict_rows:
            k = (xval(row),) + ((row[spec.color],) if spec.color else ())
            if k not in keys:
                keys.append(k)
        keys.sort(key=lambda k: tuple(sort_key(p) for p in k))
        out = []
        for k in keys:
            members = [
                row
                for row in dict_rows
                if ((xval(row),) + ((row[spec.color],) if spec.color else ())) == k
            ]
            ys = [row[spec.y] for row in members]
            present = [v for v in ys if v is not None]
            if spec.aggregate is Aggregate.COUNT:
                agg = len(ys)
            elif spec.aggregate is Aggregate.SUM:
                agg = sum(present) if present else 0
            elif not present:
                agg = None
            elif spec.aggregate is Aggregate.MEAN:
                agg = sum(present) / len(present)
            elif spec.aggregate is Aggregate.MIN:
                agg = min(present)
            else:
                agg = max(present)
            out.append((k[0], agg) + k[1:])
    else:
        out = [
            (xval(row), row[spec.y]) + ((row[spec.color],) if spec.color else ())
            for row in dict_rows
        ]

    if spec.sort:
        axis, direction = spec.sort
        idx = 0 if axis is SortAxis.X else 1
        out = sorted(out, key=lambda r: sort_key(r[idx]), reverse=direction is SortDir.DESC)

    if spec.topk is not None:
        out = out[: spec.topk]
    return out


# ---------------------------------------------------------------------------
# Canned mock-backend material
# ---------------------------------------------------------------------------

TEACHER_SCRIPT = {
    r"\[EXPLANATION-1\]\n<summary": (
        "[EXPLANATION-1]\nThe user wants to compare an aggregated measure across groups.\n"
        "[EXPLANATION-2]\nThe selected columns directly answer the question and the "
        "aggregate summarizes each group; the other features do not contribute."
    ),
    r"\[CAPTION\]\n<one caption": (
        "[CAPTION]\nThe chart shows the aggregated measure for each group on the x-axis."
    ),
    r"\[SUGGESTIONS\]\n1\)": (
        "[SUGGESTIONS]\n"
        "1) Which group has the highest value?\n"
        "2) Which group has the lowest value?\n"
        "3) Are any groups significantly different from the others?"
    ),
}

FIG5_QUERY = "Which product lines generate the most revenue?"

FIG5_RESPONSE = (
    "[VEGAZERO]\n"
    "mark bar encoding x product_line y aggregate sum revenue transform group x sort y desc\n"
    "[EXPLANATION-1]\n"
    "The user wants to know which product lines bring in the most revenue.\n"
    "[EXPLANATION-2]\n"
    "The product_line and revenue columns are selected because they directly answer the "
    "question; revenue is summed per product line so lines can be compared.\n"
    "[CAPTION]\n"
    "A bar chart where the x-axis shows each product line and the y-axis shows its total "
    "revenue, sorted from largest to smallest.\n"
    "[SUGGESTIONS]\n"
    "1) Which regions contribute most to the top product line?\n"
    "2) How has revenue changed over time for each product line?\n"
    "3) Which product line sells the most units?"
)


def complete_narrative() -> Narrative:
    return Narrative(
        e1="The user wants a per-group summary.",
        e2="The grouped column and the aggregated measure answer the question directly.",
        caption="A chart summarizing the measure per group.",
        suggestions=(
            "Which group ranks highest?",
            "Which group ranks lowest?",
            "How does the measure change over time?",
        ),
    )
