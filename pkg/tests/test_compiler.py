import json

import pytest

from vizrec.tabular import load_csv
from vizrec.vegazero import (
    CompileError,
    VEGA_LITE_SCHEMA,
    compile_spec,
    doc_to_json,
    parse,
)

from conftest import GOLDEN_DIR

SALES = load_csv(
    b"line,rev,year\nA,10,2020\nB,5,2020\nA,20,2021",
    name="sales",
)


class TestCompile:
    def test_document_shape(self):
        doc = compile_spec(parse("mark bar encoding x line y aggregate sum rev transform group x"), SALES)
        assert doc["$schema"] == VEGA_LITE_SCHEMA
        assert doc["mark"] == "bar"
        assert doc["data"]["values"] == [{"line": "A", "rev": 30}, {"line": "B", "rev": 5}]
        assert doc["encoding"]["x"] == {"field": "line", "type": "nominal"}
        assert doc["encoding"]["y"] == {"field": "rev", "type": "quantitative"}

    def test_transforms_are_materialized_not_declared(self):
        doc = compile_spec(
            parse("mark bar encoding x line y aggregate mean rev transform group x sort y desc"),
            SALES,
        )
        serialized = json.dumps(doc)
        assert "aggregate" not in serialized
        assert "transform" not in doc

    def test_arc_uses_theta_and_color(self):
        doc = compile_spec(parse("mark arc encoding x line y aggregate sum rev transform group x"), SALES)
        assert set(doc["encoding"]) == {"theta", "color"}
        assert doc["encoding"]["theta"]["field"] == "rev"
        assert doc["encoding"]["color"]["field"] == "line"

    def test_sort_x_carried_on_x_channel(self):
        doc = compile_spec(
            parse("mark bar encoding x line y aggregate count line transform group x sort x desc"),
            SALES,
        )
        assert doc["encoding"]["x"]["sort"] == "descending"

    def test_sort_y_encoded_as_channel_reference(self):
        asc = compile_spec(
            parse("mark bar encoding x line y aggregate sum rev transform group x sort y asc"),
            SALES,
        )
        desc = compile_spec(
            parse("mark bar encoding x line y aggregate sum rev transform group x sort y desc"),
            SALES,
        )
        assert asc["encoding"]["x"]["sort"] == "y"
        assert desc["encoding"]["x"]["sort"] == "-y"

    def test_binned_temporal_x_is_ordinal(self):
        doc = compile_spec(
            parse("mark line encoding x year y aggregate count year transform bin x by year"),
            SALES,
        )
        assert doc["encoding"]["x"]["type"] == "ordinal"
        assert doc["data"]["values"] == [{"year": 2020, "count": 2}, {"year": 2021, "count": 1}]

    def test_color_channel(self):
        doc = compile_spec(
            parse("mark point encoding x rev y aggregate none year color line"),
            SALES,
        )
        assert doc["encoding"]["color"] == {"field": "line", "type": "nominal"}

    def test_invalid_spec_raises_with_violations(self):
        with pytest.raises(CompileError) as info:
            compile_spec(parse("mark bar encoding x missing y aggregate count missing"), SALES)
        assert info.value.violations

    def test_every_encoded_field_exists_in_inline_data(self):
        doc = compile_spec(
            parse("mark bar encoding x line y aggregate mean rev color line transform group x"),
            SALES,
        )
        row_keys = set(doc["data"]["values"][0])
        for channel in doc["encoding"].values():
            assert channel["field"] in row_keys


GOLDEN_SPECS = ["mc-001", "mc-013", "mc-015", "mc-020", "mc-034"]


@pytest.mark.parametrize("sample_id", GOLDEN_SPECS)
def test_golden_docs_byte_equal(sample_id, mini_corpus):
    triple = {t.id: t for t in mini_corpus}[sample_id]
    got = doc_to_json(compile_spec(triple.spec, triple.table))
    want = (GOLDEN_DIR / f"{sample_id}.json").read_text(encoding="utf-8")
    assert got == want
