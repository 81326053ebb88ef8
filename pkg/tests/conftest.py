from __future__ import annotations

from pathlib import Path

import pytest

from vizrec.corpus import import_corpus
from vizrec.gateway import Gateway, mock_backend

from helpers import TEACHER_SCRIPT

ROOT = Path(__file__).resolve().parent.parent
MINI_INDEX = ROOT / "fixtures" / "mini-corpus" / "index.jsonl"
GOLDEN_DIR = Path(__file__).resolve().parent / "golden"


@pytest.fixture(scope="session")
def mini_corpus():
    triples, stats, quarantine = import_corpus(MINI_INDEX)
    assert not quarantine, [q.reason for q in quarantine]
    assert len(triples) == 60
    return triples


@pytest.fixture()
def teacher_gateway():
    return Gateway(mock_backend(TEACHER_SCRIPT, model_name="teacher-mock"))
