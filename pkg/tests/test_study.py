import json

import pytest

from vizrec.narrative import Narrative
from vizrec.study import (
    ASSIGNMENT_SIZE,
    SCORE_DIMENSIONS,
    SIDES,
    NotAssignedError,
    PoolExhaustedError,
    RangeError,
    StudyResponse,
    StudySample,
    StudyStore,
    make_rating,
)
from vizrec.tabular import load_csv, sketch

SKETCH = sketch(load_csv(b"pos,rank\nA,1", name="pilots"))

TAG_A = "MODELTAG-ALPHA"
TAG_B = "MODELTAG-BETA"


def narrative(i: int) -> Narrative:
    return Narrative(
        e1=f"intent {i}", e2=f"design {i}", caption=f"caption {i}", suggestions=(f"q{i}?",)
    )


def sample(i: int) -> StudySample:
    return StudySample(
        id=f"p-{i:03d}",
        sketch=SKETCH,
        query=f"query {i}",
        responses=(
            StudyResponse(TAG_A, "mark bar encoding x pos y aggregate count pos", narrative(i)),
            StudyResponse(TAG_B, "mark point encoding x pos y aggregate none rank", narrative(i + 100)),
        ),
    )


def scores(base: int = 3) -> dict:
    return {f"{dim}_{side}": base for dim in SCORE_DIMENSIONS for side in SIDES}


@pytest.fixture()
def store(tmp_path):
    store = StudyStore(tmp_path)
    store.add_samples([sample(i) for i in range(20)])
    return store


class TestBlinding:
    def test_blinded_payload_has_no_model_tags(self):
        payload = json.dumps(sample(1).blinded_payload())
        assert TAG_A not in payload and TAG_B not in payload
        assert "model_tag" not in payload

    def test_server_side_dict_keeps_tags(self):
        serialized = json.dumps(sample(1).to_dict())
        assert TAG_A in serialized and TAG_B in serialized


class TestAssignment:
    def test_assignment_size_and_idempotence(self, store):
        first = store.assign_samples("alice")
        assert len(first.sample_ids) == ASSIGNMENT_SIZE
        assert store.assign_samples("alice") == first

    def test_least_loaded_first_is_fair(self, store):
        for i in range(6):
            store.assign_samples(f"participant-{i}")
        counts = [s.assignment_count for s in store.samples.values()]
        # 6 participants x 10 slots over 20 samples = exactly 3 each.
        assert counts == [3] * 20

    def test_pool_exhaustion(self, tmp_path):
        small = StudyStore(tmp_path / "small")
        small.add_samples([sample(i) for i in range(5)])
        with pytest.raises(PoolExhaustedError):
            small.assign_samples("alice")

    def test_duplicate_sample_ids_rejected(self, store):
        with pytest.raises(ValueError):
            store.add_samples([sample(0)])

    def test_next_sample_walks_the_assignment(self, store):
        seen = []
        while True:
            nxt = store.next_sample("bob")
            if nxt is None:
                break
            seen.append(nxt.id)
            store.record_rating(make_rating("bob", nxt.id, scores()))
        assert len(seen) == ASSIGNMENT_SIZE
        assert len(set(seen)) == ASSIGNMENT_SIZE


class TestRatings:
    def test_range_validation(self, store):
        store.assign_samples("alice")
        sid = store.assignments["alice"].sample_ids[0]
        for bad in (0, 6, "3", 3.0, True):
            broken = scores()
            broken["vis_quality_a"] = bad
            with pytest.raises(RangeError, match="vis_quality_a"):
                store.record_rating(make_rating("alice", sid, broken))

    def test_missing_dimension_rejected(self, store):
        store.assign_samples("alice")
        sid = store.assignments["alice"].sample_ids[0]
        partial = scores()
        del partial["overall_narrative_b"]
        with pytest.raises(RangeError):
            store.record_rating(make_rating("alice", sid, partial))

    def test_unassigned_sample_rejected(self, store):
        store.assign_samples("alice")
        outside = next(
            sid for sid in store.samples if sid not in store.assignments["alice"].sample_ids
        )
        with pytest.raises(NotAssignedError):
            store.record_rating(make_rating("alice", outside, scores()))

    def test_duplicate_rating_overwrites(self, store):
        store.assign_samples("alice")
        sid = store.assignments["alice"].sample_ids[0]
        store.record_rating(make_rating("alice", sid, scores(2)))
        store.record_rating(make_rating("alice", sid, scores(5)))
        assert store.ratings[("alice", sid)].scores["vis_quality_a"] == 5


class TestPersistence:
    def test_reload_restores_state(self, tmp_path):
        store = StudyStore(tmp_path)
        store.add_samples([sample(i) for i in range(10)])
        assignment = store.assign_samples("alice")
        store.record_rating(make_rating("alice", assignment.sample_ids[0], scores(4)))

        reloaded = StudyStore(tmp_path)
        assert set(reloaded.samples) == set(store.samples)
        assert reloaded.assignments["alice"] == assignment
        assert reloaded.ratings[("alice", assignment.sample_ids[0])].scores == scores(4)
        assert reloaded.samples[assignment.sample_ids[0]].assignment_count == 1


class TestSummary:
    def test_unblinds_and_aggregates(self, store):
        a1 = store.assign_samples("alice")
        mixed = scores(2)
        for dim in SCORE_DIMENSIONS:
            mixed[f"{dim}_b"] = 4
        store.record_rating(make_rating("alice", a1.sample_ids[0], mixed, expertise=5))
        store.record_rating(make_rating("alice", a1.sample_ids[1], mixed, expertise=5))

        summary = store.study_summary()
        assert summary["n_ratings"] == 2
        overall = summary["overall"]
        assert overall[TAG_A]["vis_quality"]["mean"] == 2.0
        assert overall[TAG_B]["vis_quality"]["mean"] == 4.0
        assert overall[TAG_A]["vis_quality"]["n"] == 2
        assert overall[TAG_A]["vis_quality"]["std"] == 0.0
        assert "expert" in summary["cohorts"]

    def test_std_is_null_for_single_rating(self, store):
        assignment = store.assign_samples("alice")
        store.record_rating(make_rating("alice", assignment.sample_ids[0], scores(3)))
        summary = store.study_summary()
        assert summary["overall"][TAG_A]["vis_quality"]["std"] is None

    def test_cohort_split(self, store):
        assignment = store.assign_samples("alice")
        sids = assignment.sample_ids
        store.record_rating(make_rating("alice", sids[0], scores(3), expertise=5))
        store.record_rating(make_rating("alice", sids[1], scores(3), expertise=2))
        store.record_rating(make_rating("alice", sids[2], scores(3)))
        cohorts = store.study_summary()["cohorts"]
        assert set(cohorts) == {"expert", "non_expert", "unspecified"}

    def test_no_ratings_raises(self, store):
        with pytest.raises(ValueError):
            store.study_summary()
