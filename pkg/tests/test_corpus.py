"""Store semantics: upserts, dedup groups, tier exports, byte-stable round trips."""

from datetime import date, datetime, timezone

import pytest

from repominer.corpus import (
    CorpusSnapshot,
    CorpusStore,
    content_hash,
    export_tier,
    find_exact_duplicates,
    upsert_record,
)
from repominer.records import ValidationError

from conftest import make_record


def fetched(hour):
    return datetime(2020, 1, 1, hour, tzinfo=timezone.utc)


class TestUpsert:
    def test_identical_reinsert_is_noop(self):
        snapshot = CorpusSnapshot()
        assert upsert_record(snapshot, make_record()) is True
        assert upsert_record(snapshot, make_record()) is False
        assert len(snapshot.records) == 1

    def test_newest_fetched_at_wins(self):
        snapshot = CorpusSnapshot()
        upsert_record(snapshot, make_record(title="old", fetched_at=fetched(1)))
        assert upsert_record(snapshot, make_record(title="new", fetched_at=fetched(2))) is True
        assert snapshot.records["owner/repo"].title == "new"
        # stale refetch does not clobber
        assert upsert_record(snapshot, make_record(title="stale", fetched_at=fetched(0))) is False
        assert snapshot.records["owner/repo"].title == "new"

    def test_invalid_record_rejected(self):
        snapshot = CorpusSnapshot()
        bad = make_record(created_at=date(2020, 1, 1), modified_at=date(2010, 1, 1))
        with pytest.raises(ValidationError):
            upsert_record(snapshot, bad)
        with pytest.raises(ValidationError):
            upsert_record(snapshot, make_record(star_count=-1))

    def test_tier_accumulates_minimum(self):
        snapshot = CorpusSnapshot()
        upsert_record(snapshot, make_record(query_tier="Q137", fetched_at=fetched(1)))
        upsert_record(snapshot, make_record(query_tier="Q1", fetched_at=fetched(0)))
        assert snapshot.records["owner/repo"].query_tier == "Q1"
        upsert_record(snapshot, make_record(query_tier="Q50", fetched_at=fetched(3)))
        assert snapshot.records["owner/repo"].query_tier == "Q1"


class TestDuplicates:
    def test_mirrors_under_different_owners(self):
        snapshot = CorpusSnapshot()
        upsert_record(snapshot, make_record("a/tool"))
        upsert_record(snapshot, make_record("b/tool"))
        groups = find_exact_duplicates(snapshot)
        assert groups == [["a/tool", "b/tool"]]

    def test_unique_corpus_no_groups(self):
        snapshot = CorpusSnapshot()
        upsert_record(snapshot, make_record("a/x", description="one thing"))
        upsert_record(snapshot, make_record("b/y", description="another thing entirely"))
        assert find_exact_duplicates(snapshot) == []

    def test_three_mirrors_single_group(self):
        snapshot = CorpusSnapshot()
        for owner in ("a", "b", "c"):
            upsert_record(snapshot, make_record(f"{owner}/tool"))
        upsert_record(snapshot, make_record("d/other", description="different"))
        groups = find_exact_duplicates(snapshot)
        assert groups == [["a/tool", "b/tool", "c/tool"]]

    def test_hash_normalizes_formatting(self):
        # same text modulo case/punctuation -> same normalized hash
        a = make_record("a/x", description="Remote Keylogger!!")
        b = make_record("b/x", description="remote keylogger")
        assert content_hash(a) == content_hash(b)

    def test_hash_ignores_file_order(self):
        a = make_record("a/x", file_paths=["a.c", "b.py"])
        b = make_record("b/x", file_paths=["b.py", "a.c"])
        assert content_hash(a) == content_hash(b)


class TestExportTier:
    def _snapshot(self):
        snapshot = CorpusSnapshot()
        upsert_record(snapshot, make_record("a/q1", query_tier="Q1"))
        upsert_record(snapshot, make_record("b/q50", query_tier="Q50"))
        upsert_record(snapshot, make_record("c/q137", query_tier="Q137"))
        return snapshot

    def test_membership_by_tier(self):
        snapshot = self._snapshot()
        assert [r.full_name for r in export_tier(snapshot, "Q1")] == ["a/q1"]
        assert [r.full_name for r in export_tier(snapshot, "Q50")] == ["a/q1", "b/q50"]
        assert [r.full_name for r in export_tier(snapshot, "Q137")] == ["a/q1", "b/q50", "c/q137"]

    def test_subset_chain(self):
        snapshot = self._snapshot()
        q1 = {r.full_name for r in export_tier(snapshot, "Q1")}
        q50 = {r.full_name for r in export_tier(snapshot, "Q50")}
        q137 = {r.full_name for r in export_tier(snapshot, "Q137")}
        assert q1 <= q50 <= q137

    def test_empty_snapshot(self):
        assert export_tier(CorpusSnapshot(), "Q50") == []

    def test_q1_record_in_all_memberships(self):
        snapshot = self._snapshot()
        assert snapshot.tier_membership["a/q1"] == ("Q1", "Q50", "Q137")
        assert snapshot.tier_membership["c/q137"] == ("Q137",)


class TestRoundTrip:
    def test_save_load_save_byte_identical(self, tmp_path):
        store = CorpusStore(tmp_path / "corpus.jsonl")
        snapshot = CorpusSnapshot()
        upsert_record(snapshot, make_record("b/second", description="unicode ✓"))
        upsert_record(snapshot, make_record("a/first"))
        store.save(snapshot)
        first_bytes = (tmp_path / "corpus.jsonl").read_bytes()
        loaded = store.load()
        store.save(loaded)
        assert (tmp_path / "corpus.jsonl").read_bytes() == first_bytes
        assert sorted(loaded.records) == ["a/first", "b/second"]

    def test_labels_loaded(self, tmp_path):
        store = CorpusStore(tmp_path / "corpus.jsonl")
        snapshot = CorpusSnapshot()
        upsert_record(snapshot, make_record("a/x"))
        store.save(snapshot)
        (tmp_path / "labels.jsonl").write_text(
            '{"full_name":"a/x","label":"malware","ballots":[]}\n'
        )
        loaded = store.load()
        assert loaded.labels == {"a/x": "malware"}

    def test_label_for_missing_record_rejected(self, tmp_path):
        store = CorpusStore(tmp_path / "corpus.jsonl")
        (tmp_path / "labels.jsonl").write_text('{"full_name":"ghost/x","label":"malware"}\n')
        with pytest.raises(ValidationError):
            store.load()

    def test_empty_store(self, tmp_path):
        store = CorpusStore(tmp_path / "corpus.jsonl")
        snapshot = store.load()
        assert snapshot.records == {} and snapshot.labels == {}
