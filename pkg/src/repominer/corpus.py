"""Append-friendly JSONL store for repository records and consensus labels.

``corpus.jsonl`` holds one record per line with keys in a fixed order, so
the file is diffable and a load/save round trip is byte-identical. Writers
take an exclusive lock file next to the store.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from filelock import FileLock

from . import textprep
from .records import RepositoryRecord, TIERS, ValidationError, tier_index, tier_membership


class StorageError(Exception):
    """Corpus file could not be read or written."""


def canonical_line(obj: dict) -> str:
    """Stable single-line JSON used for every record written to disk."""
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


@dataclass
class CorpusSnapshot:
    """In-memory view of the store: records, labels, tier bookkeeping."""

    records: dict[str, RepositoryRecord] = field(default_factory=dict)
    labels: dict[str, str] = field(default_factory=dict)

    @property
    def tier_membership(self) -> dict[str, tuple[str, ...]]:
        return {name: tier_membership(rec.query_tier) for name, rec in self.records.items()}

    def validate(self) -> None:
        for name in self.labels:
            if name not in self.records:
                raise ValidationError(f"labeled repository {name!r} missing from corpus")


def content_hash(record: RepositoryRecord) -> str:
    """Hash of the normalized text content, ignoring name and provenance.

    Mirror repositories uploaded under different owners hash identically.
    """
    tokens = textprep.prepare_repository(record)
    payload = canonical_line(
        {
            "title": tokens.title,
            "description": tokens.description,
            "topics": tokens.topics,
            "readme": tokens.readme,
            "file_names": textprep.prepare_text(
                " ".join(sorted(record.file_paths)), "file_names"
            ).tokens,
        }
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def upsert_record(snapshot: CorpusSnapshot, record: RepositoryRecord) -> bool:
    """Insert or refresh one record; newest fetched_at wins.

    Tier provenance accumulates: the stored query_tier is the smallest tier
    that has ever found the repository. Returns True when the snapshot
    changed.
    """
    record.validate()
    current = snapshot.records.get(record.full_name)
    if current is None:
        snapshot.records[record.full_name] = record
        return True
    min_tier = TIERS[min(tier_index(current.query_tier), tier_index(record.query_tier))]
    if record.fetched_at > current.fetched_at:
        winner = record
    else:
        winner = current
    changed = winner is not current or min_tier != current.query_tier
    winner.query_tier = min_tier
    snapshot.records[record.full_name] = winner
    return changed


def find_exact_duplicates(snapshot: CorpusSnapshot) -> list[list[str]]:
    """Groups of repository names whose normalized content is identical."""
    by_hash: dict[str, list[str]] = {}
    for name in sorted(snapshot.records):
        by_hash.setdefault(content_hash(snapshot.records[name]), []).append(name)
    return [group for _, group in sorted(by_hash.items()) if len(group) >= 2]


def export_tier(snapshot: CorpusSnapshot, tier: str) -> list[RepositoryRecord]:
    """Records retrievable by the given keyword tier, name-sorted."""
    idx = tier_index(tier)
    return [
        snapshot.records[name]
        for name in sorted(snapshot.records)
        if tier_index(snapshot.records[name].query_tier) <= idx
    ]


class CorpusStore:
    """Single-writer, multi-reader JSONL persistence for a snapshot."""

    def __init__(self, corpus_path: Path, labels_path: Path | None = None):
        self.corpus_path = Path(corpus_path)
        self.labels_path = Path(labels_path) if labels_path else self.corpus_path.with_name("labels.jsonl")

    def _lock(self) -> FileLock:
        return FileLock(str(self.corpus_path) + ".lock")

    def load(self) -> CorpusSnapshot:
        snapshot = CorpusSnapshot()
        if self.corpus_path.exists():
            try:
                text = self.corpus_path.read_text(encoding="utf-8")
            except OSError as exc:
                raise StorageError(f"cannot read {self.corpus_path}: {exc}") from exc
            for lineno, line in enumerate(text.splitlines(), start=1):
                if not line.strip():
                    continue
                try:
                    record = RepositoryRecord.from_json_dict(json.loads(line))
                except (json.JSONDecodeError, KeyError, TypeError) as exc:
                    raise StorageError(f"{self.corpus_path}:{lineno}: bad record: {exc}") from exc
                snapshot.records[record.full_name] = record
        if self.labels_path.exists():
            for line in self.labels_path.read_text(encoding="utf-8").splitlines():
                if not line.strip():
                    continue
                entry = json.loads(line)
                snapshot.labels[entry["full_name"]] = entry["label"]
        snapshot.validate()
        return snapshot

    def save(self, snapshot: CorpusSnapshot) -> None:
        lines = [
            canonical_line(snapshot.records[name].to_json_dict())
            for name in sorted(snapshot.records)
        ]
        payload = "\n".join(lines) + ("\n" if lines else "")
        with self._lock():
            try:
                self.corpus_path.parent.mkdir(parents=True, exist_ok=True)
                self.corpus_path.write_text(payload, encoding="utf-8")
            except OSError as exc:
                raise StorageError(f"cannot write {self.corpus_path}: {exc}") from exc
