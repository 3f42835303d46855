"""Repository corpus data model: one record per archived repository."""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from datetime import date, datetime, timezone

TIERS = ("Q1", "Q50", "Q137")


class ValidationError(ValueError):
    """A record or payload violates its invariants."""


def tier_index(tier: str) -> int:
    try:
        return TIERS.index(tier)
    except ValueError:
        raise ValidationError(f"unknown query tier: {tier!r}") from None


def tier_membership(query_tier: str) -> tuple[str, ...]:
    """Tiers a repository belongs to, given the smallest tier that found it.

    Keyword sets nest (Q1 within Q50 within Q137), so anything found by a
    smaller tier's query is found by every larger tier as well.
    """
    return TIERS[tier_index(query_tier):]


_COUNT_FIELDS = (
    "fork_count",
    "watcher_count",
    "star_count",
    "author_followers",
    "author_following",
)


@dataclass
class RepositoryRecord:
    """The ten repository fields plus fetch provenance."""

    full_name: str
    title: str = ""
    description: str = ""
    topics: list[str] = field(default_factory=list)
    readme: str = ""
    file_paths: list[str] = field(default_factory=list)
    created_at: date = date(1970, 1, 1)
    modified_at: date = date(1970, 1, 1)
    fork_count: int = 0
    watcher_count: int = 0
    star_count: int = 0
    author_followers: int = 0
    author_following: int = 0
    fetched_at: datetime = datetime(1970, 1, 1, tzinfo=timezone.utc)
    query_tier: str = "Q137"

    @property
    def author(self) -> str:
        return self.full_name.split("/", 1)[0]

    def validate(self) -> None:
        if not self.full_name or "/" not in self.full_name:
            raise ValidationError(f"full_name must be owner/name, got {self.full_name!r}")
        for name in _COUNT_FIELDS:
            if getattr(self, name) < 0:
                raise ValidationError(f"{self.full_name}: {name} must be >= 0")
        if self.created_at > self.modified_at:
            raise ValidationError(
                f"{self.full_name}: created_at {self.created_at} after modified_at {self.modified_at}"
            )
        tier_index(self.query_tier)

    def to_json_dict(self) -> dict:
        return {
            "full_name": self.full_name,
            "title": self.title,
            "description": self.description,
            "topics": list(self.topics),
            "readme": self.readme,
            "file_paths": list(self.file_paths),
            "created_at": self.created_at.isoformat(),
            "modified_at": self.modified_at.isoformat(),
            "fork_count": self.fork_count,
            "watcher_count": self.watcher_count,
            "star_count": self.star_count,
            "author_followers": self.author_followers,
            "author_following": self.author_following,
            "fetched_at": self.fetched_at.isoformat(),
            "query_tier": self.query_tier,
        }

    @classmethod
    def from_json_dict(cls, raw: dict) -> "RepositoryRecord":
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ValidationError(f"unknown record keys: {sorted(unknown)}")
        data = dict(raw)
        data["created_at"] = date.fromisoformat(data["created_at"])
        data["modified_at"] = date.fromisoformat(data["modified_at"])
        data["fetched_at"] = datetime.fromisoformat(data["fetched_at"])
        record = cls(**data)
        record.validate()
        return record
