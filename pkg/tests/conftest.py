import random
from datetime import date, datetime, timezone

import pytest

from repominer.records import RepositoryRecord
from repominer.textprep import TokenizedRepository


def make_repo_tokens(name="o/r", **fields) -> TokenizedRepository:
    return TokenizedRepository(name=name, **fields)


def make_record(full_name="owner/repo", **overrides) -> RepositoryRecord:
    base = dict(
        full_name=full_name,
        title="tool",
        description="a tool",
        topics=["tools"],
        readme="# tool",
        file_paths=["src/main.c", "README.md"],
        created_at=date(2015, 3, 1),
        modified_at=date(2016, 4, 2),
        fork_count=1,
        watcher_count=2,
        star_count=3,
        author_followers=4,
        author_following=5,
        fetched_at=datetime(2020, 1, 1, tzinfo=timezone.utc),
        query_tier="Q137",
    )
    base.update(overrides)
    return RepositoryRecord(**base)


@pytest.fixture
def rng():
    return random.Random(12345)
