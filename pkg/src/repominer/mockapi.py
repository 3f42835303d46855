"""Deterministic in-process archive double for harvester tests and dry runs.

Implements the same transport protocol as the live client: search with
seven ranking orders and pagination, plus per-repository fetch. Behavior is
fully reproducible from the construction arguments.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from datetime import date

from .harvest import ApiError, AuthError, GoneError, RANK_ORDERS


class SimulatedClock:
    """Manual clock for harvests that must not actually sleep."""

    def __init__(self, start: float = 0.0):
        self.now = start

    def __call__(self) -> float:
        return self.now

    def sleep(self, seconds: float) -> None:
        self.now += max(0.0, seconds)


@dataclass
class MockArchive:
    """Programmable archive: repos keyed by full name, raw-dict metadata.

    ``deleted`` names raise GoneError on fetch; ``failures`` maps a name to
    a queue of statuses thrown before a fetch succeeds (for retry tests);
    ``reject_auth`` makes every call raise AuthError.
    """

    repos: dict[str, dict] = field(default_factory=dict)
    deleted: set[str] = field(default_factory=set)
    failures: dict[str, list[int]] = field(default_factory=dict)
    reject_auth: bool = False
    search_calls: int = 0
    fetch_calls: int = 0

    def _searchable(self, raw: dict) -> str:
        return " ".join(
            [raw.get("title", ""), raw.get("description", ""), " ".join(raw.get("topics", [])), raw.get("readme", "")]
        ).lower()

    def _matches(self, raw: dict, keyword: str) -> int:
        return self._searchable(raw).count(keyword.lower())

    def search(self, keyword: str, rank_order: str, page: int, per_page: int) -> list[str]:
        if self.reject_auth:
            raise AuthError("token revoked")
        if rank_order not in RANK_ORDERS:
            raise ApiError(422, f"bad rank order {rank_order}")
        self.search_calls += 1
        hits = [
            (name, raw, self._matches(raw, keyword))
            for name, raw in self.repos.items()
            if self._matches(raw, keyword) > 0
        ]
        keys = {
            "best_match": lambda item: (-item[2], item[0]),
            "most_stars": lambda item: (-item[1].get("star_count", 0), item[0]),
            "fewest_stars": lambda item: (item[1].get("star_count", 0), item[0]),
            "most_forks": lambda item: (-item[1].get("fork_count", 0), item[0]),
            "fewest_forks": lambda item: (item[1].get("fork_count", 0), item[0]),
            "most_recent": lambda item: (item[1].get("modified_at", ""), item[0]),
            "least_recent": lambda item: (item[1].get("modified_at", ""), item[0]),
        }
        reverse_date = rank_order == "most_recent"
        hits.sort(key=keys[rank_order], reverse=reverse_date)
        names = [name for name, _, _ in hits]
        start = page * per_page
        return names[start : start + per_page]

    def fetch(self, full_name: str) -> dict:
        if self.reject_auth:
            raise AuthError("token revoked")
        self.fetch_calls += 1
        pending = self.failures.get(full_name)
        if pending:
            raise ApiError(pending.pop(0), "injected failure")
        if full_name in self.deleted:
            raise GoneError(full_name)
        if full_name not in self.repos:
            raise GoneError(full_name)
        return dict(self.repos[full_name])


_DEMO_TOPICS = {
    "malware": ["malware", "security", "malware-analysis"],
    "keylogger": ["keylogger", "windows", "spy"],
    "botnet": ["botnet", "iot", "mirai"],
    "ransomware": ["ransomware", "crypto"],
    "implant": ["research", "sample"],
    "benign": ["library", "web", "tools"],
}

_CODE_FILES = ["src/main.c", "src/util.c", "include/util.h", "loader.py", "inject.cpp", "run.sh", "core.js", "agent.go"]
_DOC_FILES = ["README.md", "docs/guide.md", "LICENSE", "assets/logo.png", "data/sample.csv"]


def make_demo_archive(seed: int = 20, n_repos: int = 240) -> MockArchive:
    """A self-consistent archive whose repos hit the shipped keyword tiers.

    Roughly a quarter of the repositories mention "malware" (Q1 hits),
    another slice mentions Q50-only keywords, another Q137-only ones, and
    the rest are reachable only through generic terms.
    """
    rng = random.Random(seed)
    q50_only = ["keylogger", "botnet", "ransomware", "rootkit", "stealer", "zeus"]
    q137_only = ["remcos", "gozi", "hawkeye", "cerber", "satori", "carbanak"]
    generic = ["parser", "dashboard", "compiler", "game", "chat", "editor"]
    archive = MockArchive()
    for i in range(n_repos):
        bucket = rng.random()
        if bucket < 0.25:
            flavor, words = "malware", ["malware"] + rng.sample(q50_only, 2)
        elif bucket < 0.5:
            flavor, words = rng.choice(["keylogger", "botnet", "ransomware"]), rng.sample(q50_only, 3)
        elif bucket < 0.7:
            # reachable only through the Q137-only family keywords
            flavor, words = "implant", rng.sample(q137_only, 3)
        else:
            flavor, words = "benign", rng.sample(generic, 3)
        owner = f"user{rng.randrange(60):02d}"
        name = f"{owner}/{flavor}-{i:04d}"
        created = date(rng.randrange(2009, 2020), rng.randrange(1, 13), rng.randrange(1, 28))
        modified = date(min(created.year + rng.randrange(0, 4), 2020), rng.randrange(1, 13), rng.randrange(1, 28))
        if modified < created:
            modified = created
        stars = int(rng.lognormvariate(1.2, 1.4))
        files = rng.sample(_CODE_FILES, rng.randrange(2, 7)) + rng.sample(_DOC_FILES, rng.randrange(0, 3))
        archive.repos[name] = {
            "full_name": name,
            "title": f"{flavor} tool {i}",
            "description": f"a {flavor} project using " + " ".join(words),
            "topics": rng.sample(_DEMO_TOPICS[flavor if flavor in _DEMO_TOPICS else 'benign'], 2),
            "readme": f"# {flavor}\nThis repository demonstrates {' and '.join(words)}.",
            "file_paths": files,
            "created_at": created.isoformat(),
            "modified_at": modified.isoformat(),
            "fork_count": max(0, int(stars * 0.4) + rng.randrange(-1, 3)),
            "watcher_count": max(0, int(stars * 0.3) + rng.randrange(-1, 2)),
            "star_count": stars,
            "author_followers": rng.randrange(0, 900),
            "author_following": rng.randrange(0, 120),
        }
    return archive
