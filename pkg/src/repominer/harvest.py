"""Archive harvesting: keyword query plans, rate limiting, record fetching.

A search query returns at most 1000 repositories, so each keyword is
re-queried under all seven ranking orders to widen coverage. All requests
pass through one sliding-window rate limiter whose grants are totally
ordered; fetch workers may run in parallel against it.
"""

from __future__ import annotations

import logging
import os
import threading
import time
from collections import deque
from dataclasses import dataclass
from datetime import date, datetime, timezone
from importlib import resources
from pathlib import Path

from .corpus import CorpusSnapshot, upsert_record
from .records import RepositoryRecord

log = logging.getLogger(__name__)

RANK_ORDERS = (
    "best_match",
    "most_stars",
    "fewest_stars",
    "most_forks",
    "fewest_forks",
    "most_recent",
    "least_recent",
)

SEARCH_RESULT_CAP = 1000
PAGE_SIZE = 100
MAX_PAGES = SEARCH_RESULT_CAP // PAGE_SIZE

TOKEN_ENV_VAR = "ARCHIVE_API_TOKEN"

TRANSIENT_STATUSES = frozenset({429, 500, 502, 503, 504})


class EmptyKeywordSet(ValueError):
    """A query plan needs at least one keyword."""


class ApiError(Exception):
    def __init__(self, status: int, message: str = ""):
        super().__init__(f"archive API error {status}: {message}" if message else f"archive API error {status}")
        self.status = status


class AuthError(Exception):
    """Credentials were rejected by the archive."""


class GoneError(Exception):
    """Repository was deleted or made private; never retried."""


@dataclass(frozen=True)
class SearchTask:
    keyword: str
    rank_order: str
    page_cursor: str = ""

    def __post_init__(self):
        if not self.keyword.strip():
            raise EmptyKeywordSet("keyword must be non-blank")
        if self.rank_order not in RANK_ORDERS:
            raise ValueError(f"unknown rank order: {self.rank_order!r}")


@dataclass(frozen=True)
class RateLimitPolicy:
    max_requests: int = 30
    window_seconds: float = 60.0
    authenticated: bool = True

    def __post_init__(self):
        if self.max_requests <= 0:
            raise ValueError("max_requests must be > 0")
        if self.window_seconds <= 0:
            raise ValueError("window must be > 0")


UNAUTHENTICATED_POLICY = RateLimitPolicy(max_requests=10, authenticated=False)


def policy_from_env(env=os.environ) -> RateLimitPolicy:
    """Authenticated 30/min policy when ARCHIVE_API_TOKEN is set, else 10/min."""
    return RateLimitPolicy() if env.get(TOKEN_ENV_VAR) else UNAUTHENTICATED_POLICY


def build_query_plan(keywords, orders=RANK_ORDERS) -> list[SearchTask]:
    """One task per keyword x ranking order, keyword-major."""
    keywords = list(keywords)
    if not keywords:
        raise EmptyKeywordSet("no keywords given")
    return [SearchTask(keyword=kw, rank_order=order) for kw in keywords for order in orders]


_TIER_FILES = {"Q1": "q1.txt", "Q50": "q50.txt", "Q137": "q137.txt"}


def load_keyword_tier(tier: str, directory=None) -> list[str]:
    """Keywords for one tier, from a directory or the packaged defaults."""
    if tier not in _TIER_FILES:
        raise EmptyKeywordSet(f"unknown tier {tier!r}")
    if directory is not None:
        text = (Path(directory) / _TIER_FILES[tier]).read_text(encoding="utf-8")
    else:
        text = (
            resources.files("repominer.data")
            .joinpath("keywords")
            .joinpath(_TIER_FILES[tier])
            .read_text(encoding="utf-8")
        )
    keywords = [line.strip() for line in text.splitlines()
                if line.strip() and not line.startswith("#")]
    if not keywords:
        raise EmptyKeywordSet(f"keyword file for {tier} is empty")
    return keywords


class SlidingWindowLimiter:
    """Grants request permits so no window ever holds more than the policy allows.

    Thread-safe; grants are totally ordered. ``acquire`` never raises: when
    the window is full it returns the earliest admissible future instant.
    """

    def __init__(self, policy: RateLimitPolicy, clock=time.monotonic):
        self.policy = policy
        self.clock = clock
        self._grants: deque[float] = deque()
        self._lock = threading.Lock()

    def acquire(self, now: float | None = None) -> float:
        """Reserve the next permit; returns its grant time (>= now)."""
        with self._lock:
            if now is None:
                now = self.clock()
            horizon = now - self.policy.window_seconds
            while self._grants and self._grants[0] <= horizon:
                self._grants.popleft()
            if len(self._grants) < self.policy.max_requests:
                grant = now
            else:
                grant = self._grants[-self.policy.max_requests] + self.policy.window_seconds
            if self._grants and grant < self._grants[-1]:
                # Keep grants totally ordered even when racing threads read
                # the clock out of order.
                grant = self._grants[-1]
            self._grants.append(grant)
            return grant


def acquire_permit(limiter: SlidingWindowLimiter, now: float | None = None) -> float:
    return limiter.acquire(now)


def _parse_date(value) -> date:
    if isinstance(value, date):
        return value
    return date.fromisoformat(str(value)[:10])


@dataclass
class ArchiveClient:
    """Search and fetch against a transport, with rate limiting and retries.

    The transport supplies ``search(keyword, rank_order, page, per_page)``
    and ``fetch(full_name)``; the deterministic mock archive and the live
    HTTP client both satisfy it.
    """

    transport: object
    limiter: SlidingWindowLimiter
    clock: object = time.monotonic
    sleeper: object = time.sleep
    page_size: int = PAGE_SIZE
    max_pages: int = MAX_PAGES
    retries: int = 3
    retry_base_delay: float = 1.0

    def _wait_for_permit(self) -> None:
        grant = self.limiter.acquire(self.clock())
        delay = grant - self.clock()
        if delay > 0:
            self.sleeper(delay)

    def _request(self, call):
        """Run one transport call under the permit and retry policy."""
        attempt = 0
        while True:
            self._wait_for_permit()
            try:
                return call()
            except GoneError:
                raise
            except AuthError:
                raise
            except ApiError as exc:
                if exc.status not in TRANSIENT_STATUSES or attempt >= self.retries:
                    raise
                delay = self.retry_base_delay * (2 ** attempt)
                log.warning("transient API error %s; retry %d in %.1fs", exc.status, attempt + 1, delay)
                self.sleeper(delay)
                attempt += 1

    def execute_search(self, task: SearchTask) -> list[str]:
        """All stub names for one task, capped at page_size * max_pages."""
        stubs: list[str] = []
        for page in range(self.max_pages):
            batch = self._request(
                lambda page=page: self.transport.search(
                    task.keyword, task.rank_order, page, self.page_size
                )
            )
            stubs.extend(batch)
            if len(batch) < self.page_size:
                break
        return stubs[: self.page_size * self.max_pages]

    def fetch_repository(self, full_name: str, query_tier: str = "Q137") -> RepositoryRecord:
        """Fetch full metadata and the default-branch file tree for one stub."""
        raw = self._request(lambda: self.transport.fetch(full_name))
        record = RepositoryRecord(
            full_name=raw["full_name"],
            title=raw.get("title", ""),
            description=raw.get("description") or "",
            topics=list(raw.get("topics", [])),
            readme=raw.get("readme") or "",
            file_paths=list(raw.get("file_paths", [])),
            created_at=_parse_date(raw["created_at"]),
            modified_at=_parse_date(raw["modified_at"]),
            fork_count=int(raw.get("fork_count", 0)),
            watcher_count=int(raw.get("watcher_count", 0)),
            star_count=int(raw.get("star_count", 0)),
            author_followers=int(raw.get("author_followers", 0)),
            author_following=int(raw.get("author_following", 0)),
            fetched_at=datetime.fromtimestamp(self.clock(), tz=timezone.utc),
            query_tier=query_tier,
        )
        record.validate()
        return record


def is_pathological(record: RepositoryRecord) -> bool:
    """True for contentless repositories: no files, no description, no README."""
    return not record.file_paths and not record.description.strip() and not record.readme.strip()


def harvest_tier(
    client: ArchiveClient,
    snapshot: CorpusSnapshot,
    keywords,
    tier: str,
    orders=RANK_ORDERS,
) -> dict:
    """Run the full plan for one keyword tier into the snapshot.

    Deleted repositories are skipped and logged; pathological records are
    dropped at fetch time. Returns harvest statistics.
    """
    plan = build_query_plan(keywords, orders)
    discovered: list[str] = []
    seen: set[str] = set()
    for task in plan:
        for name in client.execute_search(task):
            if name not in seen:
                seen.add(name)
                discovered.append(name)
    stats = {"tasks": len(plan), "discovered": len(discovered), "fetched": 0, "gone": 0, "pathological": 0}
    for name in discovered:
        try:
            record = client.fetch_repository(name, query_tier=tier)
        except GoneError:
            log.info("skipping deleted repository %s", name)
            stats["gone"] += 1
            continue
        if is_pathological(record):
            stats["pathological"] += 1
            continue
        upsert_record(snapshot, record)
        stats["fetched"] += 1
    return stats


_LIVE_SORT = {
    "best_match": (None, None),
    "most_stars": ("stars", "desc"),
    "fewest_stars": ("stars", "asc"),
    "most_forks": ("forks", "desc"),
    "fewest_forks": ("forks", "asc"),
    "most_recent": ("updated", "desc"),
    "least_recent": ("updated", "asc"),
}


class LiveTransport:
    """Minimal GitHub-style REST transport. Requires network access.

    Reads the token from ARCHIVE_API_TOKEN; without it the archive applies
    the lower unauthenticated rate limit.
    """

    def __init__(self, base_url: str = "https://api.github.com", token: str | None = None):
        import requests

        self.base_url = base_url.rstrip("/")
        self.session = requests.Session()
        self.session.headers["Accept"] = "application/vnd.github+json"
        token = token if token is not None else os.environ.get(TOKEN_ENV_VAR)
        if token:
            self.session.headers["Authorization"] = f"Bearer {token}"

    def _get(self, path: str, **params):
        resp = self.session.get(f"{self.base_url}{path}", params=params or None, timeout=30)
        if resp.status_code == 401:
            raise AuthError(resp.text[:200])
        if resp.status_code in (404, 451):
            raise GoneError(path)
        if resp.status_code >= 400:
            raise ApiError(resp.status_code, resp.text[:200])
        return resp

    def search(self, keyword: str, rank_order: str, page: int, per_page: int) -> list[str]:
        sort, order = _LIVE_SORT[rank_order]
        params = {"q": keyword, "page": page + 1, "per_page": per_page}
        if sort:
            params.update(sort=sort, order=order)
        payload = self._get("/search/repositories", **params).json()
        return [item["full_name"] for item in payload.get("items", [])]

    def fetch(self, full_name: str) -> dict:
        repo = self._get(f"/repos/{full_name}").json()
        readme = ""
        try:
            resp = self.session.get(
                f"{self.base_url}/repos/{full_name}/readme",
                headers={"Accept": "application/vnd.github.raw+json"},
                timeout=30,
            )
            if resp.status_code < 400:
                readme = resp.text
        except OSError:
            pass
        file_paths: list[str] = []
        branch = repo.get("default_branch", "main")
        try:
            tree = self._get(f"/repos/{full_name}/git/trees/{branch}", recursive=1).json()
            file_paths = [e["path"] for e in tree.get("tree", []) if e.get("type") == "blob"]
        except (ApiError, GoneError):
            pass
        owner = repo.get("owner", {}).get("login", full_name.split("/")[0])
        followers = following = 0
        try:
            user = self._get(f"/users/{owner}").json()
            followers = int(user.get("followers", 0))
            following = int(user.get("following", 0))
        except (ApiError, GoneError):
            pass
        return {
            "full_name": repo["full_name"],
            "title": repo["name"],
            "description": repo.get("description") or "",
            "topics": repo.get("topics", []),
            "readme": readme,
            "file_paths": file_paths,
            "created_at": repo["created_at"][:10],
            "modified_at": repo["updated_at"][:10],
            "fork_count": repo.get("forks_count", 0),
            "watcher_count": repo.get("subscribers_count", 0),
            "star_count": repo.get("stargazers_count", 0),
            "author_followers": followers,
            "author_following": following,
        }
