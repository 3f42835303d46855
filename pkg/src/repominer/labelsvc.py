"""Judge-labeling HTTP service: queues, ballots, unanimous consensus, export.

A desk tool, loopback-only by default. Judges get independent, seeded
queue orders and never see each other's ballots. A repository is kept for
the ground truth only when all quorum ballots agree on a non-uncertain
label; any disagreement or uncertainty at quorum excludes it. Ballots are
appended to an audit log; revisions are last-write-wins.
"""

from __future__ import annotations

import json
import random
import threading
import time
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .corpus import canonical_line
from .records import RepositoryRecord

LABELS = ("malware", "benign", "uncertain")
PENDING, KEPT_MALWARE, KEPT_BENIGN, EXCLUDED = "pending", "kept_malware", "kept_benign", "excluded"


class UnknownRepo(KeyError):
    pass


class UnknownJudge(KeyError):
    pass


class InvalidBallot(ValueError):
    pass


@dataclass(frozen=True)
class Ballot:
    repo_name: str
    judge_id: str
    label: str
    timestamp: float


def consensus_status(ballots: dict[str, Ballot], quorum: int) -> str:
    """Unanimity rule: evaluated once quorum ballots exist."""
    if len(ballots) < quorum:
        return PENDING
    labels = {b.label for b in ballots.values()}
    if labels == {"malware"}:
        return KEPT_MALWARE
    if labels == {"benign"}:
        return KEPT_BENIGN
    return EXCLUDED


class LabelService:
    """In-memory judge protocol state with an append-only ballot log."""

    def __init__(
        self,
        records: dict[str, RepositoryRecord],
        judges,
        quorum: int = 3,
        seed: int = 0,
        clock=time.time,
        log_path: Path | None = None,
    ):
        self.records = dict(records)
        self.judges = list(judges)
        if not self.judges:
            raise ValueError("need at least one judge")
        if quorum < 1:
            raise ValueError("quorum must be >= 1")
        self.quorum = quorum
        self.seed = seed
        self.clock = clock
        self.log_path = Path(log_path) if log_path else None
        # latest ballot per (repo, judge); earlier submissions stay in the log
        self._ballots: dict[str, dict[str, Ballot]] = {name: {} for name in self.records}
        self._lock = threading.Lock()
        if self.log_path and self.log_path.exists():
            self._replay_log()

    def _replay_log(self) -> None:
        for line in self.log_path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            raw = json.loads(line)
            ballot = Ballot(raw["repo_name"], raw["judge_id"], raw["label"], raw["timestamp"])
            if ballot.repo_name in self._ballots and ballot.judge_id in self.judges:
                self._ballots[ballot.repo_name][ballot.judge_id] = ballot

    def _check_judge(self, judge_id: str) -> None:
        if judge_id not in self.judges:
            raise UnknownJudge(judge_id)

    def _queue(self, judge_id: str) -> list[str]:
        names = sorted(self.records)
        random.Random(f"{self.seed}:{judge_id}").shuffle(names)
        return [name for name in names if judge_id not in self._ballots[name]]

    def repo_summary(self, name: str) -> dict:
        if name not in self.records:
            raise UnknownRepo(name)
        rec = self.records[name]
        return {
            "full_name": rec.full_name,
            "title": rec.title,
            "description": rec.description,
            "topics": rec.topics,
            "readme": rec.readme,
            "file_paths": rec.file_paths,
            "created_at": rec.created_at.isoformat(),
            "modified_at": rec.modified_at.isoformat(),
            "fork_count": rec.fork_count,
            "watcher_count": rec.watcher_count,
            "star_count": rec.star_count,
            "author_followers": rec.author_followers,
            "author_following": rec.author_following,
        }

    def next_unlabeled(self, judge_id: str) -> tuple[dict | None, int]:
        """The judge's next pending repository and their remaining count."""
        self._check_judge(judge_id)
        with self._lock:
            queue = self._queue(judge_id)
            if not queue:
                return None, 0
            head = self.records[queue[0]]
            summary = {
                "full_name": head.full_name,
                "title": head.title,
                "description": head.description,
            }
            return summary, len(queue)

    def submit_ballot(self, repo_name: str, judge_id: str, label: str) -> str:
        """Store the ballot (last write wins) and return the new consensus."""
        self._check_judge(judge_id)
        if repo_name not in self.records:
            raise UnknownRepo(repo_name)
        if label not in LABELS:
            raise InvalidBallot(f"label must be one of {LABELS}, got {label!r}")
        ballot = Ballot(repo_name, judge_id, label, float(self.clock()))
        with self._lock:
            self._ballots[repo_name][judge_id] = ballot
            if self.log_path:
                with open(self.log_path, "a", encoding="utf-8") as fh:
                    fh.write(canonical_line(ballot.__dict__) + "\n")
            return consensus_status(self._ballots[repo_name], self.quorum)

    def consensus_map(self) -> dict[str, str]:
        with self._lock:
            return {
                name: consensus_status(self._ballots[name], self.quorum)
                for name in sorted(self.records)
            }

    def export_groundtruth(self) -> list[dict]:
        """Kept repositories with their class and contributing ballots."""
        with self._lock:
            out = []
            for name in sorted(self.records):
                status = consensus_status(self._ballots[name], self.quorum)
                if status not in (KEPT_MALWARE, KEPT_BENIGN):
                    continue
                ballots = [
                    {"judge_id": b.judge_id, "label": b.label, "timestamp": b.timestamp}
                    for _, b in sorted(self._ballots[name].items())
                ]
                out.append(
                    {
                        "full_name": name,
                        "label": "malware" if status == KEPT_MALWARE else "benign",
                        "ballots": ballots,
                    }
                )
            return out

    def export_jsonl(self) -> str:
        return "".join(canonical_line(entry) + "\n" for entry in self.export_groundtruth())

    def progress(self) -> dict:
        with self._lock:
            statuses = [consensus_status(self._ballots[name], self.quorum) for name in self.records]
            counts = {status: statuses.count(status) for status in (PENDING, KEPT_MALWARE, KEPT_BENIGN, EXCLUDED)}
            decided = counts[KEPT_MALWARE] + counts[KEPT_BENIGN] + counts[EXCLUDED]
            kept = counts[KEPT_MALWARE] + counts[KEPT_BENIGN]
            per_judge = {}
            for judge in self.judges:
                done = sum(1 for name in self.records if judge in self._ballots[name])
                per_judge[judge] = {"done": done, "remaining": len(self.records) - done}
            return {
                "total": len(self.records),
                "consensus": counts,
                "agreement_rate": kept / decided if decided else None,
                "judges": per_judge,
            }


_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".map": "application/json",
    ".json": "application/json",
    ".svg": "image/svg+xml",
    ".png": "image/png",
}


class _Handler(BaseHTTPRequestHandler):
    service: LabelService
    ui_dir: Path | None = None
    export_path: Path | None = None

    def log_message(self, fmt, *args):  # quiet by default; tests parse stdout
        pass

    def _send_json(self, payload, status: int = 200) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_error(self, status: int, kind: str, detail: str = "") -> None:
        self._send_json({"error": kind, "detail": detail}, status=status)

    def _serve_static(self, path: str) -> None:
        if self.ui_dir is None:
            self._send_error(404, "NoUI", "service started without a UI directory")
            return
        rel = path.lstrip("/") or "index.html"
        target = (self.ui_dir / rel).resolve()
        if not str(target).startswith(str(self.ui_dir.resolve())) or not target.is_file():
            self._send_error(404, "NotFound", rel)
            return
        body = target.read_bytes()
        self.send_response(200)
        self.send_header("Content-Type", _CONTENT_TYPES.get(target.suffix, "application/octet-stream"))
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self) -> None:
        path = self.path.split("?", 1)[0]
        try:
            if path.startswith("/api/queue/"):
                judge = path[len("/api/queue/"):]
                current, remaining = self.service.next_unlabeled(judge)
                self._send_json({"judge": judge, "current": current, "remaining": remaining})
            elif path.startswith("/api/repo/"):
                name = path[len("/api/repo/"):]
                self._send_json(self.service.repo_summary(name))
            elif path == "/api/consensus":
                self._send_json(self.service.consensus_map())
            elif path == "/api/export":
                text = self.service.export_jsonl()
                if self.export_path is not None:
                    self.export_path.write_text(text, encoding="utf-8")
                body = text.encode("utf-8")
                self.send_response(200)
                self.send_header("Content-Type", "application/jsonl")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)
            elif path == "/api/progress":
                self._send_json(self.service.progress())
            else:
                self._serve_static(path)
        except UnknownJudge as exc:
            self._send_error(404, "UnknownJudge", str(exc))
        except UnknownRepo as exc:
            self._send_error(404, "UnknownRepo", str(exc))

    def do_POST(self) -> None:
        if self.path.split("?", 1)[0] != "/api/ballot":
            self._send_error(404, "NotFound", self.path)
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
            payload = json.loads(self.rfile.read(length) or b"{}")
            status = self.service.submit_ballot(
                payload.get("repo_name", ""), payload.get("judge_id", ""), payload.get("label", "")
            )
            self._send_json({"repo_name": payload.get("repo_name"), "status": status})
        except UnknownJudge as exc:
            self._send_error(404, "UnknownJudge", str(exc))
        except UnknownRepo as exc:
            self._send_error(404, "UnknownRepo", str(exc))
        except (InvalidBallot, json.JSONDecodeError, ValueError) as exc:
            self._send_error(400, "InvalidBallot", str(exc))


def make_server(
    service: LabelService,
    host: str = "127.0.0.1",
    port: int = 0,
    ui_dir: Path | None = None,
    export_path: Path | None = None,
) -> ThreadingHTTPServer:
    """Build the HTTP server; port 0 picks a free port (see server_address)."""
    handler = type(
        "BoundHandler",
        (_Handler,),
        {"service": service, "ui_dir": Path(ui_dir) if ui_dir else None,
         "export_path": Path(export_path) if export_path else None},
    )
    return ThreadingHTTPServer((host, port), handler)
