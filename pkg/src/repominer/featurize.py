"""Per-field vocabulary selection by chi-square score and count vectorization.

Words are scored per field by the lack of independence between their
document-level presence and the class label; the top K words per field are
kept (defaults 30/10/400/100/10 over title, topics, description, file
names, README — 550 slots total). Feature vectors concatenate the
per-field slots in that fixed order.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from math import log
from pathlib import Path

import numpy as np

from .textprep import FIELD_KINDS, TokenizedRepository

MALWARE, BENIGN = "malware", "benign"
CLASSES = (MALWARE, BENIGN)

WEIGHTING_MODES = ("presence", "count", "tfidf")

DEFAULT_BUDGETS = {
    "title": 30,
    "topics": 10,
    "description": 400,
    "file_names": 100,
    "readme": 10,
}


class DegenerateCorpus(ValueError):
    """Labeled data does not contain both classes."""


@dataclass(frozen=True)
class FieldBudget:
    kind: str
    k: int

    def __post_init__(self):
        if self.kind not in FIELD_KINDS:
            raise ValueError(f"unknown field kind: {self.kind!r}")
        if self.k < 1:
            raise ValueError(f"budget for {self.kind} must be >= 1")


def default_budgets() -> list[FieldBudget]:
    return [FieldBudget(kind, k) for kind, k in DEFAULT_BUDGETS.items()]


def _check_classes(labeled) -> None:
    seen = {label for _, label in labeled}
    if not seen >= set(CLASSES):
        raise DegenerateCorpus(f"need both classes, got {sorted(seen)}")


def _chi2_from_counts(a: int, b: int, c: int, d: int) -> float:
    """N*(AD-BC)^2 / ((A+B)(C+D)(A+C)(B+D)); zero for any zero marginal."""
    n = a + b + c + d
    denom = (a + b) * (c + d) * (a + c) * (b + d)
    if denom == 0:
        return 0.0
    return n * (a * d - b * c) ** 2 / denom


def chi_square(word: str, kind: str, labeled) -> float:
    """Chi-square association between a word's presence in one field and the class.

    Presence is counted at document level: a repository either contains the
    word in that field or it does not.
    """
    _check_classes(labeled)
    a = b = c = d = 0
    for repo, label in labeled:
        present = word in repo.tokens_for(kind)
        if label == MALWARE:
            if present:
                a += 1
            else:
                c += 1
        else:
            if present:
                b += 1
            else:
                d += 1
    return _chi2_from_counts(a, b, c, d)


@dataclass
class Vocabulary:
    """Frozen per-field word lists with scores and training document frequencies."""

    mode: str = "count"
    n_train: int = 0
    words: dict[str, list[str]] = field(default_factory=dict)
    scores: dict[str, list[float]] = field(default_factory=dict)
    doc_freq: dict[str, list[int]] = field(default_factory=dict)
    config_hash: str = ""

    @property
    def width(self) -> int:
        return sum(len(self.words[kind]) for kind in FIELD_KINDS)

    def slot_layout(self) -> list[tuple[str, int, int]]:
        """(kind, start, end) spans of each field in the concatenated vector."""
        layout = []
        offset = 0
        for kind in FIELD_KINDS:
            n = len(self.words[kind])
            layout.append((kind, offset, offset + n))
            offset += n
        return layout

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "n_train": self.n_train,
            "config_hash": self.config_hash,
            "fields": {
                kind: {
                    "words": self.words[kind],
                    "scores": self.scores[kind],
                    "doc_freq": self.doc_freq[kind],
                }
                for kind in FIELD_KINDS
            },
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "Vocabulary":
        vocab = cls(
            mode=raw["mode"], n_train=raw["n_train"], config_hash=raw.get("config_hash", "")
        )
        for kind in FIELD_KINDS:
            entry = raw["fields"][kind]
            vocab.words[kind] = list(entry["words"])
            vocab.scores[kind] = [float(s) for s in entry["scores"]]
            vocab.doc_freq[kind] = [int(s) for s in entry["doc_freq"]]
        return vocab

    def sha256(self) -> str:
        payload = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def save(self, path: Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path: Path) -> "Vocabulary":
        return cls.from_dict(json.loads(Path(path).read_text()))


def select_vocabulary(labeled, budgets=None, mode: str = "count") -> Vocabulary:
    """Score every word per field and keep the top K_f, ties lexicographic.

    ``labeled`` is a sequence of (TokenizedRepository, class) pairs with
    both classes present.
    """
    if mode not in WEIGHTING_MODES:
        raise ValueError(f"unknown weighting mode: {mode!r}")
    budget_list = list(budgets) if budgets is not None else default_budgets()
    kinds = [b.kind for b in budget_list]
    if sorted(kinds) != sorted(FIELD_KINDS):
        raise ValueError(f"budgets must cover all five fields exactly once, got {kinds}")
    _check_classes(labeled)
    by_kind = {b.kind: b.k for b in budget_list}

    n_mal = sum(1 for _, label in labeled if label == MALWARE)
    n_ben = len(labeled) - n_mal
    vocab = Vocabulary(mode=mode, n_train=len(labeled))
    for kind in FIELD_KINDS:
        mal_presence: dict[str, int] = {}
        ben_presence: dict[str, int] = {}
        for repo, label in labeled:
            counts = mal_presence if label == MALWARE else ben_presence
            for word in set(repo.tokens_for(kind)):
                counts[word] = counts.get(word, 0) + 1
        candidates = set(mal_presence) | set(ben_presence)
        scored = []
        for word in candidates:
            a = mal_presence.get(word, 0)
            b = ben_presence.get(word, 0)
            scored.append((word, _chi2_from_counts(a, b, n_mal - a, n_ben - b)))
        scored.sort(key=lambda item: (-item[1], item[0]))
        top = scored[: by_kind[kind]]
        vocab.words[kind] = [word for word, _ in top]
        vocab.scores[kind] = [score for _, score in top]
        vocab.doc_freq[kind] = [
            mal_presence.get(word, 0) + ben_presence.get(word, 0) for word, _ in top
        ]
    return vocab


@dataclass
class FeatureVector:
    """Fixed-width concatenated per-field vector for one repository."""

    repo_name: str
    values: np.ndarray

    def __len__(self) -> int:
        return len(self.values)


def vectorize(repo: TokenizedRepository, vocab: Vocabulary) -> FeatureVector:
    """Map token lists onto the vocabulary slots under the chosen weighting.

    Out-of-vocabulary tokens are ignored. tfidf weights are
    count * ln(n_train / df) with df frozen from the training corpus.
    """
    values = np.zeros(vocab.width, dtype=float)
    offset = 0
    for kind in FIELD_KINDS:
        words = vocab.words[kind]
        index = {word: i for i, word in enumerate(words)}
        counts: dict[int, int] = {}
        for token in repo.tokens_for(kind):
            slot = index.get(token)
            if slot is not None:
                counts[slot] = counts.get(slot, 0) + 1
        for slot, count in counts.items():
            if vocab.mode == "presence":
                values[offset + slot] = 1.0
            elif vocab.mode == "count":
                values[offset + slot] = float(count)
            else:
                df = vocab.doc_freq[kind][slot]
                values[offset + slot] = 0.0 if df == 0 else count * log(vocab.n_train / df)
        offset += len(words)
    return FeatureVector(repo_name=repo.name, values=values)
