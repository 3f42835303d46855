"""Text normalization for repository fields.

Three stages, applied in this order by :func:`prepare_text`:

1. entity stripping — URLs, emails and numeric tokens are removed; mixed
   alphanumeric tokens lose their digits ("win32" -> "win");
2. character cleanup — lowercasing, unicode repair, punctuation and
   currency symbols replaced by single spaces;
3. tokenization and filtering — whitespace split, stopword removal,
   stemming, and (for file names) blacklist filtering.

All functions are pure and safe for parallel use.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from importlib import resources

from .porter import stem

FIELD_KINDS = ("title", "topics", "description", "file_names", "readme")

_KEEP_CHARS = frozenset("abcdefghijklmnopqrstuvwxyz0123456789_-")

_URL_RE = re.compile(r"(?:[A-Za-z][A-Za-z0-9+.-]*://\S+|\bwww\.\S+)")
_EMAIL_RE = re.compile(r"[^@\s]+@[^@\s]+\.[^@\s]+")
_NUMBER_RE = re.compile(r"[+-]?\d+(?:[.,]\d+)*")
_DIGITS_RE = re.compile(r"\d+")


def _load_wordfile(name: str) -> frozenset[str]:
    text = resources.files("repominer.data").joinpath(name).read_text(encoding="utf-8")
    entries = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            entries.add(line.lower())
    return frozenset(entries)


STOPWORDS = _load_wordfile("stopwords.txt")
FILENAME_BLACKLIST = _load_wordfile("filename_blacklist.txt")


@dataclass
class TokenizedField:
    """Token list for one repository field, already normalized and stemmed."""

    kind: str
    tokens: list[str]


@dataclass
class TokenizedRepository:
    """The five classifier fields of one repository, tokenized."""

    name: str = ""
    title: list[str] = field(default_factory=list)
    topics: list[str] = field(default_factory=list)
    description: list[str] = field(default_factory=list)
    file_names: list[str] = field(default_factory=list)
    readme: list[str] = field(default_factory=list)

    def tokens_for(self, kind: str) -> list[str]:
        if kind not in FIELD_KINDS:
            raise ValueError(f"unknown field kind: {kind!r}")
        return getattr(self, kind)

    def all_tokens(self) -> set[str]:
        out: set[str] = set()
        for kind in FIELD_KINDS:
            out.update(self.tokens_for(kind))
        return out


def normalize_chars(raw) -> str:
    """Lowercase and strip special characters, keeping token characters.

    Every punctuation or currency symbol becomes a single space; whitespace
    is preserved as-is; malformed sequences are dropped. Total function:
    accepts bytes or str, always returns valid text.
    """
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8", errors="ignore")
    # Drop lone surrogates and decompose accented letters ("é" -> "e").
    raw = raw.encode("utf-8", errors="ignore").decode("utf-8", errors="ignore")
    raw = unicodedata.normalize("NFKD", raw)
    out = []
    for ch in raw:
        if unicodedata.combining(ch):
            continue
        low = ch.lower()
        if low in _KEEP_CHARS:
            out.append(low)
        elif ch.isspace():
            out.append(ch)
        else:
            out.append(" ")
    return "".join(out)


def _apply_number_rule(token: str) -> str | None:
    """Drop number tokens; strip digits from mixed ones, keeping the
    residual when at least two letters remain ("win32" -> "win",
    "v2" -> dropped). Returns None when the token should vanish.
    """
    if _NUMBER_RE.fullmatch(token):
        return None
    if any(c.isdigit() for c in token):
        residual = _DIGITS_RE.sub("", token)
        return residual if sum(c.isalpha() for c in residual) >= 2 else None
    return token


def strip_entities(text: str) -> str:
    """Remove URLs, emails and numbers; strip digits from mixed tokens.

    Output tokens are rejoined with single spaces.
    """
    text = _URL_RE.sub(" ", text)
    kept = []
    for tok in text.split():
        if _EMAIL_RE.fullmatch(tok):
            continue
        tok = _apply_number_rule(tok)
        if tok is not None:
            kept.append(tok)
    return " ".join(kept)


def stem_fixpoint(token: str) -> str:
    """Stem until stable. A single Porter pass is not idempotent for every
    word ("horse" -> "hors" -> "hor"); iterating keeps the whole pipeline
    idempotent. Terminates: every change shortens the word or is y -> i.
    """
    current = stem(token)
    while current != token:
        token, current = current, stem(current)
    return current


def tokenize_and_filter(
    text: str,
    kind: str,
    *,
    stopwords: frozenset[str] = STOPWORDS,
    blacklist: frozenset[str] = FILENAME_BLACKLIST,
) -> TokenizedField:
    """Split char-normalized, entity-stripped text into stemmed tokens.

    Stopwords are dropped before and after stemming (a stem can itself be a
    stopword, e.g. "dos" -> "do"); the filename blacklist is applied the
    same way when ``kind`` is ``file_names``.
    """
    if kind not in FIELD_KINDS:
        raise ValueError(f"unknown field kind: {kind!r}")
    tokens = text.split()
    if kind == "topics":
        # Topic tags are pre-split on hyphens: "malware-analysis" -> two tags.
        tokens = [part for tok in tokens for part in tok.split("-") if part]
    is_files = kind == "file_names"
    out = []
    for tok in tokens:
        # Unicode decomposition can reintroduce digits ("¼" -> "1 4") after
        # entity stripping ran, so the number rule is re-applied here.
        guarded = _apply_number_rule(tok)
        if guarded is None:
            continue
        tok = guarded
        if tok in stopwords or (is_files and tok in blacklist):
            continue
        stemmed = stem_fixpoint(tok)
        if not stemmed or stemmed in stopwords or (is_files and stemmed in blacklist):
            continue
        out.append(stemmed)
    return TokenizedField(kind=kind, tokens=out)


def prepare_text(raw: str, kind: str, **kwargs) -> TokenizedField:
    """Full three-stage pipeline for one field."""
    return tokenize_and_filter(normalize_chars(strip_entities(raw or "")), kind, **kwargs)


def prepare_repository(record) -> TokenizedRepository:
    """Tokenize the five classifier fields of a RepositoryRecord."""
    return TokenizedRepository(
        name=record.full_name,
        title=prepare_text(record.title, "title").tokens,
        topics=prepare_text(" ".join(record.topics), "topics").tokens,
        description=prepare_text(record.description, "description").tokens,
        file_names=prepare_text(" ".join(record.file_paths), "file_names").tokens,
        readme=prepare_text(record.readme, "readme").tokens,
    )
