"""Deterministic synthetic corpus: 60 malware / 60 benign repositories.

Class-dependent word distributions make the corpus separable for the
classifier while sharing a shaped vocabulary pool; metadata (dates,
popularity, authors, file trees) is generated to exercise the analytics
and source-detection paths. Word pools are built from Porter-fixpoint
stems so corpus tokens match vocabulary entries exactly.
"""

import random
from datetime import date, datetime, timezone

from repominer.corpus import CorpusSnapshot, CorpusStore, canonical_line, upsert_record
from repominer.records import RepositoryRecord
from repominer.textprep import STOPWORDS, stem_fixpoint

SEED = 2024

_SYLLABLES = [c + v for c in "bdfgklmnprstvz" for v in "aeiou"]


def _bulk_words(rng: random.Random, count: int, used: set) -> list[str]:
    """Synthetic stem-stable words, unique across all pools."""
    words = []
    while len(words) < count:
        word = "".join(rng.choice(_SYLLABLES) for _ in range(rng.choice((2, 2, 3))))
        stemmed = stem_fixpoint(word)
        if len(stemmed) >= 4 and stemmed not in used and stemmed not in STOPWORDS:
            used.add(stemmed)
            words.append(stemmed)
    return words


def _curated(words: str, used: set) -> list[str]:
    out = []
    for word in words.split():
        stemmed = stem_fixpoint(word)
        if stemmed not in used:
            used.add(stemmed)
            out.append(stemmed)
    return out


_MAL_FLAVOR = (
    "keylogger backdoor botnet trojan rootkit ransomware worm spyware ddos sniffer "
    "inject payload hook exploit shell stealth infect spread grab crypt lock flood spoof"
)
_BEN_FLAVOR = (
    "parser render button layout chart tutorial widget deploy cache query schema router "
    "template engine compile build format lint server client database migrate search page"
)
_PLATFORM_WORDS = ("windows", "linux", "android", "macos", "iot", "ios")

_MAL_EXT = ("c", "py", "cpp", "asm", "go", "h", "sh")
_BEN_EXT = ("md", "txt", "yml", "png", "csv", "json", "rst")
_CODE_EXT_FOR_BENIGN = ("js", "py", "java")

_DOC_NAMES = ("README.md", "LICENSE", "docs/guide.md", "CHANGELOG.md")


class SynthSpec:
    """Frozen pool layout for one generation run."""

    def __init__(self, seed: int = SEED):
        rng = random.Random(seed)
        used: set = set()
        self.mal_title = _curated(_MAL_FLAVOR, used)[:18]
        self.ben_title = _curated(_BEN_FLAVOR, used)[:18]
        self.shared_title = _bulk_words(rng, 12, used)
        self.mal_topics = _bulk_words(rng, 8, used) + [stem_fixpoint(w) for w in _PLATFORM_WORDS[:3]]
        self.ben_topics = _bulk_words(rng, 8, used) + [stem_fixpoint(w) for w in _PLATFORM_WORDS[3:]]
        self.mal_desc = _bulk_words(rng, 260, used)
        self.ben_desc = _bulk_words(rng, 260, used)
        self.shared_desc = _bulk_words(rng, 90, used)
        self.mal_readme = _bulk_words(rng, 30, used)
        self.ben_readme = _bulk_words(rng, 30, used)
        self.shared_readme = _bulk_words(rng, 15, used)
        self.mal_files = _bulk_words(rng, 70, used)
        self.ben_files = _bulk_words(rng, 70, used)
        self.dirs = _bulk_words(rng, 14, used)
        self.rng = rng


def _pick(rng, own_pool, other_pool, shared_pool, n, own_p=0.62, shared_p=0.25):
    out = []
    for _ in range(n):
        roll = rng.random()
        if roll < own_p:
            out.append(rng.choice(own_pool))
        elif roll < own_p + shared_p:
            out.append(rng.choice(shared_pool))
        else:
            out.append(rng.choice(other_pool))
    return out


def _file_paths(rng, spec, malicious: bool) -> list[str]:
    n = rng.randrange(5, 22)
    paths = []
    names = spec.mal_files if malicious else spec.ben_files
    for _ in range(n):
        name = rng.choice(names)
        directory = rng.choice(spec.dirs)
        if malicious:
            ext = rng.choice(_MAL_EXT) if rng.random() < 0.9 else rng.choice(_BEN_EXT)
        else:
            ext = rng.choice(_BEN_EXT) if rng.random() < 0.6 else rng.choice(_CODE_EXT_FOR_BENIGN)
        paths.append(f"{directory}/{name}.{ext}" if rng.random() < 0.7 else f"{name}.{ext}")
    paths.extend(rng.sample(_DOC_NAMES, rng.randrange(0, 3)))
    return paths


def generate(n: int = 120, seed: int = SEED):
    """Return (records, labels) for the fixture corpus; half per class."""
    spec = SynthSpec(seed)
    rng = spec.rng
    authors = [f"author{i:02d}" for i in range(30)]
    prolific = "author00"
    records: list[RepositoryRecord] = []
    labels: dict[str, str] = {}
    for i in range(n):
        malicious = i % 2 == 0
        label = "malware" if malicious else "benign"
        own_t, other_t = (spec.mal_title, spec.ben_title) if malicious else (spec.ben_title, spec.mal_title)
        own_d, other_d = (spec.mal_desc, spec.ben_desc) if malicious else (spec.ben_desc, spec.mal_desc)
        own_r, other_r = (spec.mal_readme, spec.ben_readme) if malicious else (spec.ben_readme, spec.mal_readme)
        own_k, other_k = (spec.mal_topics, spec.ben_topics) if malicious else (spec.ben_topics, spec.mal_topics)

        title = " ".join(_pick(rng, own_t, other_t, spec.shared_title, rng.randrange(2, 5)))
        topics = list(dict.fromkeys(_pick(rng, own_k, other_k, own_k, rng.randrange(1, 5), 0.8, 0.1)))
        description = " ".join(_pick(rng, own_d, other_d, spec.shared_desc, rng.randrange(18, 42)))
        readme = " ".join(_pick(rng, own_r, other_r, spec.shared_readme, rng.randrange(20, 55)))
        author = prolific if rng.random() < 0.18 else rng.choice(authors)
        year = rng.choices(range(2009, 2020), weights=[1, 1, 2, 2, 3, 4, 5, 7, 9, 11, 13])[0]
        created = date(year, rng.randrange(1, 13), rng.randrange(1, 28))
        modified = date(min(year + rng.randrange(0, 3), 2019), 12, rng.randrange(1, 28))
        if modified < created:
            modified = created
        stars = int(rng.lognormvariate(1.0, 1.5))
        forks = max(0, int(stars * 0.45 + rng.gauss(0, 1)))
        watchers = max(0, int(stars * 0.3 + rng.gauss(0, 1)))

        record = RepositoryRecord(
            full_name=f"{author}/{'proj' if not malicious else 'tool'}-{i:03d}",
            title=title,
            description=description,
            topics=topics,
            readme=readme,
            file_paths=_file_paths(rng, spec, malicious),
            created_at=created,
            modified_at=modified,
            fork_count=forks,
            watcher_count=watchers,
            star_count=stars,
            author_followers=rng.randrange(0, 1200),
            author_following=rng.randrange(0, 150),
            fetched_at=datetime(2020, 6, 1, tzinfo=timezone.utc),
            query_tier=rng.choice(("Q1", "Q50", "Q50", "Q137", "Q137", "Q137")),
        )
        record.validate()
        records.append(record)
        labels[record.full_name] = label
    return records, labels


def write_workspace(root, n: int = 120, seed: int = SEED):
    """Materialize corpus.jsonl and labels.jsonl under ``root``."""
    records, labels = generate(n, seed)
    snapshot = CorpusSnapshot()
    for record in records:
        upsert_record(snapshot, record)
    store = CorpusStore(root / "corpus.jsonl", root / "labels.jsonl")
    store.save(snapshot)
    lines = []
    for name in sorted(labels):
        ballots = [
            {"judge_id": judge, "label": labels[name], "timestamp": 0.0}
            for judge in ("synth1", "synth2", "synth3")
        ]
        lines.append(canonical_line({"full_name": name, "label": labels[name], "ballots": ballots}))
    (root / "labels.jsonl").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return store
