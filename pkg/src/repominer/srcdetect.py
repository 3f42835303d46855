"""Source-code detection by extension-whitelist ratio.

A repository "contains source code" iff strictly more than the threshold
fraction of its files (default 75%) carry a whitelisted programming
language extension.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

DEFAULT_EXTENSIONS = frozenset(
    {
        "asm", "s",          # assembly
        "c", "h", "cpp", "hpp", "cc",
        "bat",               # batch
        "sh",                # bash
        "ps1",               # powershell
        "java",
        "py",
        "cs",
        "m",                 # objective-c and matlab share it
        "pas",               # pascal
        "vb",
        "php",
        "js",
        "go",
    }
)


@dataclass(frozen=True)
class SourceDetectConfig:
    threshold: float = 0.75
    extensions: frozenset[str] = DEFAULT_EXTENSIONS

    def __post_init__(self):
        if not 0 < self.threshold <= 1:
            raise ValueError(f"threshold must be in (0, 1], got {self.threshold}")
        if not self.extensions:
            raise ValueError("extension whitelist must be non-empty")


@dataclass(frozen=True)
class SourceVerdict:
    is_source: bool
    source_ratio: float
    source_file_count: int
    total_file_count: int


def classify_file(path: str, config: SourceDetectConfig = SourceDetectConfig()) -> bool:
    """True iff the final extension (case-insensitive) is whitelisted.

    Extensionless files (Makefile, Dockerfile, dotfiles) count as non-source.
    """
    if not path:
        raise ValueError("path must be non-empty")
    base = path.rstrip("/").rsplit("/", 1)[-1]
    if "." not in base[1:]:
        return False
    ext = base.rsplit(".", 1)[1].lower()
    return ext in config.extensions


def detect(repo_files, config: SourceDetectConfig = SourceDetectConfig()) -> SourceVerdict:
    """Ratio of whitelisted files over all files; strict > threshold.

    Directory entries (paths ending in "/") are excluded from the count;
    an empty repository is never a source repository.
    """
    files = [p for p in repo_files if p and not p.endswith("/")]
    total = len(files)
    if total == 0:
        return SourceVerdict(False, 0.0, 0, 0)
    source = sum(1 for p in files if classify_file(p, config))
    ratio = source / total
    return SourceVerdict(ratio > config.threshold, ratio, source, total)


def load_config(path: Path) -> SourceDetectConfig:
    """Read a plain key=value override file.

    Recognized keys: ``threshold`` (float) and ``extensions``
    (comma-separated, replaces the default whitelist).
    """
    threshold = 0.75
    extensions = DEFAULT_EXTENSIONS
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key == "threshold":
            threshold = float(value)
        elif key == "extensions":
            extensions = frozenset(
                ext.strip().lstrip(".").lower() for ext in value.split(",") if ext.strip()
            )
        else:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
    return SourceDetectConfig(threshold=threshold, extensions=extensions)
