"""Malware-type and target-platform tagging by stemmed keyword matching.

A repository is tagged with a type or platform iff any of that tag's stems
appears, as a whole token, in any of the five tokenized text fields.
Matching is stem equality rather than substring containment, so "antivirus"
never triggers the virus tag.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .textprep import TokenizedRepository, stem_fixpoint

TYPE_COUNT = 13
PLATFORM_COUNT = 6


@dataclass(frozen=True)
class TagLexicon:
    types: dict[str, frozenset[str]]
    platforms: dict[str, frozenset[str]]
    negatives: dict[str, frozenset[str]]

    def __post_init__(self):
        if len(self.types) != TYPE_COUNT:
            raise ValueError(f"expected {TYPE_COUNT} malware types, got {len(self.types)}")
        if len(self.platforms) != PLATFORM_COUNT:
            raise ValueError(f"expected {PLATFORM_COUNT} platforms, got {len(self.platforms)}")


@dataclass
class TagAssignment:
    repo_name: str
    types: set[str] = field(default_factory=set)
    platforms: set[str] = field(default_factory=set)


def _stem_all(words) -> frozenset[str]:
    # fixpoint stemming matches the tokens the textprep pipeline emits
    return frozenset(stem_fixpoint(w.lower()) for w in words)


def load_lexicon(path: Path | None = None) -> TagLexicon:
    """Load the tag lexicon, stemming every keyword with the shared stemmer."""
    if path is None:
        raw = json.loads(resources.files("repominer.data").joinpath("taxonomy.json").read_text())
    else:
        raw = json.loads(Path(path).read_text())
    return TagLexicon(
        types={name: _stem_all(words) for name, words in raw["types"].items()},
        platforms={name: _stem_all(words) for name, words in raw["platforms"].items()},
        negatives={name: _stem_all(words) for name, words in raw.get("negatives", {}).items()},
    )


def tag_repository(repo: TokenizedRepository, lexicon: TagLexicon) -> TagAssignment:
    """Assign every type and platform whose stems intersect the repo tokens."""
    tokens = repo.all_tokens()
    assignment = TagAssignment(repo_name=repo.name)
    for name, stems in lexicon.types.items():
        usable = tokens - lexicon.negatives.get(name, frozenset())
        if usable & stems:
            assignment.types.add(name)
    for name, stems in lexicon.platforms.items():
        usable = tokens - lexicon.negatives.get(name, frozenset())
        if usable & stems:
            assignment.platforms.add(name)
    return assignment


@dataclass
class TypePlatformMatrix:
    """Type x platform co-occurrence counts with totals and multi-label rates."""

    types: list[str]
    platforms: list[str]
    cells: dict[str, dict[str, int]]
    row_totals: dict[str, int]
    col_totals: dict[str, int]
    grand_total: int
    n_repositories: int
    multi_type_rate: float
    multi_platform_rate: float

    def to_dict(self) -> dict:
        return {
            "types": self.types,
            "platforms": self.platforms,
            "cells": self.cells,
            "row_totals": self.row_totals,
            "col_totals": self.col_totals,
            "grand_total": self.grand_total,
            "n_repositories": self.n_repositories,
            "multi_type_rate": self.multi_type_rate,
            "multi_platform_rate": self.multi_platform_rate,
        }


def build_matrix(assignments, lexicon: TagLexicon) -> TypePlatformMatrix:
    """cell(t, p) counts repositories assigned both t and p."""
    assignments = list(assignments)
    types = sorted(lexicon.types)
    platforms = sorted(lexicon.platforms)
    cells = {t: {p: 0 for p in platforms} for t in types}
    for assignment in assignments:
        for t in assignment.types:
            for p in assignment.platforms:
                cells[t][p] += 1
    row_totals = {t: sum(cells[t].values()) for t in types}
    col_totals = {p: sum(cells[t][p] for t in types) for p in platforms}
    n = len(assignments)
    multi_type = sum(1 for a in assignments if len(a.types) > 1)
    multi_platform = sum(1 for a in assignments if len(a.platforms) > 1)
    return TypePlatformMatrix(
        types=types,
        platforms=platforms,
        cells=cells,
        row_totals=row_totals,
        col_totals=col_totals,
        grand_total=sum(row_totals.values()),
        n_repositories=n,
        multi_type_rate=multi_type / n if n else 0.0,
        multi_platform_rate=multi_platform / n if n else 0.0,
    )
