"""Ecosystem statistics over a classified corpus.

CCDFs of popularity metrics, Pearson correlations between them, yearly
creation trends (overall and grouped by tag), and top-k rankings of
repositories and authors.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import fsum, sqrt

from .records import RepositoryRecord


class EmptyInput(ValueError):
    """Operation needs at least one value."""


class DegenerateInput(ValueError):
    """Correlation is undefined for constant or mismatched sequences."""


@dataclass
class CcdfSeries:
    """Empirical P[X >= x] over the distinct observed values, x ascending."""

    points: list[tuple[float, float]]

    def to_rows(self) -> list[dict]:
        return [{"x": x, "fraction": p} for x, p in self.points]


def ccdf(values) -> CcdfSeries:
    values = list(values)
    if not values:
        raise EmptyInput("ccdf needs at least one value")
    n = len(values)
    ordered = sorted(values)
    points = []
    for i, x in enumerate(ordered):
        if i > 0 and x == ordered[i - 1]:
            continue
        points.append((x, (n - i) / n))
    return CcdfSeries(points=points)


@dataclass(frozen=True)
class CorrelationResult:
    r: float
    n: int


def pearson(x, y) -> CorrelationResult:
    """Product-moment correlation; raises DegenerateInput on constant input."""
    x, y = list(x), list(y)
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    n = len(x)
    if n < 2:
        raise DegenerateInput("need at least two observations")
    mx = fsum(x) / n
    my = fsum(y) / n
    sxx = fsum((a - mx) ** 2 for a in x)
    syy = fsum((b - my) ** 2 for b in y)
    if sxx == 0 or syy == 0:
        raise DegenerateInput("constant sequence has no defined correlation")
    sxy = fsum((a - mx) * (b - my) for a, b in zip(x, y))
    # sqrt separately: sxx * syy can underflow for tiny magnitudes
    return CorrelationResult(r=sxy / (sqrt(sxx) * sqrt(syy)), n=n)


def yearly_trend(records, group: str | None = None, tags=None) -> dict[str, dict[int, int]]:
    """New repositories per creation year, zero-filled over the observed span.

    ``group`` of "type" or "platform" splits the counts by TagAssignment;
    a repository with several tags counts once per tag.
    """
    records = list(records)
    if group not in (None, "type", "platform"):
        raise ValueError(f"group must be None, 'type' or 'platform', got {group!r}")
    if group is not None and tags is None:
        raise ValueError("grouped trends need tag assignments")
    if not records:
        return {}
    years = [rec.created_at.year for rec in records]
    span = range(min(years), max(years) + 1)

    def empty() -> dict[int, int]:
        return {year: 0 for year in span}

    if group is None:
        series = {"overall": empty()}
        for rec in records:
            series["overall"][rec.created_at.year] += 1
        return series

    by_name = {t.repo_name: t for t in tags}
    series = {}
    for rec in records:
        assignment = by_name.get(rec.full_name)
        if assignment is None:
            continue
        keys = assignment.types if group == "type" else assignment.platforms
        for key in keys:
            series.setdefault(key, empty())[rec.created_at.year] += 1
    return dict(sorted(series.items()))


REPO_METRICS = {
    "stars": lambda rec: rec.star_count,
    "forks": lambda rec: rec.fork_count,
    "watchers": lambda rec: rec.watcher_count,
}

AUTHOR_METRICS = ("repo_count", "followers")


def top_k(records, entities: str, metric: str, k: int, malware_names=None) -> list[tuple[str, int]]:
    """Top-k repositories or authors by a metric; ties break name-ascending.

    For authors, ``repo_count`` counts only repositories in
    ``malware_names`` (when given), mirroring per-author malware output.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    records = list(records)
    if entities == "repos":
        if metric not in REPO_METRICS:
            raise ValueError(f"unknown repository metric: {metric!r}")
        get = REPO_METRICS[metric]
        ranked = sorted(((rec.full_name, get(rec)) for rec in records), key=lambda t: (-t[1], t[0]))
        return ranked[:k]
    if entities != "authors":
        raise ValueError(f"entities must be 'repos' or 'authors', got {entities!r}")
    if metric == "repo_count":
        counts: dict[str, int] = {}
        for rec in records:
            if malware_names is not None and rec.full_name not in malware_names:
                continue
            counts[rec.author] = counts.get(rec.author, 0) + 1
    elif metric == "followers":
        counts = {}
        for rec in records:
            counts[rec.author] = max(counts.get(rec.author, 0), rec.author_followers)
    else:
        raise ValueError(f"unknown author metric: {metric!r}")
    ranked = sorted(counts.items(), key=lambda t: (-t[1], t[0]))
    return ranked[:k]


def repos_per_author(records) -> list[int]:
    counts: dict[str, int] = {}
    for rec in records:
        counts[rec.author] = counts.get(rec.author, 0) + 1
    return sorted(counts.values())


def build_report(
    snapshot_records: dict[str, RepositoryRecord],
    malware_names: set[str],
    source_names: set[str],
    assignments,
    matrix,
    top_n: int = 5,
) -> dict:
    """Assemble the full machine-readable analytics report.

    Popularity CCDFs and correlations, the type x platform matrix, yearly
    trends, and author aggregates, all computed over the malware-classified
    subset.
    """
    malware = [snapshot_records[name] for name in sorted(malware_names) if name in snapshot_records]
    report: dict = {
        "counts": {
            "corpus": len(snapshot_records),
            "malware": len(malware_names),
            "malware_with_source": len(source_names),
        },
    }
    if not malware:
        report["note"] = "no malware-classified repositories; analytics skipped"
        return report

    report["ccdf"] = {
        metric: ccdf([get(rec) for rec in malware]).to_rows()
        for metric, get in REPO_METRICS.items()
    }
    correlations = {}
    pairs = (("stars", "forks"), ("forks", "watchers"), ("watchers", "stars"))
    for a, b in pairs:
        try:
            result = pearson(
                [REPO_METRICS[a](rec) for rec in malware],
                [REPO_METRICS[b](rec) for rec in malware],
            )
            correlations[f"{a}_vs_{b}"] = {"r": result.r, "n": result.n}
        except DegenerateInput:
            correlations[f"{a}_vs_{b}"] = {"r": None, "n": len(malware)}
    report["correlations"] = correlations
    report["correlations_note"] = "significance is not computed; r and n only"

    report["trend"] = {
        "overall": _year_rows(yearly_trend(malware)),
        "by_type": _year_rows(yearly_trend(malware, group="type", tags=assignments)),
        "by_platform": _year_rows(yearly_trend(malware, group="platform", tags=assignments)),
    }
    report["type_platform_matrix"] = matrix.to_dict()
    report["authors"] = {
        "repos_ccdf": ccdf(repos_per_author(malware)).to_rows(),
        "top_by_repo_count": top_k(malware, "authors", "repo_count", top_n),
        "top_by_followers": top_k(malware, "authors", "followers", top_n),
    }
    report["top_repositories"] = {
        metric: top_k(malware, "repos", metric, top_n) for metric in REPO_METRICS
    }
    return report


def _year_rows(series: dict[str, dict[int, int]]) -> dict[str, list[dict]]:
    return {
        name: [{"year": year, "count": count} for year, count in sorted(counts.items())]
        for name, counts in series.items()
    }
