"""Render the analytics report to plot-data CSVs and matplotlib PNGs.

One CSV per figure analog, with a PNG rendered next to it. All output is
written under a ``figures/`` directory; nothing is displayed.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _ccdf_figure(report: dict, outdir: Path) -> list[Path]:
    rows = []
    fig, ax = plt.subplots(figsize=(6, 4))
    for metric, points in report["ccdf"].items():
        xs = [p["x"] for p in points]
        ys = [p["fraction"] for p in points]
        rows.extend([metric, x, y] for x, y in zip(xs, ys))
        ax.plot([x if x > 0 else 0.5 for x in xs], ys, marker=".", label=metric)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("count")
    ax.set_ylabel("P[X >= x]")
    ax.set_title("Popularity CCDF over malware repositories")
    ax.legend()
    csv_path = outdir / "ccdf_popularity.csv"
    png_path = outdir / "ccdf_popularity.png"
    _write_csv(csv_path, ["metric", "x", "fraction"], rows)
    fig.savefig(png_path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return [csv_path, png_path]


def _trend_figure(name: str, series: dict, title: str, outdir: Path) -> list[Path]:
    rows = []
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, points in series.items():
        years = [p["year"] for p in points]
        counts = [p["count"] for p in points]
        rows.extend([label, y, c] for y, c in zip(years, counts))
        ax.plot(years, counts, marker="o", label=label)
    ax.set_xlabel("year")
    ax.set_ylabel("new repositories")
    ax.set_title(title)
    if len(series) > 1:
        ax.legend(fontsize=7, ncol=2)
    csv_path = outdir / f"{name}.csv"
    png_path = outdir / f"{name}.png"
    _write_csv(csv_path, ["series", "year", "count"], rows)
    fig.savefig(png_path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return [csv_path, png_path]


def _matrix_figure(report: dict, outdir: Path) -> list[Path]:
    matrix = report["type_platform_matrix"]
    types, platforms = matrix["types"], matrix["platforms"]
    rows = [
        [t] + [matrix["cells"][t][p] for p in platforms] + [matrix["row_totals"][t]]
        for t in types
    ]
    rows.append(["total"] + [matrix["col_totals"][p] for p in platforms] + [matrix["grand_total"]])
    csv_path = outdir / "type_platform_matrix.csv"
    _write_csv(csv_path, ["type"] + platforms + ["total"], rows)

    grid = [[matrix["cells"][t][p] for p in platforms] for t in types]
    fig, ax = plt.subplots(figsize=(5, 6))
    im = ax.imshow(grid, cmap="viridis", aspect="auto")
    ax.set_xticks(range(len(platforms)), platforms, rotation=45, ha="right")
    ax.set_yticks(range(len(types)), types)
    ax.set_title("Malware type x target platform")
    fig.colorbar(im, ax=ax, label="repositories")
    png_path = outdir / "type_platform_matrix.png"
    fig.savefig(png_path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return [csv_path, png_path]


def _author_figure(report: dict, outdir: Path) -> list[Path]:
    points = report["authors"]["repos_ccdf"]
    xs = [p["x"] for p in points]
    ys = [p["fraction"] for p in points]
    csv_path = outdir / "author_repo_ccdf.csv"
    _write_csv(csv_path, ["repos", "fraction"], zip(xs, ys))
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(xs, ys, marker=".")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("malware repositories per author")
    ax.set_ylabel("P[X >= x]")
    ax.set_title("Repositories per author CCDF")
    png_path = outdir / "author_repo_ccdf.png"
    fig.savefig(png_path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return [csv_path, png_path]


def write_figures(report: dict, outdir: Path) -> list[Path]:
    """Emit every figure analog present in the report; returns written paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    if "ccdf" in report:
        written += _ccdf_figure(report, outdir)
    if "trend" in report:
        written += _trend_figure("yearly_new_repos", report["trend"]["overall"],
                                 "New malware repositories per year", outdir)
        written += _trend_figure("yearly_by_type", report["trend"]["by_type"],
                                 "New repositories per malware type", outdir)
        written += _trend_figure("yearly_by_platform", report["trend"]["by_platform"],
                                 "New repositories per target platform", outdir)
    if "type_platform_matrix" in report:
        written += _matrix_figure(report, outdir)
    if "authors" in report:
        written += _author_figure(report, outdir)
    return written
