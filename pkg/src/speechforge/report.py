"""Human-readable and machine-readable dataset reports with rendered figures.

The analyze pipeline calls :func:`write_reports` to drop ``stats.txt``,
``stats.json``, and one PNG histogram per distribution next to the enriched
manifest.
"""
from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .dataset import DatasetStats, Histogram
from .metrics import ErrorReport


def _plot_histogram(hist: Histogram, title: str, xlabel: str, path: Path) -> None:
    edges = list(hist.edges)
    counts = list(hist.counts)
    fig, ax = plt.subplots(figsize=(6, 3.2))
    ax.bar(edges[:-1], counts, width=[b - a for a, b in zip(edges[:-1], edges[1:])],
           align="edge", color="#4878a8", edgecolor="white", linewidth=0.5)
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("utterances")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def format_stats_text(stats: DatasetStats, aggregate: ErrorReport | None = None) -> str:
    lines = [
        "dataset summary",
        "---------------",
        f"utterances       {stats.entry_count}",
        f"total hours      {stats.total_hours:.4f}",
        f"vocabulary size  {stats.vocabulary_size}",
        f"alphabet ({len(stats.alphabet)} chars)  {''.join(sorted(stats.alphabet))!r}",
    ]
    if aggregate is not None:
        lines += [
            "",
            "error metrics (micro-averaged)",
            "------------------------------",
            f"wer       {aggregate.wer:.4f}",
            f"cer       {aggregate.cer:.4f}",
            f"wmr       {aggregate.wmr:.4f}",
            f"accuracy  {aggregate.accuracy:.4f}",
            f"ins/del/sub  {aggregate.insertions}/{aggregate.deletions}/{aggregate.substitutions}",
        ]
    return "\n".join(lines) + "\n"


def write_reports(
    stats: DatasetStats,
    out_dir: str | Path,
    aggregate: ErrorReport | None = None,
) -> list[Path]:
    """Write stats.txt, stats.json, and histogram figures; returns written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    txt = out_dir / "stats.txt"
    txt.write_text(format_stats_text(stats, aggregate), encoding="utf-8")
    written.append(txt)

    doc = stats.to_dict()
    if aggregate is not None:
        doc["metrics"] = {
            "wer": aggregate.wer,
            "cer": aggregate.cer,
            "wmr": aggregate.wmr,
            "accuracy": aggregate.accuracy,
            "ins": aggregate.insertions,
            "del": aggregate.deletions,
            "sub": aggregate.substitutions,
        }
    js = out_dir / "stats.json"
    js.write_text(json.dumps(doc, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    written.append(js)

    for hist, name, xlabel in (
        (stats.duration_histogram, "duration_hist", "seconds"),
        (stats.char_rate_histogram, "char_rate_hist", "characters / second"),
        (stats.word_rate_histogram, "word_rate_hist", "words / second"),
    ):
        fig_path = out_dir / f"{name}.png"
        _plot_histogram(hist, name.replace("_", " "), xlabel, fig_path)
        written.append(fig_path)
    return written
