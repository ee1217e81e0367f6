"""Figure rendering for evaluation reports and corpus statistics.

Every CLI report path can drop a PNG next to its delimited output. Uses the
Agg backend so it works headless.
"""

from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .benchgen import IngestStats  # noqa: E402
from .scoring import REPORT_FIELDS, Report  # noqa: E402


def render_report_figure(report: Report, path: str) -> None:
    """Bar chart of all aggregate rates in one scored dataset."""
    names = list(REPORT_FIELDS[1:])
    values = [float(report.values()[n]) * 100 for n in names]
    fig, ax = plt.subplots(figsize=(8, 4))
    bars = ax.bar(names, values, color="#4878a8")
    ax.set_ylabel("rate [%]")
    ax.set_ylim(0, 105)
    ax.set_title(f"evaluation over {report.n} samples")
    for bar, val in zip(bars, values):
        ax.text(bar.get_x() + bar.get_width() / 2, val + 1.5, f"{val:.1f}",
                ha="center", va="bottom", fontsize=7)
    ax.grid(axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_ingest_figure(stats: Sequence[IngestStats], path: str) -> None:
    """Stacked bars: balanced / rebalanced / dropped fractions per split."""
    splits = [s.split for s in stats]
    balanced = [100 * s.rate("balanced") for s in stats]
    rebalanced = [100 * s.rate("rebalanced") for s in stats]
    dropped = [100 - b - r for b, r in zip(balanced, rebalanced)]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(splits, balanced, label="balanced", color="#2e7d32")
    ax.bar(splits, rebalanced, bottom=balanced, label="rebalanced", color="#7cb342")
    ax.bar(splits, dropped, bottom=[b + r for b, r in zip(balanced, rebalanced)],
           label="dropped", color="#c0c0c0")
    ax.set_ylabel("share of corpus [%]")
    ax.set_ylim(0, 100)
    ax.legend(loc="upper right", fontsize=8)
    ax.set_title("corpus ingestion outcome per split")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_status_figure(counts: dict, path: str, title: str = "balance status") -> None:
    """Histogram over balance-status categories of a checked corpus."""
    names = list(counts)
    values = [counts[k] for k in names]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(names, values, color="#8a5aa8")
    ax.set_ylabel("reactions")
    ax.set_title(title)
    plt.setp(ax.get_xticklabels(), rotation=20, ha="right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
