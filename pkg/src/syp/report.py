"""Figures rendered next to the delimited metrics output."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .metrics import MetricsReport, summarize


def render_metrics_figure(named_reports: list[tuple[str, MetricsReport]], path: Path) -> Path:
    """Grouped mq1/mq2 bars per report, with batch means as dashed lines."""
    names = [name for name, _ in named_reports]
    mq1 = [r.mq1 for _, r in named_reports]
    mq2 = [r.mq2 for _, r in named_reports]
    x = np.arange(len(names))
    width = 0.38

    fig, ax = plt.subplots(figsize=(max(6.0, 0.55 * len(names) + 2.0), 4.0))
    ax.bar(x - width / 2, mq1, width, label="MQ1 (extracted/expected)", color="#4878cf")
    ax.bar(x + width / 2, mq2, width, label="MQ2 (correct/expected)", color="#ee854a")
    if len(named_reports) > 1:
        summary = summarize([r for _, r in named_reports])
        ax.axhline(summary.mean_mq1, color="#4878cf", linestyle="--", linewidth=1)
        ax.axhline(summary.mean_mq2, color="#ee854a", linestyle="--", linewidth=1)
    ax.set_xticks(x)
    ax.set_xticklabels(names, rotation=45, ha="right", fontsize=8)
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("ratio")
    ax.set_title("Beat-sheet completeness and correctness")
    ax.legend(loc="lower left", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
