"""Figures for benchmark reports."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
from matplotlib import pyplot as plt  # noqa: E402

from .bench import USER_TYPES, BenchReport  # noqa: E402


def render_bench(report: BenchReport, path, dpi: int = 120) -> None:
    """Two panels: remaining fraction of work per level, and deliveries per user type."""
    levels = list(report.results)
    xs = range(len(levels))
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.6))

    w = 0.38
    ax1.bar([x - w / 2 for x in xs], [report.ratio(l, "events_delivered") for l in levels],
            w, label="events delivered", color="#4c72b0")
    ax1.bar([x + w / 2 for x in xs], [report.ratio(l, "transitions_evaluated") for l in levels],
            w, label="guards evaluated", color="#dd8452")
    ax1.set_xticks(list(xs), levels)
    ax1.set_xlabel("analysis level")
    ax1.set_ylabel("fraction of unoptimised work")
    ax1.set_ylim(0, 1.05)
    ax1.legend(frameon=False, fontsize=8)

    bottom = [0] * len(levels)
    colors = {"bronze": "#b08d57", "silver": "#a8a9ad", "gold": "#d4af37"}
    for t in USER_TYPES:
        vals = [report.results[l].delivered_by_type.get(t, 0) for l in levels]
        ax2.bar(list(xs), vals, 0.6, bottom=bottom, label=t, color=colors[t])
        bottom = [b + v for b, v in zip(bottom, vals)]
    ax2.set_xticks(list(xs), levels)
    ax2.set_xlabel("analysis level")
    ax2.set_ylabel("events delivered")
    ax2.legend(frameon=False, fontsize=8)

    s = report.scenario
    fig.suptitle(f"{s.users} users, {s.steps} steps each, seed {s.seed}", fontsize=10)
    fig.tight_layout()
    # fixed metadata keeps repeated renders byte-identical
    fig.savefig(path, dpi=dpi, metadata={"Software": None})
    plt.close(fig)
