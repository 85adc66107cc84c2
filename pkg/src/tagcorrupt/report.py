"""Figure rendering for the report-producing commands.

``estimate`` and ``eval-dist`` can write a grouped bar chart of per-tag
frequencies next to their delimited output.  Rendering is file-only
(Agg backend); the output format follows the file extension.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .tags import ERROR_TAGS, TagDistribution


def render_distribution_figure(series: dict[str, TagDistribution], path) -> None:
    """Bar chart of one or more tag distributions, one group per tag."""
    labels = [t.value for t in ERROR_TAGS]
    x = np.arange(len(labels))
    width = 0.8 / max(len(series), 1)

    fig, ax = plt.subplots(figsize=(12, 4))
    for k, (name, dist) in enumerate(series.items()):
        values = [dist[t] for t in ERROR_TAGS]
        ax.bar(x + k * width - 0.4 + width / 2, values, width, label=name)
    ax.set_xticks(x)
    ax.set_xticklabels(labels, rotation=60, ha="right", fontsize=8)
    ax.set_ylabel("relative frequency")
    ax.legend()
    ax.margins(x=0.01)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
