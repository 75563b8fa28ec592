"""Raster figures rendered with matplotlib (Agg backend, no display needed)."""
from __future__ import annotations

from collections.abc import Sequence
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .experiments import LevelSummary, ScenarioMatrix  # noqa: E402

_PANELS = (
    ("si", "(a) Sprawl Index", "SI"),
    ("rir", "(b) Risk incident rate", "incidents / 1,000 actions"),
    ("etcr", "(c) Effective task completion", "ETCR"),
    ("nbv", "(d) Net Business Value", "NBV"),
)

# Fixed metadata keeps PNG bytes stable across runs.
_PNG_META = {"Software": None}


def metrics_panel(summaries: Sequence[LevelSummary], path: Path) -> Path:
    """2x2 bar chart of per-level means with 95% CI error bars."""
    names = [s.level.name for s in summaries]
    fig, axes = plt.subplots(2, 2, figsize=(9, 6.5))
    colors = plt.cm.RdYlGn([i / max(1, len(names) - 1) for i in range(len(names))])
    for ax, (metric, title, ylabel) in zip(axes.flat, _PANELS):
        means = [getattr(s, metric).mean for s in summaries]
        errs = [getattr(s, metric).ci95_half for s in summaries]
        ax.bar(names, means, yerr=errs, color=colors, edgecolor="black", linewidth=0.5, capsize=4)
        ax.set_title(title)
        ax.set_ylabel(ylabel)
        ax.grid(axis="y", alpha=0.3)
    fig.suptitle("Business outcome metrics by governance maturity level")
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_PNG_META)
    plt.close(fig)
    return path


def nbv_heatmap(matrix: ScenarioMatrix, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    im = ax.imshow(matrix.values, cmap="RdYlGn", aspect="auto")
    ax.set_xticks(range(len(matrix.levels)), [lv.name for lv in matrix.levels])
    ax.set_yticks(range(len(matrix.scenarios)), list(matrix.scenarios))
    for i, row in enumerate(matrix.values):
        for j, v in enumerate(row):
            ax.text(j, i, f"{v:.3f}", ha="center", va="center", fontsize=10)
    fig.colorbar(im, ax=ax, label="mean NBV")
    ax.set_title("Net Business Value by scenario and level")
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_PNG_META)
    plt.close(fig)
    return path


def render_figures(summaries: Sequence[LevelSummary], matrix: ScenarioMatrix, out_dir: Path) -> list[Path]:
    out_dir = Path(out_dir)
    return [
        metrics_panel(summaries, out_dir / "metrics_panel.png"),
        nbv_heatmap(matrix, out_dir / "nbv_heatmap.png"),
    ]
