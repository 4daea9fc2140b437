"""Chart rendering for the report command.

Figures are rendered with matplotlib to standalone SVG.  Output bytes must
be identical across runs for identical inputs, so the SVG id hash salt is
pinned and the date metadata stripped; every series and category is drawn
in sorted order.
"""

from __future__ import annotations

import io
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_RC = {
    "svg.hashsalt": "cooldecomp",
    "figure.figsize": (8.0, 4.5),
    "figure.dpi": 100,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "svg.fonttype": "none",
    "font.family": "DejaVu Sans",
}

_SVG_METADATA = {"Date": None, "Creator": "cooldecomp"}

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


def _render(fig) -> bytes:
    buf = io.BytesIO()
    fig.savefig(buf, format="svg", metadata=_SVG_METADATA)
    plt.close(fig)
    return buf.getvalue()


def intensity_chart(series: Mapping[str, Sequence[tuple[int, float]]]) -> bytes:
    """Carbon-intensity time series, one marked line per (state, locale)."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        for i, label in enumerate(sorted(series)):
            points = series[label]
            ax.plot([y for y, _ in points], [v for _, v in points],
                    marker="o", markersize=3, linewidth=1.2,
                    color=PALETTE[i % len(PALETTE)], label=label)
        ax.set_xlabel("year")
        ax.set_ylabel("carbon intensity (kgCO2/household)")
        ax.legend(loc="upper left", fontsize=8)
        return _render(fig)


def contribution_chart(rows: Sequence[Mapping], factors: Sequence[str]) -> bytes:
    """Grouped driver contributions, one bar cluster per series."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        labels = [f"{r['state']}/{r['locale']}" for r in rows]
        width = 0.8 / max(1, len(factors))
        for j, factor in enumerate(factors):
            values = [r[f"contrib_{factor}_kg"] for r in rows]
            offsets = [i + j * width for i in range(len(rows))]
            ax.bar(offsets, values, width=width,
                   color=PALETTE[j % len(PALETTE)], label=factor)
        ax.set_xticks([i + 0.4 for i in range(len(rows))])
        ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=7)
        ax.set_ylabel("contribution (kgCO2/household)")
        ax.axhline(0.0, color="black", linewidth=0.8)
        ax.legend(fontsize=8)
        fig.tight_layout()
        return _render(fig)


def ranking_chart(values: Mapping[str, float], title: str) -> bytes:
    """Horizontal state ranking by a metric (stand-in for a map view)."""
    with plt.rc_context(_RC):
        ordered = sorted(values.items(), key=lambda kv: (-kv[1], kv[0]))
        fig, ax = plt.subplots(figsize=(8.0, 0.28 * len(ordered) + 1.2))
        names = [k for k, _ in ordered]
        ax.barh(range(len(ordered) - 1, -1, -1), [v for _, v in ordered],
                color=PALETTE[0])
        ax.set_yticks(range(len(ordered) - 1, -1, -1))
        ax.set_yticklabels(names, fontsize=7)
        ax.set_xlabel(title)
        fig.tight_layout()
        return _render(fig)


def efficiency_chart(series: Mapping[str, Sequence[tuple[int, float]]]) -> bytes:
    """Cumulative decarbonization-efficiency curves."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        for i, label in enumerate(sorted(series)):
            points = series[label]
            ax.plot([y for y, _ in points], [v for _, v in points],
                    marker="o", markersize=3, linewidth=1.2,
                    color=PALETTE[i % len(PALETTE)], label=label)
        ax.set_xlabel("year")
        ax.set_ylabel("cumulative decarbonization efficiency")
        ax.legend(loc="lower right", fontsize=8)
        return _render(fig)
