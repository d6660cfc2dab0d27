"""Figure rendering for reports.

Figures render through matplotlib's SVG backend with a pinned hash salt
and no date metadata, so the same curve always produces the same bytes.
Each plot ships with a CSV twin of its data points so the numbers behind
a figure stay greppable.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from ..metrics import PRCurve
from .compare import ComparisonReport

_SVG_RC = {
    "svg.hashsalt": "potholeval",
    "svg.fonttype": "none",
    "font.family": "sans-serif",
}


@dataclass(frozen=True)
class PRPlot:
    svg: bytes
    csv: bytes
    warning: str | None = None


def _figure_to_svg(fig) -> bytes:
    buf = io.BytesIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    return buf.getvalue()


def _points_csv(curve: PRCurve) -> bytes:
    buf = io.StringIO(newline="")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["confidence", "recall", "precision"])
    for p in curve.points:
        writer.writerow([repr(p.confidence), repr(p.recall), repr(p.precision)])
    return buf.getvalue().encode("utf-8")


def emit_pr_plot(curve: PRCurve) -> PRPlot:
    """Render a precision-recall curve to SVG bytes plus its CSV points.

    An empty curve yields a labeled placeholder figure and a warning
    instead of an error, so batch report generation never dies on an
    image set with no detections.
    """
    warning = None
    with plt.rc_context(_SVG_RC):
        fig, ax = plt.subplots(figsize=(5.0, 5.0))
        ax.set_xlim(0.0, 1.0)
        ax.set_ylim(0.0, 1.05)
        ax.set_xticks([i / 5 for i in range(6)])
        ax.set_yticks([i / 5 for i in range(6)])
        ax.set_xlabel("recall")
        ax.set_ylabel("precision")
        ax.grid(True, linewidth=0.4, alpha=0.5)
        if curve.points:
            ax.plot(
                [p.recall for p in curve.points],
                [p.precision for p in curve.points],
                marker="o",
                markersize=3,
                linewidth=1.2,
            )
            ax.set_title(f"PR curve @ IoU {curve.iou_threshold:g} ({curve.total_gt} GT boxes)")
        else:
            warning = "empty curve: no detections to plot"
            ax.text(0.5, 0.5, "no detections", ha="center", va="center", fontsize=14)
            ax.set_title(f"PR curve @ IoU {curve.iou_threshold:g} (empty)")
        fig.tight_layout()
        svg = _figure_to_svg(fig)
    return PRPlot(svg=svg, csv=_points_csv(curve), warning=warning)


def comparison_figure(comparison: ComparisonReport) -> bytes:
    """Grouped LR/SR bars for the headline metrics of a paired run."""
    names = [n for n, pair in comparison.metrics.items() if pair.delta is not None]
    lr_values = [comparison.metrics[n].lr for n in names]
    sr_values = [comparison.metrics[n].sr for n in names]
    with plt.rc_context(_SVG_RC):
        fig, ax = plt.subplots(figsize=(7.0, 4.0))
        xs = range(len(names))
        width = 0.38
        ax.bar([x - width / 2 for x in xs], lr_values, width, label="LR")
        ax.bar([x + width / 2 for x in xs], sr_values, width, label="SR")
        ax.set_xticks(list(xs))
        ax.set_xticklabels(names, rotation=20, ha="right")
        ax.set_title(comparison.label or "LR vs SR")
        ax.legend()
        ax.grid(True, axis="y", linewidth=0.4, alpha=0.5)
        fig.tight_layout()
        return _figure_to_svg(fig)
