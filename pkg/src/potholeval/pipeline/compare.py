"""Paired low-resolution vs super-resolved run comparison.

Two reports are only comparable when they were scored the same way (same
IoU thresholds and AP mode); otherwise the deltas would mix measurement
conventions. Every delta is exactly the SR value minus the LR value.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ValidationError
from .evaluate import EvalReport

COMPARED_METRICS = ("map_50", "map_range_mean", "precision", "recall", "f1", "mean_inference_s")


@dataclass(frozen=True)
class MetricPair:
    lr: float | None
    sr: float | None
    delta: float | None


@dataclass(frozen=True)
class ComparisonReport:
    label: str
    lr_summary: dict
    sr_summary: dict
    metrics: dict[str, MetricPair]


def _scoring_signature(report: EvalReport) -> dict:
    cfg = report.config
    return {
        "iou_threshold": cfg.get("iou_threshold"),
        "iou_range": cfg.get("iou_range"),
        "ap_mode": cfg.get("ap_mode"),
        "operating_point_mode": cfg.get("operating_point_mode"),
        "operating_point_confidence": cfg.get("operating_point_confidence"),
    }


def compare_runs(lr: EvalReport, sr: EvalReport, label: str = "") -> ComparisonReport:
    """Pair two runs of the same experiment and report per-metric deltas."""
    lr_sig = _scoring_signature(lr)
    sr_sig = _scoring_signature(sr)
    if lr_sig != sr_sig:
        raise ValidationError(
            f"runs are not comparable: scoring configs differ ({lr_sig} vs {sr_sig})"
        )
    from .report import summary_row

    lr_summary = summary_row(lr, label=f"{label} LR".strip())
    sr_summary = summary_row(sr, label=f"{label} SR".strip())
    metrics = {}
    for name in COMPARED_METRICS:
        lr_value = lr_summary[name]
        sr_value = sr_summary[name]
        delta = sr_value - lr_value if lr_value is not None and sr_value is not None else None
        metrics[name] = MetricPair(lr_value, sr_value, delta)
    return ComparisonReport(label=label, lr_summary=lr_summary, sr_summary=sr_summary, metrics=metrics)
