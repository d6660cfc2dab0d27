"""Report serialization: canonical JSON and flat CSV summaries.

The JSON layout is versioned and key-ordered (schema_version, config,
per_image, curve, map_50, map_range, operating_point, f1, timing,
version), and floats round-trip exactly, so emit -> parse -> emit is
byte-identical and reports from two runs diff cleanly.

The CSV form is one summary row per run with a fixed column set, shaped
like the published results tables: identification, mAP at 0.5, ranged
mAP, operating-point precision/recall/F1, and per-image seconds.
"""

from __future__ import annotations

import csv
import io
import json

from ..errors import ParseError, ValidationError
from ..metrics import OperatingPoint, PRCurve, PRPoint
from .bench import TimingStats
from .compare import ComparisonReport, MetricPair
from .evaluate import EvalReport, ImageEval, RangedMapReport

CSV_COLUMNS = (
    "label",
    "images",
    "gt_boxes",
    "detections",
    "map_50",
    "map_range_mean",
    "precision",
    "recall",
    "f1",
    "mean_inference_s",
    "median_inference_s",
)


def _curve_to_dict(curve: PRCurve) -> dict:
    return {
        "iou_threshold": curve.iou_threshold,
        "total_gt": curve.total_gt,
        "points": [
            {"recall": p.recall, "precision": p.precision, "confidence": p.confidence}
            for p in curve.points
        ],
    }


def _curve_from_dict(data: dict) -> PRCurve:
    return PRCurve(
        points=tuple(
            PRPoint(p["recall"], p["precision"], p["confidence"]) for p in data["points"]
        ),
        total_gt=data["total_gt"],
        iou_threshold=data["iou_threshold"],
    )


def _op_to_dict(op: OperatingPoint) -> dict:
    return {
        "precision": op.precision,
        "recall": op.recall,
        "confidence": op.confidence,
        "f1": op.f1,
        "degenerate": op.degenerate,
    }


def report_to_dict(report: EvalReport) -> dict:
    return {
        "schema_version": report.schema_version,
        "config": report.config,
        "per_image": [
            {
                "image_id": e.image_id,
                "n_gt": e.n_gt,
                "n_det": e.n_det,
                "tp": e.tp,
                "fp": e.fp,
                "fn": e.fn,
                "tn": e.tn,
                "error": e.error,
            }
            for e in report.per_image
        ],
        "curve": _curve_to_dict(report.curve),
        "map_50": report.map_50,
        "map_range": {
            "per_threshold": {repr(t): v for t, v in report.map_range.per_threshold.items()},
            "mean": report.map_range.mean,
            "degenerate": report.map_range.degenerate,
        },
        "operating_point": _op_to_dict(report.operating_point),
        "f1": report.f1,
        "timing": report.timing.to_dict() if report.timing is not None else None,
        "version": report.version,
    }


def report_from_dict(data: dict) -> EvalReport:
    try:
        op = data["operating_point"]
        return EvalReport(
            schema_version=data["schema_version"],
            config=data["config"],
            per_image=tuple(
                ImageEval(
                    image_id=e["image_id"],
                    n_gt=e["n_gt"],
                    n_det=e["n_det"],
                    tp=e["tp"],
                    fp=e["fp"],
                    fn=e["fn"],
                    tn=e["tn"],
                    error=e["error"],
                )
                for e in data["per_image"]
            ),
            curve=_curve_from_dict(data["curve"]),
            map_50=data["map_50"],
            map_range=RangedMapReport(
                per_threshold={
                    float(t): v for t, v in data["map_range"]["per_threshold"].items()
                },
                mean=data["map_range"]["mean"],
                degenerate=data["map_range"]["degenerate"],
            ),
            operating_point=OperatingPoint(
                precision=op["precision"],
                recall=op["recall"],
                confidence=op["confidence"],
                f1=op["f1"],
                degenerate=op["degenerate"],
            ),
            f1=data["f1"],
            timing=TimingStats.from_dict(data["timing"]) if data["timing"] else None,
            version=data["version"],
        )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"report JSON missing or malformed field: {exc}") from None


def summary_row(report: EvalReport, label: str = "") -> dict:
    timing = report.timing
    return {
        "label": label,
        "images": len(report.per_image),
        "gt_boxes": sum(e.n_gt for e in report.per_image),
        "detections": sum(e.n_det for e in report.per_image),
        "map_50": report.map_50,
        "map_range_mean": report.map_range.mean,
        "precision": report.operating_point.precision,
        "recall": report.operating_point.recall,
        "f1": report.f1,
        "mean_inference_s": timing.mean if timing else None,
        "median_inference_s": timing.median if timing else None,
    }


def _csv_bytes(rows: list[dict]) -> bytes:
    buf = io.StringIO(newline="")
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if v is None else v) for k, v in row.items()})
    return buf.getvalue().encode("utf-8")


def emit_report(report: EvalReport, fmt: str = "json", label: str = "") -> bytes:
    """Serialize a report; JSON is canonical, CSV is the flat summary row."""
    if fmt == "json":
        return (json.dumps(report_to_dict(report), indent=2) + "\n").encode("utf-8")
    if fmt == "csv":
        return _csv_bytes([summary_row(report, label)])
    raise ValidationError(f"unknown report format {fmt!r}")


def parse_report(data: bytes) -> EvalReport:
    """Inverse of the JSON form of :func:`emit_report`."""
    try:
        payload = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ParseError(f"report is not valid JSON: {exc}") from None
    return report_from_dict(payload)


def emit_comparison(comparison: ComparisonReport, fmt: str = "json") -> bytes:
    """Serialize a paired LR/SR comparison.

    The CSV form is two summary rows (one per resolution arm) sharing the
    fixed column set, followed by a delta row.
    """
    if fmt == "json":
        payload = {
            "label": comparison.label,
            "metrics": {
                name: {"lr": pair.lr, "sr": pair.sr, "delta": pair.delta}
                for name, pair in comparison.metrics.items()
            },
            "lr": comparison.lr_summary,
            "sr": comparison.sr_summary,
        }
        return (json.dumps(payload, indent=2) + "\n").encode("utf-8")
    if fmt == "csv":
        lr = dict(comparison.lr_summary, label=f"{comparison.label} LR")
        sr = dict(comparison.sr_summary, label=f"{comparison.label} SR")
        delta = {col: "" for col in CSV_COLUMNS}
        delta["label"] = f"{comparison.label} delta"
        for name, pair in comparison.metrics.items():
            if name in delta:
                delta[name] = pair.delta
        return _csv_bytes([lr, sr, delta])
    raise ValidationError(f"unknown comparison format {fmt!r}")
