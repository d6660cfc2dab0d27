"""Detection-vs-ground-truth scoring.

Matching is greedy and one-to-one: detections are processed in descending
confidence (ties broken by input order) and each one claims the unmatched
ground-truth box with the highest overlap, provided that overlap meets the
IoU threshold. Overlap on or above the threshold counts; strict-below does
not. This is the convention of the mainstream YOLO/VOC tooling and keeps
results deterministic across runs and platforms.

Average precision is the rank sum ``AP = sum_n (R_n - R_{n-1}) * P_n``
with ``R_0 = 0`` over the confidence-ranked curve ("raw" mode).
"interp" mode first replaces each precision with the maximum precision at
any equal-or-lower confidence (the monotone envelope used by COCO-style
tooling) and then applies the same sum, so interpolated AP is never below
raw AP.

Box-level true negatives are undefined (there is no denominator for
correctly detecting nothing), so TN is only ever reported image-level by
the pipeline: an image with no ground truth and no detections.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .boxgeom import iou
from .dataio.labels import Annotation, Detection
from .errors import ValidationError


class MetricValue(float):
    """Float that remembers whether its denominator was zero."""

    __slots__ = ("degenerate",)

    def __new__(cls, value: float, degenerate: bool = False):
        obj = super().__new__(cls, value)
        obj.degenerate = degenerate
        return obj


@dataclass(frozen=True)
class ConfusionCounts:
    """Box-level tallies; ``tn`` is image-level only and usually absent."""

    tp: int
    fp: int
    fn: int
    tn: int | None = None

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn) < 0 or (self.tn is not None and self.tn < 0):
            raise ValidationError("confusion counts must be non-negative")


@dataclass(frozen=True)
class DetectionMatch:
    """Outcome of one detection: matched ground-truth index or false positive."""

    confidence: float
    is_tp: bool
    gt_index: int | None
    iou: float


@dataclass(frozen=True)
class MatchResult:
    matches: tuple[DetectionMatch, ...]
    total_gt: int
    iou_threshold: float

    def counts(self) -> ConfusionCounts:
        tp = sum(1 for m in self.matches if m.is_tp)
        return ConfusionCounts(tp=tp, fp=len(self.matches) - tp, fn=self.total_gt - tp)


@dataclass(frozen=True)
class PRPoint:
    recall: float
    precision: float
    confidence: float


@dataclass(frozen=True)
class PRCurve:
    """Ranked (recall, precision) points, one per detection prefix."""

    points: tuple[PRPoint, ...]
    total_gt: int
    iou_threshold: float


@dataclass(frozen=True)
class APResult:
    ap: float
    mode: str
    iou_threshold: float


@dataclass(frozen=True)
class OperatingPoint:
    """Single reporting point on a PR curve, maximizing F1 unless fixed."""

    precision: float
    recall: float
    confidence: float | None
    f1: float
    degenerate: bool = False


@dataclass(frozen=True)
class RangedMap:
    """mAP per IoU threshold plus their arithmetic mean."""

    per_threshold: dict[float, float]
    mean: float
    degenerate: bool = False


def precision(c: ConfusionCounts) -> MetricValue:
    """TP over all positive predictions; 0 (flagged) when there are none."""
    denom = c.tp + c.fp
    if denom == 0:
        return MetricValue(0.0, degenerate=True)
    return MetricValue(c.tp / denom)


def recall(c: ConfusionCounts) -> MetricValue:
    """TP over all actual positives; 0 (flagged) when there are none."""
    denom = c.tp + c.fn
    if denom == 0:
        return MetricValue(0.0, degenerate=True)
    return MetricValue(c.tp / denom)


def f1(p: float, r: float) -> MetricValue:
    """Harmonic mean of precision and recall; 0 (flagged) when both are 0."""
    if not (0.0 <= p <= 1.0 and 0.0 <= r <= 1.0):
        raise ValidationError(f"precision/recall outside [0, 1]: ({p}, {r})")
    if p + r == 0.0:
        return MetricValue(0.0, degenerate=True)
    return MetricValue(2.0 * p * r / (p + r))


def match_detections(
    dets: Sequence[Detection], gts: Sequence[Annotation], iou_threshold: float
) -> MatchResult:
    """Greedily match detections to ground truth at one IoU threshold."""
    if not 0.0 < iou_threshold <= 1.0:
        raise ValidationError(f"iou threshold {iou_threshold} outside (0, 1]")
    gt_boxes = [g.box.to_corners() for g in gts]
    order = sorted(range(len(dets)), key=lambda i: -dets[i].confidence)
    taken = [False] * len(gts)
    outcomes: list[DetectionMatch | None] = [None] * len(dets)
    for i in order:
        det_box = dets[i].box.to_corners()
        best_iou = 0.0
        best_j = None
        for j, gt_box in enumerate(gt_boxes):
            if taken[j]:
                continue
            overlap = iou(det_box, gt_box)
            if overlap > best_iou:
                best_iou = overlap
                best_j = j
        if best_j is not None and best_iou >= iou_threshold:
            taken[best_j] = True
            outcomes[i] = DetectionMatch(dets[i].confidence, True, best_j, best_iou)
        else:
            outcomes[i] = DetectionMatch(dets[i].confidence, False, None, best_iou)
    return MatchResult(tuple(outcomes), total_gt=len(gts), iou_threshold=iou_threshold)


def merge_matches(results: Iterable[MatchResult]) -> MatchResult:
    """Concatenate per-image results into one corpus-level result.

    Callers must present results in a deterministic order (the pipeline
    sorts by image id) so downstream tie-breaking is stable. Ground-truth
    indices lose meaning across images and are dropped.
    """
    matches: list[DetectionMatch] = []
    total_gt = 0
    threshold = None
    for result in results:
        if threshold is None:
            threshold = result.iou_threshold
        elif result.iou_threshold != threshold:
            raise ValidationError("cannot merge matches computed at different IoU thresholds")
        matches.extend(
            DetectionMatch(m.confidence, m.is_tp, None, m.iou) for m in result.matches
        )
        total_gt += result.total_gt
    if threshold is None:
        raise ValidationError("no match results to merge")
    return MatchResult(tuple(matches), total_gt=total_gt, iou_threshold=threshold)


def pr_curve(result: MatchResult) -> PRCurve:
    """Rank detections by confidence and accumulate one PR point per rank."""
    ranked = sorted(result.matches, key=lambda m: -m.confidence)
    points = []
    tp = 0
    for n, match in enumerate(ranked, start=1):
        if match.is_tp:
            tp += 1
        r = tp / result.total_gt if result.total_gt > 0 else 0.0
        points.append(PRPoint(recall=r, precision=tp / n, confidence=match.confidence))
    return PRCurve(tuple(points), total_gt=result.total_gt, iou_threshold=result.iou_threshold)


def average_precision(curve: PRCurve, mode: str = "raw") -> APResult:
    """Integrate a ranked PR curve into a single average-precision value."""
    if mode not in ("raw", "interp"):
        raise ValidationError(f"unknown AP mode {mode!r}")
    precisions = [p.precision for p in curve.points]
    if mode == "interp":
        best = 0.0
        for i in range(len(precisions) - 1, -1, -1):
            best = max(best, precisions[i])
            precisions[i] = best
    ap = 0.0
    prev_recall = 0.0
    for point, prec in zip(curve.points, precisions):
        ap += (point.recall - prev_recall) * prec
        prev_recall = point.recall
    return APResult(ap=ap, mode=mode, iou_threshold=curve.iou_threshold)


def mean_ap(per_class_ap: Mapping[int, float]) -> float:
    """Arithmetic mean of per-class AP values."""
    if not per_class_ap:
        raise ValidationError("mean AP needs at least one class")
    return sum(per_class_ap.values()) / len(per_class_ap)


def operating_point(curve: PRCurve, fixed_confidence: float | None = None) -> OperatingPoint:
    """Pick the reporting point on a curve.

    Default is the F1-maximizing rank, breaking ties toward lower
    confidence (more detections kept). With ``fixed_confidence`` the point
    is the lowest-confidence rank still at or above that threshold. Curves
    with no usable point (empty, or all false positives) come back flagged
    degenerate.
    """
    if fixed_confidence is not None:
        eligible = [p for p in curve.points if p.confidence >= fixed_confidence]
        if not eligible:
            return OperatingPoint(0.0, 0.0, None, 0.0, degenerate=True)
        point = eligible[-1]
        return OperatingPoint(
            point.precision, point.recall, point.confidence,
            float(f1(point.precision, point.recall)),
        )
    best = None
    best_f1 = -1.0
    for point in curve.points:
        score = float(f1(point.precision, point.recall))
        if score >= best_f1:
            best, best_f1 = point, score
    if best is None or best_f1 <= 0.0:
        return OperatingPoint(0.0, 0.0, None, 0.0, degenerate=True)
    return OperatingPoint(best.precision, best.recall, best.confidence, best_f1)


def iou_threshold_range(lo: float, hi: float, step: float) -> list[float]:
    """Inclusive threshold grid, computed in integer hundredths.

    Building the grid from integer cents avoids accumulated float error,
    so a box overlapping exactly 0.70 still matches the 0.70 threshold.
    """
    lo_c, hi_c, step_c = (int(round(v * 100)) for v in (lo, hi, step))
    if step_c <= 0 or lo_c <= 0 or hi_c > 100 or lo_c > hi_c:
        raise ValidationError(f"bad threshold range {lo}:{hi}:{step}")
    return [c / 100.0 for c in range(lo_c, hi_c + 1, step_c)]


def coco_thresholds() -> list[float]:
    """The 10-step 0.50:0.95 grid behind ranged-mAP headline numbers."""
    return iou_threshold_range(0.50, 0.95, 0.05)


def recall_sweep_thresholds() -> list[float]:
    """0.50 to 0.90 in 0.05 steps, the narrower recall-averaging sweep."""
    return iou_threshold_range(0.50, 0.90, 0.05)


def _classes_present(dets: Sequence[Detection], gts: Sequence[Annotation]) -> list[int]:
    return sorted({d.class_id for d in dets} | {g.class_id for g in gts})


def map_over_range(
    dets: Sequence[Detection],
    gts: Sequence[Annotation],
    thresholds: Sequence[float],
    mode: str = "raw",
) -> RangedMap:
    """Run match -> curve -> AP per class at each threshold and average.

    With no boxes at all the result is flagged degenerate instead of
    raising, so evaluation survives empty inputs.
    """
    if not thresholds:
        raise ValidationError("threshold list is empty")
    for t in thresholds:
        if not 0.0 < t <= 1.0:
            raise ValidationError(f"iou threshold {t} outside (0, 1]")
    classes = _classes_present(dets, gts)
    if not classes:
        return RangedMap({float(t): 0.0 for t in thresholds}, 0.0, degenerate=True)
    per_threshold = {}
    for t in thresholds:
        per_class = {}
        for c in classes:
            result = match_detections(
                [d for d in dets if d.class_id == c],
                [g for g in gts if g.class_id == c],
                t,
            )
            per_class[c] = average_precision(pr_curve(result), mode).ap
        per_threshold[float(t)] = mean_ap(per_class)
    return RangedMap(per_threshold, sum(per_threshold.values()) / len(per_threshold))
