"""Corpus evaluation: match every manifest image and aggregate the metrics.

Per-image matching is independent and order-free; aggregation always
walks images in sorted image-id order, so reports are identical no matter
how the manifest lists images or how work would be scheduled.

Ground-truth files must exist for every image (an empty file means no
objects). A missing detection file is treated as zero detections, exactly
like an empty one. Unreadable files demote that image to an error entry
and mark the run as partial; malformed contents abort the run with
file/line diagnostics.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path

from .. import __version__
from ..dataio.labels import parse_detection_file, parse_label_file
from ..dataio.ppm import read_image
from ..dataio.split import read_manifest_ids
from ..errors import ParseError, ValidationError
from ..metrics import (
    MatchResult,
    MetricValue,
    OperatingPoint,
    PRCurve,
    average_precision,
    match_detections,
    mean_ap,
    merge_matches,
    operating_point,
    pr_curve,
)
from .bench import TimingStats, bench_command
from .config import RunConfig

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ImageEval:
    """Primary-threshold accounting for one image.

    ``tn`` is the image-level true-negative convention: 1 when the image
    has no ground truth and no detections, else 0.
    """

    image_id: str
    n_gt: int
    n_det: int
    tp: int
    fp: int
    fn: int
    tn: int
    error: str | None = None


@dataclass(frozen=True)
class RangedMapReport:
    per_threshold: dict[float, float]
    mean: float
    degenerate: bool = False


@dataclass(frozen=True)
class EvalReport:
    schema_version: int
    config: dict
    per_image: tuple[ImageEval, ...]
    curve: PRCurve
    map_50: float
    map_range: RangedMapReport
    operating_point: OperatingPoint
    f1: float
    timing: TimingStats | None
    version: str

    @property
    def partial(self) -> bool:
        return any(entry.error is not None for entry in self.per_image)


def _read_text(path: Path) -> str | None:
    """File contents, or None for 'missing', or raise OSError."""
    if not path.exists():
        return None
    return path.read_text()


def _load_image_boxes(config: RunConfig, image_id: str):
    gt_path = Path(config.ground_truth_dir) / f"{image_id}.txt"
    det_path = Path(config.detections_dir) / f"{image_id}.txt"
    gt_text = _read_text(gt_path)
    if gt_text is None:
        raise OSError(f"ground-truth file missing: {gt_path}")
    try:
        gts = parse_label_file(gt_text, n_classes=config.n_classes)
    except ParseError as exc:
        raise ParseError(str(exc), path=str(gt_path)) from None
    det_text = _read_text(det_path)
    if det_text is None:
        det_text = ""  # missing detections are an empty set
    try:
        dets = parse_detection_file(
            det_text, columns=config.detection_columns, n_classes=config.n_classes
        )
    except ParseError as exc:
        raise ParseError(str(exc), path=str(det_path)) from None
    return dets, gts


def _classes_present(images) -> list[int]:
    classes = set()
    for _, dets, gts in images:
        classes.update(d.class_id for d in dets)
        classes.update(g.class_id for g in gts)
    return sorted(classes)


def _corpus_matches(images, class_id: int, threshold: float) -> MatchResult:
    """Per-image matching for one class, merged in image-id order."""
    return merge_matches(
        match_detections(
            [d for d in dets if d.class_id == class_id],
            [g for g in gts if g.class_id == class_id],
            threshold,
        )
        for _, dets, gts in images
    )


def _corpus_map(images, classes, threshold: float, ap_mode: str) -> MetricValue:
    if not classes:
        return MetricValue(0.0, degenerate=True)
    per_class = {
        c: average_precision(pr_curve(_corpus_matches(images, c, threshold)), ap_mode).ap
        for c in classes
    }
    return MetricValue(mean_ap(per_class))


def _pooled_curve(images, classes, threshold: float) -> PRCurve:
    """Micro-averaged corpus curve: class-wise matching, pooled ranking."""
    if not classes:
        return PRCurve((), total_gt=0, iou_threshold=threshold)
    return pr_curve(merge_matches(_corpus_matches(images, c, threshold) for c in classes))


def _run_timing(config: RunConfig, image_ids) -> TimingStats | None:
    source = config.timing
    if source.kind == "none":
        return None
    if config.image_dir is None:
        raise ValidationError("timing sources need an image_dir")
    image_root = Path(config.image_dir)
    paths = []
    for image_id in image_ids:
        candidates = [image_root / f"{image_id}{ext}" for ext in (".ppm", ".pgm")]
        found = next((p for p in candidates if p.exists()), None)
        if found is None:
            raise ValidationError(f"no image file for id {image_id!r} under {image_root}")
        paths.append(found)
    if source.kind == "command":
        return bench_command(source.command, paths, source.repetitions).stats
    # internal upscaler timing: load first, time only the upscale itself
    from .upscale import _upscale_one
    from ..srcore.generator import load_generator

    params = None
    if source.method == "rrdb":
        if not source.weights:
            raise ValidationError("timing with method 'rrdb' needs a weights file")
        params = load_generator(Path(source.weights).read_bytes())
    factor = source.factor or 4
    samples = []
    for path in paths:
        image = read_image(path)
        start = time.perf_counter()
        _upscale_one(image, source.method, factor, params)
        samples.append(time.perf_counter() - start)
    return TimingStats.from_samples(samples)


def run_evaluation(config: RunConfig) -> EvalReport:
    """Evaluate a detection dump against ground truth per the config."""
    config.check_paths()
    try:
        manifest = read_manifest_ids(Path(config.manifest).read_text())
    except ParseError as exc:
        raise ParseError(str(exc), path=config.manifest) from None
    image_ids = sorted(manifest.split(config.split))
    loaded = []  # (image_id, dets, gts), only readable images
    per_image: list[ImageEval] = []
    errored: list[ImageEval] = []
    for image_id in image_ids:
        try:
            dets, gts = _load_image_boxes(config, image_id)
        except OSError as exc:
            errored.append(ImageEval(image_id, 0, 0, 0, 0, 0, 0, error=str(exc)))
            continue
        loaded.append((image_id, dets, gts))
        counts = merge_matches(
            match_detections(
                [d for d in dets if d.class_id == c],
                [g for g in gts if g.class_id == c],
                config.iou_threshold,
            )
            for c in range(config.n_classes)
        ).counts()
        per_image.append(
            ImageEval(
                image_id,
                n_gt=len(gts),
                n_det=len(dets),
                tp=counts.tp,
                fp=counts.fp,
                fn=counts.fn,
                tn=1 if not gts and not dets else 0,
            )
        )
    entries = tuple(sorted(per_image + errored, key=lambda e: e.image_id))
    classes = _classes_present(loaded)
    curve = _pooled_curve(loaded, classes, config.iou_threshold)
    map_50 = _corpus_map(loaded, classes, 0.5, config.ap_mode)
    thresholds = config.range_thresholds()
    per_threshold = {
        float(t): float(_corpus_map(loaded, classes, t, config.ap_mode)) for t in thresholds
    }
    map_range = RangedMapReport(
        per_threshold=per_threshold,
        mean=sum(per_threshold.values()) / len(per_threshold),
        degenerate=not classes,
    )
    if config.operating_point_mode == "fixed":
        op = operating_point(curve, fixed_confidence=config.operating_point_confidence)
    else:
        op = operating_point(curve)
    timing = _run_timing(config, [e for e, _, _ in loaded])
    return EvalReport(
        schema_version=SCHEMA_VERSION,
        config=config.to_dict(),
        per_image=entries,
        curve=curve,
        map_50=float(map_50),
        map_range=map_range,
        operating_point=op,
        f1=op.f1,
        timing=timing,
        version=__version__,
    )
