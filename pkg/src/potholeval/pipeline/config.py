"""Run configuration for evaluation experiments.

A config names the manifest and the ground-truth/detection directories,
pins every scoring knob (primary IoU threshold, threshold range, AP mode,
operating-point policy, detection column order), and optionally carries a
timing source and a training-provenance record. The provenance block is
metadata only: it is echoed into reports verbatim so results stay
traceable to the detector training setup, and nothing in this package
ever executes it.

Configs serialize to/from a flat JSON object mirroring the field names.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..dataio.labels import DETECTION_COLUMNS
from ..errors import ParseError, ValidationError
from ..metrics import iou_threshold_range

SPLITS = ("train", "val", "test", "all")


@dataclass(frozen=True)
class TrainingProvenance:
    """Detector training hyperparameters, recorded verbatim for reports."""

    learning_rate: float
    momentum: float
    weight_decay: float
    warmup_epochs: int
    warmup_momentum: float
    warmup_bias_lr: float
    batch_size: int
    epochs: int

    def to_dict(self) -> dict:
        return {
            "learning_rate": self.learning_rate,
            "momentum": self.momentum,
            "weight_decay": self.weight_decay,
            "warmup_epochs": self.warmup_epochs,
            "warmup_momentum": self.warmup_momentum,
            "warmup_bias_lr": self.warmup_bias_lr,
            "batch_size": self.batch_size,
            "epochs": self.epochs,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TrainingProvenance":
        return cls(**data)


@dataclass(frozen=True)
class TimingSource:
    """Where per-image inference seconds come from, if anywhere.

    ``kind`` is one of ``none``, ``command`` (an external template with an
    ``{image}`` placeholder), or ``upscaler`` (time this package's own
    upscaling of each image).
    """

    kind: str = "none"
    command: str | None = None
    method: str | None = None
    factor: int | None = None
    weights: str | None = None
    repetitions: int = 1

    def __post_init__(self):
        if self.kind not in ("none", "command", "upscaler"):
            raise ValidationError(f"unknown timing source kind {self.kind!r}")
        if self.kind == "command" and not self.command:
            raise ValidationError("timing source 'command' needs a command template")
        if self.kind == "upscaler" and not self.method:
            raise ValidationError("timing source 'upscaler' needs a method")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "command": self.command,
            "method": self.method,
            "factor": self.factor,
            "weights": self.weights,
            "repetitions": self.repetitions,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TimingSource":
        return cls(**data)


@dataclass(frozen=True)
class RunConfig:
    manifest: str
    ground_truth_dir: str
    detections_dir: str
    image_dir: str | None = None
    split: str = "test"
    iou_threshold: float = 0.5
    iou_range: tuple[float, float, float] = (0.5, 0.95, 0.05)
    ap_mode: str = "raw"
    operating_point_mode: str = "max-f1"
    operating_point_confidence: float | None = None
    detection_columns: tuple[str, ...] = DETECTION_COLUMNS
    n_classes: int = 1
    timing: TimingSource = field(default_factory=TimingSource)
    output_dir: str | None = None
    training_provenance: TrainingProvenance | None = None

    def __post_init__(self):
        if self.split not in SPLITS:
            raise ValidationError(f"split must be one of {SPLITS}, got {self.split!r}")
        if not 0.0 < self.iou_threshold <= 1.0:
            raise ValidationError(f"iou threshold {self.iou_threshold} outside (0, 1]")
        iou_threshold_range(*self.iou_range)  # validates
        if self.ap_mode not in ("raw", "interp"):
            raise ValidationError(f"ap mode must be 'raw' or 'interp', got {self.ap_mode!r}")
        if self.operating_point_mode not in ("max-f1", "fixed"):
            raise ValidationError(
                f"operating point mode must be 'max-f1' or 'fixed',"
                f" got {self.operating_point_mode!r}"
            )
        if self.operating_point_mode == "fixed" and self.operating_point_confidence is None:
            raise ValidationError("fixed operating point needs a confidence")
        if self.n_classes < 1:
            raise ValidationError(f"n_classes must be >= 1, got {self.n_classes}")

    def range_thresholds(self) -> list[float]:
        return iou_threshold_range(*self.iou_range)

    def check_paths(self) -> None:
        """Fail fast if the referenced inputs are missing."""
        for label, value in (
            ("manifest", self.manifest),
            ("ground_truth_dir", self.ground_truth_dir),
            ("detections_dir", self.detections_dir),
            ("image_dir", self.image_dir),
        ):
            if value is not None and not Path(value).exists():
                raise ValidationError(f"{label} does not exist: {value}")

    def to_dict(self) -> dict:
        return {
            "manifest": self.manifest,
            "ground_truth_dir": self.ground_truth_dir,
            "detections_dir": self.detections_dir,
            "image_dir": self.image_dir,
            "split": self.split,
            "iou_threshold": self.iou_threshold,
            "iou_range": list(self.iou_range),
            "ap_mode": self.ap_mode,
            "operating_point_mode": self.operating_point_mode,
            "operating_point_confidence": self.operating_point_confidence,
            "detection_columns": list(self.detection_columns),
            "n_classes": self.n_classes,
            "timing": self.timing.to_dict(),
            "output_dir": self.output_dir,
            "training_provenance": (
                self.training_provenance.to_dict() if self.training_provenance else None
            ),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = dict(data)
        try:
            manifest = known.pop("manifest")
            gt_dir = known.pop("ground_truth_dir")
            det_dir = known.pop("detections_dir")
        except KeyError as exc:
            raise ValidationError(f"config missing required key {exc.args[0]!r}") from None
        timing = known.pop("timing", None)
        provenance = known.pop("training_provenance", None)
        iou_range = known.pop("iou_range", (0.5, 0.95, 0.05))
        columns = known.pop("detection_columns", DETECTION_COLUMNS)
        try:
            return cls(
                manifest=manifest,
                ground_truth_dir=gt_dir,
                detections_dir=det_dir,
                iou_range=tuple(iou_range),
                detection_columns=tuple(columns),
                timing=TimingSource.from_dict(timing) if timing else TimingSource(),
                training_provenance=(
                    TrainingProvenance.from_dict(provenance) if provenance else None
                ),
                **known,
            )
        except TypeError as exc:
            raise ValidationError(f"bad config: {exc}") from None


def load_config(path) -> RunConfig:
    """Read a JSON config file."""
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"config is not valid JSON: {exc}", path=str(path)) from None
    if not isinstance(data, dict):
        raise ParseError("config must be a JSON object", path=str(path))
    return RunConfig.from_dict(data)
