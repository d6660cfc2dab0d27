"""potholeval: detector-agnostic evaluation for SR-assisted pothole detection.

A library plus CLI that ingests YOLO-format ground truth and detection
dumps, scores them (IoU matching, precision/recall/F1, AP, single- and
ranged-threshold mAP), compares low-resolution against super-resolved
runs, upscales images with classic resamplers or a toy dense-residual
generator, and benchmarks per-image inference time.
"""

__version__ = "0.1.0"

from .boxgeom import BBox, ImageDims, NormBox, iou, norm_to_pixel, pixel_to_norm, scale_box
from .errors import (
    FormatError,
    NumericalGuardError,
    ParseError,
    PotholevalError,
    ShapeError,
    ValidationError,
)

__all__ = [
    "BBox",
    "FormatError",
    "ImageDims",
    "NormBox",
    "NumericalGuardError",
    "ParseError",
    "PotholevalError",
    "ShapeError",
    "ValidationError",
    "__version__",
    "iou",
    "norm_to_pixel",
    "pixel_to_norm",
    "scale_box",
]
