"""Parsers for YOLO-style label and detection text files.

Label files carry one ground-truth box per line::

    class cx cy w h

Detection files additionally carry a confidence. The default column order
is ``class conf cx cy w h``, matching the common detector dump convention;
a different permutation of the same six fields can be passed for tools
that emit confidence last.

Coordinates that overshoot [0, 1] by at most ``COORD_SLACK`` are clamped,
so float round-off from third-party annotation tools does not abort an
evaluation run. Larger violations are parse errors.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..boxgeom import NormBox
from ..errors import ParseError, ValidationError

# Tolerated coordinate overshoot before a value is rejected instead of clamped.
COORD_SLACK = 1e-6

DETECTION_COLUMNS = ("class", "conf", "cx", "cy", "w", "h")
_LABEL_COLUMNS = ("class", "cx", "cy", "w", "h")


@dataclass(frozen=True)
class Annotation:
    """Ground-truth box for one object."""

    class_id: int
    box: NormBox

    def __post_init__(self):
        if self.class_id < 0:
            raise ValidationError(f"negative class id {self.class_id}")


@dataclass(frozen=True)
class Detection:
    """Predicted box with a confidence score in [0, 1]."""

    class_id: int
    confidence: float
    box: NormBox

    def __post_init__(self):
        if self.class_id < 0:
            raise ValidationError(f"negative class id {self.class_id}")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValidationError(f"confidence {self.confidence} outside [0, 1]")


def _parse_int(token, field, line_no):
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"field '{field}' is not an integer: {token!r}", line=line_no) from None


def _parse_float(token, field, line_no):
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"field '{field}' is not numeric: {token!r}", line=line_no) from None
    if value != value or value in (float("inf"), float("-inf")):
        raise ParseError(f"field '{field}' is not finite: {token!r}", line=line_no)
    return value


def _clamp_unit(value, field, line_no, positive=False):
    low = 0.0
    if value < low - COORD_SLACK or value > 1.0 + COORD_SLACK:
        raise ParseError(f"field '{field}' out of range [0, 1]: {value}", line=line_no)
    value = min(1.0, max(low, value))
    if positive and value <= 0.0:
        raise ParseError(f"field '{field}' must be positive: {value}", line=line_no)
    return value


def _parse_box(fields, line_no):
    cx = _clamp_unit(fields["cx"], "cx", line_no)
    cy = _clamp_unit(fields["cy"], "cy", line_no)
    w = _clamp_unit(fields["w"], "w", line_no, positive=True)
    h = _clamp_unit(fields["h"], "h", line_no, positive=True)
    return NormBox(cx, cy, w, h)


def _check_class(class_id, n_classes, line_no):
    if class_id < 0:
        raise ParseError(f"negative class id {class_id}", line=line_no)
    if n_classes is not None and class_id >= n_classes:
        raise ParseError(f"class id {class_id} >= declared class count {n_classes}", line=line_no)


def parse_label_file(text: str, n_classes: int | None = 1) -> list[Annotation]:
    """Parse ground-truth annotations, one per non-blank line, in file order."""
    annotations = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        tokens = line.split()
        if not tokens:
            continue
        if len(tokens) != 5:
            raise ParseError(f"expected 5 fields, got {len(tokens)}", line=line_no)
        fields = {
            name: (_parse_int if name == "class" else _parse_float)(tok, name, line_no)
            for name, tok in zip(_LABEL_COLUMNS, tokens)
        }
        _check_class(fields["class"], n_classes, line_no)
        annotations.append(Annotation(fields["class"], _parse_box(fields, line_no)))
    return annotations


def parse_detection_file(
    text: str,
    columns: tuple[str, ...] = DETECTION_COLUMNS,
    n_classes: int | None = None,
) -> list[Detection]:
    """Parse detections, one per non-blank line, preserving file order.

    ``columns`` names the on-disk order of the six fields
    ``class conf cx cy w h``; pass a permutation to ingest other layouts.
    """
    if sorted(columns) != sorted(DETECTION_COLUMNS):
        raise ValidationError(
            f"detection columns must be a permutation of {DETECTION_COLUMNS}, got {columns}"
        )
    detections = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        tokens = line.split()
        if not tokens:
            continue
        if len(tokens) != 6:
            raise ParseError(f"expected 6 fields, got {len(tokens)}", line=line_no)
        fields = {
            name: (_parse_int if name == "class" else _parse_float)(tok, name, line_no)
            for name, tok in zip(columns, tokens)
        }
        _check_class(fields["class"], n_classes, line_no)
        conf = fields["conf"]
        if not 0.0 <= conf <= 1.0:
            raise ParseError(f"confidence out of range [0, 1]: {conf}", line=line_no)
        detections.append(Detection(fields["class"], conf, _parse_box(fields, line_no)))
    return detections


def serialize_annotations(annotations: list[Annotation]) -> str:
    """Canonical 6-decimal fixed-point form; inverse of :func:`parse_label_file`."""
    lines = [
        f"{a.class_id} {a.box.cx:.6f} {a.box.cy:.6f} {a.box.w:.6f} {a.box.h:.6f}"
        for a in annotations
    ]
    return "".join(line + "\n" for line in lines)


def serialize_detections(
    detections: list[Detection], columns: tuple[str, ...] = DETECTION_COLUMNS
) -> str:
    """Canonical detection dump in the given column order."""
    lines = []
    for d in detections:
        values = {
            "class": str(d.class_id),
            "conf": f"{d.confidence:.6f}",
            "cx": f"{d.box.cx:.6f}",
            "cy": f"{d.box.cy:.6f}",
            "w": f"{d.box.w:.6f}",
            "h": f"{d.box.h:.6f}",
        }
        lines.append(" ".join(values[name] for name in columns))
    return "".join(line + "\n" for line in lines)
