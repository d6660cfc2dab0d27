"""Axis-aligned bounding-box geometry.

Two coordinate conventions are used throughout the package:

* ``BBox`` stores pixel-space corners ``(x_min, y_min, x_max, y_max)``.
  Areas use continuous (real-interval) semantics, so a box spanning
  ``x_min=0, x_max=10`` is 10 units wide, not 11 pixels.
* ``NormBox`` stores the center/size convention of YOLO label files,
  with every field normalized to the unit interval.

Overlap is measured as intersection area over union area, which makes it
invariant under any positive axis scaling and equal to a unit-grid cell
count ratio for integer-coordinate boxes.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ValidationError


@dataclass(frozen=True)
class BBox:
    """Pixel-space box with ``x_max >= x_min`` and ``y_max >= y_min``."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        if self.x_max < self.x_min or self.y_max < self.y_min:
            raise ValidationError(
                f"invalid box: ({self.x_min}, {self.y_min}, {self.x_max}, {self.y_max})"
            )

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    def area(self) -> float:
        return self.width * self.height


@dataclass(frozen=True)
class NormBox:
    """Normalized center/size box; ``w`` and ``h`` must be strictly positive."""

    cx: float
    cy: float
    w: float
    h: float

    def __post_init__(self):
        if not (0.0 <= self.cx <= 1.0 and 0.0 <= self.cy <= 1.0):
            raise ValidationError(f"center ({self.cx}, {self.cy}) outside [0, 1]")
        if not (0.0 < self.w <= 1.0 and 0.0 < self.h <= 1.0):
            raise ValidationError(f"size ({self.w}, {self.h}) outside (0, 1]")

    def to_corners(self) -> BBox:
        """Unit-square corner form, clipped to [0, 1] on each axis."""
        return BBox(
            max(0.0, self.cx - self.w / 2.0),
            max(0.0, self.cy - self.h / 2.0),
            min(1.0, self.cx + self.w / 2.0),
            min(1.0, self.cy + self.h / 2.0),
        )


@dataclass(frozen=True)
class ImageDims:
    """Positive pixel dimensions of an image."""

    width: int
    height: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValidationError(f"invalid dims: {self.width}x{self.height}")


def iou(a: BBox, b: BBox) -> float:
    """Intersection area over union area, in [0, 1].

    A union of zero area (both boxes degenerate) scores 0 rather than
    raising, so degenerate annotations count as non-matches.
    """
    ix = min(a.x_max, b.x_max) - max(a.x_min, b.x_min)
    iy = min(a.y_max, b.y_max) - max(a.y_min, b.y_min)
    if ix <= 0.0 or iy <= 0.0:
        return 0.0
    inter = ix * iy
    union = a.area() + b.area() - inter
    if union <= 0.0:
        return 0.0
    return inter / union


def norm_to_pixel(nb: NormBox, dims: ImageDims) -> BBox:
    """Convert a normalized box to pixel corners, clipped to the frame."""
    x_min = (nb.cx - nb.w / 2.0) * dims.width
    x_max = (nb.cx + nb.w / 2.0) * dims.width
    y_min = (nb.cy - nb.h / 2.0) * dims.height
    y_max = (nb.cy + nb.h / 2.0) * dims.height
    return BBox(
        max(0.0, x_min),
        max(0.0, y_min),
        min(float(dims.width), x_max),
        min(float(dims.height), y_max),
    )


def pixel_to_norm(b: BBox, dims: ImageDims) -> NormBox:
    """Convert pixel corners back to the normalized center/size form.

    The box must lie within the image frame; use :func:`norm_to_pixel`'s
    clipping upstream if it may not.
    """
    if b.x_min < 0 or b.y_min < 0 or b.x_max > dims.width or b.y_max > dims.height:
        raise ValidationError(
            f"box ({b.x_min}, {b.y_min}, {b.x_max}, {b.y_max}) exceeds "
            f"{dims.width}x{dims.height} frame"
        )
    return NormBox(
        cx=(b.x_min + b.x_max) / 2.0 / dims.width,
        cy=(b.y_min + b.y_max) / 2.0 / dims.height,
        w=(b.x_max - b.x_min) / dims.width,
        h=(b.y_max - b.y_min) / dims.height,
    )


def scale_box(b: BBox, sx: float, sy: float) -> BBox:
    """Scale each x coordinate by ``sx`` and each y coordinate by ``sy``."""
    if sx <= 0 or sy <= 0:
        raise ValidationError(f"non-positive scale ({sx}, {sy})")
    return BBox(b.x_min * sx, b.y_min * sy, b.x_max * sx, b.y_max * sy)
