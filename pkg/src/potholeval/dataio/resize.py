"""Image resampling: nearest neighbour, bilinear, and bicubic.

Sampling uses pixel-center alignment: destination pixel ``d`` reads from
source coordinate ``(d + 0.5) * scale - 0.5`` with ``scale = src / dst``.
Bicubic uses the Catmull-Rom kernel (the a = -0.5 cubic convolution
spline); both kernels clamp their taps at the image border (edge
replication). Results are computed in float64 per output pixel as a
direct weighted sum over the tap window, clamped to [0, 255], and
quantized with round-half-away-from-zero.
"""

from __future__ import annotations

import numpy as np

from ..boxgeom import ImageDims
from ..errors import ValidationError
from .ppm import RasterImage

METHODS = ("nearest", "bilinear", "bicubic")


def _source_coords(n_dst: int, n_src: int) -> np.ndarray:
    scale = n_src / n_dst
    return (np.arange(n_dst, dtype=np.float64) + 0.5) * scale - 0.5


def _catmull_rom(x: np.ndarray) -> np.ndarray:
    """Cubic convolution weight at distance ``x`` for a = -0.5."""
    ax = np.abs(x)
    near = (1.5 * ax - 2.5) * ax * ax + 1.0
    far = ((-0.5 * ax + 2.5) * ax - 4.0) * ax + 2.0
    return np.where(ax <= 1.0, near, np.where(ax < 2.0, far, 0.0))


def _axis_taps(n_dst: int, n_src: int, method: str):
    """Per-destination-index source taps and weights for one axis.

    Returns ``(indices, weights)`` of shape (n_dst, k) with indices
    clamped into the valid source range.
    """
    coords = _source_coords(n_dst, n_src)
    base = np.floor(coords).astype(np.int64)
    frac = coords - base
    if method == "bilinear":
        offsets = np.array([0, 1])
        weights = np.stack([1.0 - frac, frac], axis=1)
    else:  # bicubic
        offsets = np.array([-1, 0, 1, 2])
        weights = _catmull_rom(frac[:, None] - offsets[None, :])
    indices = np.clip(base[:, None] + offsets[None, :], 0, n_src - 1)
    return indices, weights


def _resample_plane(plane: np.ndarray, target: ImageDims, method: str) -> np.ndarray:
    h_src, w_src = plane.shape
    if method == "nearest":
        ys = np.clip(np.floor(_source_coords(target.height, h_src) + 0.5), 0, h_src - 1)
        xs = np.clip(np.floor(_source_coords(target.width, w_src) + 0.5), 0, w_src - 1)
        return plane[ys.astype(np.int64)[:, None], xs.astype(np.int64)[None, :]]
    iy, wy = _axis_taps(target.height, h_src, method)
    ix, wx = _axis_taps(target.width, w_src, method)
    out = np.empty((target.height, target.width), dtype=np.float64)
    for y in range(target.height):
        # direct 2-D weighted sum over the tap window, one output row at a time
        window = plane[iy[y][:, None, None], ix[None, :, :]]
        out[y] = np.einsum("jxi,j,xi->x", window, wy[y], wx)
    return out


def resize_image(img: RasterImage, target: ImageDims, method: str = "bilinear") -> RasterImage:
    """Resample ``img`` to ``target`` dimensions."""
    if method not in METHODS:
        raise ValidationError(f"unknown resize method {method!r}; expected one of {METHODS}")
    if method == "nearest" and target == img.dims:
        return RasterImage(img.pixels.copy())
    source = img.to_float()
    planes = [
        _resample_plane(source[:, :, c], target, method) for c in range(img.channels)
    ]
    return RasterImage.from_float(np.stack(planes, axis=2))
