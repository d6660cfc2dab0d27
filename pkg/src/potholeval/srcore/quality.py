"""Image quality sanity metrics for upscaler output."""

from __future__ import annotations

import math

import numpy as np

from ..dataio.ppm import RasterImage
from ..errors import ShapeError


def psnr(a: RasterImage, b: RasterImage) -> float:
    """Peak signal-to-noise ratio in dB for 8-bit images.

    Identical images return ``math.inf``; a uniform difference of 255
    everywhere returns 0 dB.
    """
    if a.pixels.shape != b.pixels.shape:
        raise ShapeError(f"image shapes differ: {a.pixels.shape} vs {b.pixels.shape}")
    diff = a.to_float() - b.to_float()
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(255.0 * 255.0 / mse)
