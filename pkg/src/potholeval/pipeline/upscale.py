"""Batch upscaling of an image directory with timing.

Supports the classic resamplers and the dense-residual generator. For the
generator path, 8-bit samples are mapped to [0, 1], run through the
network, and quantized back, so a zero-weight generator produces a
constant image equal to its (clamped) tail bias.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..boxgeom import ImageDims
from ..dataio.ppm import RasterImage, read_image, write_image
from ..dataio.resize import METHODS as RESAMPLE_METHODS
from ..errors import FormatError, PotholevalError, ValidationError
from ..dataio.resize import resize_image
from ..srcore.generator import GeneratorParams, generator_forward, load_generator
from .bench import TimingStats

UPSCALE_METHODS = RESAMPLE_METHODS + ("rrdb",)
IMAGE_SUFFIXES = (".ppm", ".pgm")


@dataclass(frozen=True)
class UpscaleResult:
    written: tuple[str, ...]
    stats: TimingStats
    errors: tuple[dict, ...]


def upscale_with_generator(image: RasterImage, params: GeneratorParams) -> RasterImage:
    """Run one image through the generator, mapping 8-bit <-> unit range."""
    planes = image.to_float() / 255.0  # (H, W, C)
    tensor = planes.transpose(2, 0, 1)[None, :, :, :]
    out = generator_forward(tensor, params)
    return RasterImage.from_float(out[0].transpose(1, 2, 0) * 255.0)


def _upscale_one(image: RasterImage, method: str, factor: int, params) -> RasterImage:
    if method == "rrdb":
        return upscale_with_generator(image, params)
    dims = image.dims
    target = ImageDims(dims.width * factor, dims.height * factor)
    return resize_image(image, target, method)


def list_images(directory) -> list[Path]:
    root = Path(directory)
    return sorted(p for p in root.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)


def upscale_dir(
    input_dir,
    output_dir,
    method: str = "bicubic",
    factor: int = 4,
    weights_path=None,
) -> UpscaleResult:
    """Upscale every PPM/PGM image in ``input_dir``, preserving filenames.

    Unreadable images are skipped and reported; a generator weight file
    that does not match its declared topology aborts the whole run.
    """
    if method not in UPSCALE_METHODS:
        raise ValidationError(f"unknown method {method!r}; expected one of {UPSCALE_METHODS}")
    if factor < 1:
        raise ValidationError(f"factor {factor} must be >= 1")
    params = None
    if method == "rrdb":
        if weights_path is None:
            raise ValidationError("method 'rrdb' needs a generator weights file")
        params = load_generator(Path(weights_path).read_bytes())
        if params.upscale_factor != factor:
            raise ValidationError(
                f"weights upscale by {params.upscale_factor}, run asked for {factor}"
            )
    in_root = Path(input_dir)
    if not in_root.is_dir():
        raise ValidationError(f"input dir does not exist: {input_dir}")
    out_root = Path(output_dir)
    out_root.mkdir(parents=True, exist_ok=True)
    written = []
    samples = []
    errors = []
    for path in list_images(in_root):
        try:
            image = read_image(path)
            start = time.perf_counter()
            result = _upscale_one(image, method, factor, params)
            samples.append(time.perf_counter() - start)
        except (FormatError, OSError) as exc:
            errors.append({"image": path.name, "error": str(exc)})
            continue
        except PotholevalError:
            raise  # topology/shape problems are not per-image noise
        out_path = out_root / path.name
        write_image(out_path, result)
        written.append(str(out_path))
    return UpscaleResult(tuple(written), TimingStats.from_samples(samples), tuple(errors))
