"""Binary PPM (P6) and PGM (P5) raster I/O, bit-exact for canonical files.

Only maxval 255 is supported. The writer emits the canonical header form
``P6\\n<width> <height>\\n255\\n`` followed by the raw sample bytes, so
``write_ppm(load_ppm(data)) == data`` for files written that way. The
reader additionally tolerates the full header grammar (comments, runs of
whitespace) for third-party files.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..boxgeom import ImageDims
from ..errors import FormatError, ShapeError


@dataclass(frozen=True)
class RasterImage:
    """8-bit image stored as a read-only (height, width, channels) array."""

    pixels: np.ndarray

    def __post_init__(self):
        px = self.pixels
        if px.ndim != 3 or px.shape[2] not in (1, 3):
            raise ShapeError(f"pixels must be (h, w, 1|3), got shape {px.shape}")
        if px.dtype != np.uint8:
            raise ShapeError(f"pixels must be uint8, got {px.dtype}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ShapeError(f"empty image: shape {px.shape}")
        px.setflags(write=False)

    @property
    def dims(self) -> ImageDims:
        return ImageDims(width=self.pixels.shape[1], height=self.pixels.shape[0])

    @property
    def channels(self) -> int:
        return self.pixels.shape[2]

    def to_float(self) -> np.ndarray:
        """Float64 copy of the sample grid."""
        return self.pixels.astype(np.float64)

    @classmethod
    def from_float(cls, values: np.ndarray) -> "RasterImage":
        """Quantize float samples: clamp to [0, 255], round half away from zero."""
        clipped = np.clip(np.asarray(values, dtype=np.float64), 0.0, 255.0)
        return cls(np.floor(clipped + 0.5).astype(np.uint8))


def _tokenize_header(data: bytes, count: int):
    """Yield `count` header tokens plus the offset of the pixel payload."""
    tokens = []
    i = 0
    while len(tokens) < count:
        if i >= len(data):
            raise FormatError("truncated header")
        c = data[i : i + 1]
        if c == b"#":
            while i < len(data) and data[i : i + 1] not in (b"\n", b"\r"):
                i += 1
        elif c.isspace():
            i += 1
        else:
            start = i
            while i < len(data) and not data[i : i + 1].isspace() and data[i : i + 1] != b"#":
                i += 1
            tokens.append(data[start:i])
    # exactly one whitespace byte separates the header from the payload
    if i >= len(data) or not data[i : i + 1].isspace():
        raise FormatError("missing whitespace after maxval")
    return tokens, i + 1


def load_ppm(data: bytes) -> RasterImage:
    """Decode a binary P5 or P6 file with maxval 255."""
    magic = data[:2]
    if magic == b"P6":
        channels = 3
    elif magic == b"P5":
        channels = 1
    else:
        raise FormatError(f"unsupported magic {magic!r}; expected P5 or P6")
    tokens, offset = _tokenize_header(data, 4)
    if tokens[0] != magic:
        raise FormatError(f"malformed magic token {tokens[0]!r}")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise FormatError(f"non-numeric header fields: {tokens[1:]}") from None
    if width < 1 or height < 1:
        raise FormatError(f"invalid dimensions {width}x{height}")
    if maxval != 255:
        raise FormatError(f"unsupported maxval {maxval}; only 255 is handled")
    expected = width * height * channels
    payload = data[offset:]
    if len(payload) < expected:
        raise FormatError(f"truncated pixel data: {len(payload)} of {expected} bytes")
    if len(payload) > expected:
        raise FormatError(f"trailing data after pixels: {len(payload) - expected} bytes")
    pixels = np.frombuffer(payload, dtype=np.uint8).reshape(height, width, channels)
    return RasterImage(pixels.copy())


def write_ppm(image: RasterImage) -> bytes:
    """Encode to the canonical binary form."""
    magic = b"P6" if image.channels == 3 else b"P5"
    dims = image.dims
    header = magic + b"\n" + f"{dims.width} {dims.height}".encode() + b"\n255\n"
    return header + image.pixels.tobytes()


def read_image(path) -> RasterImage:
    return load_ppm(Path(path).read_bytes())


def write_image(path, image: RasterImage) -> None:
    Path(path).write_bytes(write_ppm(image))
