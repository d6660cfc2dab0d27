"""Primitive tensor operations for the toy super-resolution network.

Tensors are plain float64 numpy arrays laid out (batch, channels, height,
width). All operations are pure and deterministic: identical inputs give
bit-identical outputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ShapeError, ValidationError


def as_tensor(values) -> np.ndarray:
    """Coerce to a float64 (B, C, H, W) array, checking finiteness."""
    x = np.asarray(values, dtype=np.float64)
    if x.ndim != 4:
        raise ShapeError(f"tensor must be 4-D (B, C, H, W), got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValidationError("tensor contains non-finite values")
    return x


@dataclass(frozen=True)
class ConvParams:
    """Weights (out_ch, in_ch, kh, kw) and bias (out_ch,) of one convolution."""

    weights: np.ndarray
    bias: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        b = np.asarray(self.bias, dtype=np.float64)
        if w.ndim != 4:
            raise ShapeError(f"weights must be 4-D, got shape {w.shape}")
        if w.shape[2] % 2 == 0 or w.shape[3] % 2 == 0:
            raise ShapeError(f"kernel must be odd-sized for same padding, got {w.shape[2:]}")
        if b.shape != (w.shape[0],):
            raise ShapeError(f"bias shape {b.shape} does not match {w.shape[0]} out channels")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", b)
        w.setflags(write=False)
        b.setflags(write=False)

    @property
    def in_channels(self) -> int:
        return self.weights.shape[1]

    @property
    def out_channels(self) -> int:
        return self.weights.shape[0]


def conv2d(x: np.ndarray, p: ConvParams) -> np.ndarray:
    """Stride-1 same-padding cross-correlation plus bias."""
    x = as_tensor(x)
    if x.shape[1] != p.in_channels:
        raise ShapeError(f"input has {x.shape[1]} channels, kernel expects {p.in_channels}")
    kh, kw = p.weights.shape[2:]
    ph, pw = kh // 2, kw // 2
    padded = np.pad(x, ((0, 0), (0, 0), (ph, ph), (pw, pw)))
    windows = np.lib.stride_tricks.sliding_window_view(padded, (kh, kw), axis=(2, 3))
    out = np.einsum("bchwij,ocij->bohw", windows, p.weights)
    return out + p.bias[None, :, None, None]


def leaky_relu(x: np.ndarray, slope: float = 0.2) -> np.ndarray:
    """Elementwise max(x, slope * x)."""
    if not 0.0 <= slope < 1.0:
        raise ValidationError(f"slope {slope} outside [0, 1)")
    x = np.asarray(x, dtype=np.float64)
    return np.maximum(x, slope * x)


def upsample_nearest(x: np.ndarray, factor: int = 2) -> np.ndarray:
    """Replicate each pixel into a factor x factor block."""
    if factor < 1:
        raise ValidationError(f"upsample factor {factor} must be >= 1")
    x = as_tensor(x)
    return np.repeat(np.repeat(x, factor, axis=2), factor, axis=3)
