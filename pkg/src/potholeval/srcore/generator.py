"""Residual-in-residual dense generator for 2^k upscaling.

The network follows the batch-norm-free dense-block design used by modern
SR generators: a head convolution into feature space, a chain of
residual-in-residual dense blocks, a trunk convolution with a global skip
connection, then one (nearest-upsample, conv, leaky-relu) stage per factor
of 2, finished by two tail convolutions back to image channels.

Each dense block applies five 3x3 convolutions where conv ``i`` sees the
block input concatenated with all previous outputs; the first four are
followed by a leaky rectifier. Residual branches are scaled by
``residual_scale`` before being added, at both the dense-block level and
the outer block level, so a block with all-zero parameters is exactly the
identity map.

Parameter files use a small self-describing binary layout (see
``save_generator``): a versioned magic line, a JSON header naming each
tensor and its shape, then the raw float64 little-endian buffers in header
order.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np

from ..errors import FormatError, ShapeError, ValidationError
from .ops import ConvParams, as_tensor, conv2d, leaky_relu, upsample_nearest

WEIGHTS_MAGIC = b"POTHOLEVAL-GEN/1\n"

DENSE_CONVS = 5
DENSE_BLOCKS_PER_RRDB = 3
LEAKY_SLOPE = 0.2


@dataclass(frozen=True)
class DenseBlockParams:
    """Five dense convolutions growing by ``growth_channels`` each step."""

    convs: tuple[ConvParams, ...]

    def __post_init__(self):
        if len(self.convs) != DENSE_CONVS:
            raise ShapeError(f"dense block needs {DENSE_CONVS} convs, got {len(self.convs)}")


@dataclass(frozen=True)
class RRDBParams:
    dense_blocks: tuple[DenseBlockParams, ...]

    def __post_init__(self):
        if len(self.dense_blocks) != DENSE_BLOCKS_PER_RRDB:
            raise ShapeError(
                f"residual block needs {DENSE_BLOCKS_PER_RRDB} dense blocks,"
                f" got {len(self.dense_blocks)}"
            )


@dataclass(frozen=True)
class GeneratorParams:
    n_features: int
    growth_channels: int
    n_rrdb_blocks: int
    residual_scale: float
    upscale_factor: int
    in_channels: int
    head: ConvParams
    blocks: tuple[RRDBParams, ...]
    trunk: ConvParams
    upsample_convs: tuple[ConvParams, ...]
    tail_hr: ConvParams
    tail_out: ConvParams

    def __post_init__(self):
        if not 0.0 < self.residual_scale <= 1.0:
            raise ValidationError(f"residual scale {self.residual_scale} outside (0, 1]")
        factor = self.upscale_factor
        if factor < 1 or factor & (factor - 1):
            raise ValidationError(f"upscale factor {factor} is not a positive power of 2")
        if len(self.blocks) != self.n_rrdb_blocks:
            raise ShapeError(f"expected {self.n_rrdb_blocks} blocks, got {len(self.blocks)}")
        if len(self.upsample_convs) != factor.bit_length() - 1:
            raise ShapeError(
                f"factor {factor} needs {factor.bit_length() - 1} upsample convs,"
                f" got {len(self.upsample_convs)}"
            )

    @property
    def n_upsample_stages(self) -> int:
        return self.upscale_factor.bit_length() - 1


def dense_block_forward(
    x: np.ndarray, block: DenseBlockParams, residual_scale: float, slope: float = LEAKY_SLOPE
) -> np.ndarray:
    """Densely connected conv stack with a scaled residual to the input."""
    feats = [as_tensor(x)]
    for i, conv in enumerate(block.convs):
        y = conv2d(np.concatenate(feats, axis=1), conv)
        if i < DENSE_CONVS - 1:
            y = leaky_relu(y, slope)
        feats.append(y)
    return x + residual_scale * feats[-1]


def rrdb_forward(
    x: np.ndarray, block: RRDBParams, residual_scale: float, slope: float = LEAKY_SLOPE
) -> np.ndarray:
    """Three chained dense blocks with a scaled outer residual.

    The outer skip adds ``residual_scale`` times the chain's net change,
    so zero parameters (or a zero scale) leave the input untouched.
    """
    y = as_tensor(x)
    for dense in block.dense_blocks:
        y = dense_block_forward(y, dense, residual_scale, slope)
    return x + residual_scale * (y - x)


def generator_forward(lr: np.ndarray, params: GeneratorParams) -> np.ndarray:
    """Full upscaling forward pass: (B, C, H, W) -> (B, C, H*f, W*f)."""
    x = as_tensor(lr)
    if x.shape[1] != params.in_channels:
        raise ShapeError(f"input has {x.shape[1]} channels, expected {params.in_channels}")
    scale = params.residual_scale
    head = conv2d(x, params.head)
    y = head
    for block in params.blocks:
        y = rrdb_forward(y, block, scale)
    fea = head + conv2d(y, params.trunk)
    for up_conv in params.upsample_convs:
        fea = leaky_relu(conv2d(upsample_nearest(fea, 2), up_conv), LEAKY_SLOPE)
    out = leaky_relu(conv2d(fea, params.tail_hr), LEAKY_SLOPE)
    return conv2d(out, params.tail_out)


def _named_tensors(params: GeneratorParams):
    """Flat (name, array) list covering every parameter, in storage order."""
    entries = [("head.weight", params.head.weights), ("head.bias", params.head.bias)]
    for b, block in enumerate(params.blocks):
        for d, dense in enumerate(block.dense_blocks):
            for c, conv in enumerate(dense.convs):
                prefix = f"block{b}.dense{d}.conv{c}"
                entries.append((f"{prefix}.weight", conv.weights))
                entries.append((f"{prefix}.bias", conv.bias))
    entries.append(("trunk.weight", params.trunk.weights))
    entries.append(("trunk.bias", params.trunk.bias))
    for u, conv in enumerate(params.upsample_convs):
        entries.append((f"up{u}.weight", conv.weights))
        entries.append((f"up{u}.bias", conv.bias))
    entries.append(("tail_hr.weight", params.tail_hr.weights))
    entries.append(("tail_hr.bias", params.tail_hr.bias))
    entries.append(("tail_out.weight", params.tail_out.weights))
    entries.append(("tail_out.bias", params.tail_out.bias))
    return entries


def save_generator(params: GeneratorParams) -> bytes:
    """Serialize to the versioned binary parameter format."""
    entries = _named_tensors(params)
    header = {
        "config": {
            "n_features": params.n_features,
            "growth_channels": params.growth_channels,
            "n_rrdb_blocks": params.n_rrdb_blocks,
            "residual_scale": params.residual_scale,
            "upscale_factor": params.upscale_factor,
            "in_channels": params.in_channels,
        },
        "tensors": [{"name": name, "shape": list(arr.shape)} for name, arr in entries],
    }
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")
    blob = b"".join(np.ascontiguousarray(arr, dtype="<f8").tobytes() for _, arr in entries)
    return WEIGHTS_MAGIC + struct.pack("<I", len(header_bytes)) + header_bytes + blob


def load_generator(data: bytes) -> GeneratorParams:
    """Parse a parameter file, validating magic, header, and tensor sizes."""
    if not data.startswith(WEIGHTS_MAGIC):
        raise FormatError(f"bad magic; expected {WEIGHTS_MAGIC!r}")
    offset = len(WEIGHTS_MAGIC)
    if len(data) < offset + 4:
        raise FormatError("truncated header length")
    (header_len,) = struct.unpack_from("<I", data, offset)
    offset += 4
    try:
        header = json.loads(data[offset : offset + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"unreadable header: {exc}") from None
    offset += header_len
    cfg = header.get("config", {})
    tensors = {}
    for entry in header.get("tensors", []):
        shape = tuple(entry["shape"])
        count = int(np.prod(shape)) if shape else 1
        end = offset + 8 * count
        if end > len(data):
            raise FormatError(f"truncated tensor {entry['name']!r}")
        tensors[entry["name"]] = np.frombuffer(data[offset:end], dtype="<f8").reshape(shape)
        offset = end
    if offset != len(data):
        raise FormatError(f"trailing data after tensors: {len(data) - offset} bytes")

    def conv(prefix):
        try:
            return ConvParams(tensors[f"{prefix}.weight"], tensors[f"{prefix}.bias"])
        except KeyError as exc:
            raise FormatError(f"missing tensor {exc.args[0]!r}") from None

    try:
        blocks = tuple(
            RRDBParams(
                tuple(
                    DenseBlockParams(
                        tuple(conv(f"block{b}.dense{d}.conv{c}") for c in range(DENSE_CONVS))
                    )
                    for d in range(DENSE_BLOCKS_PER_RRDB)
                )
            )
            for b in range(int(cfg["n_rrdb_blocks"]))
        )
        n_stages = int(cfg["upscale_factor"]).bit_length() - 1
        return GeneratorParams(
            n_features=int(cfg["n_features"]),
            growth_channels=int(cfg["growth_channels"]),
            n_rrdb_blocks=int(cfg["n_rrdb_blocks"]),
            residual_scale=float(cfg["residual_scale"]),
            upscale_factor=int(cfg["upscale_factor"]),
            in_channels=int(cfg["in_channels"]),
            head=conv("head"),
            blocks=blocks,
            trunk=conv("trunk"),
            upsample_convs=tuple(conv(f"up{u}") for u in range(n_stages)),
            tail_hr=conv("tail_hr"),
            tail_out=conv("tail_out"),
        )
    except KeyError as exc:
        raise FormatError(f"header config missing {exc.args[0]!r}") from None
    except (ShapeError, ValidationError) as exc:
        raise FormatError(f"inconsistent parameter file: {exc}") from None


def init_generator(
    n_features: int = 16,
    growth_channels: int = 8,
    n_rrdb_blocks: int = 2,
    upscale_factor: int = 4,
    in_channels: int = 3,
    residual_scale: float = 0.2,
    seed: int = 0,
    zero: bool = False,
    kernel: int = 3,
    tail_bias: float = 0.0,
) -> GeneratorParams:
    """Build a generator with seeded small-normal weights (or all zeros)."""
    rng = np.random.default_rng(seed)

    def conv(out_ch, in_ch):
        if zero:
            w = np.zeros((out_ch, in_ch, kernel, kernel))
        else:
            # small init keeps toy forward passes in a tame numeric range
            w = rng.normal(0.0, 0.1, size=(out_ch, in_ch, kernel, kernel))
            w /= np.sqrt(in_ch * kernel * kernel)
        return ConvParams(w, np.zeros(out_ch))

    def dense_block():
        convs = []
        for i in range(DENSE_CONVS - 1):
            convs.append(conv(growth_channels, n_features + i * growth_channels))
        convs.append(conv(n_features, n_features + (DENSE_CONVS - 1) * growth_channels))
        return DenseBlockParams(tuple(convs))

    blocks = tuple(
        RRDBParams(tuple(dense_block() for _ in range(DENSE_BLOCKS_PER_RRDB)))
        for _ in range(n_rrdb_blocks)
    )
    n_stages = upscale_factor.bit_length() - 1
    return GeneratorParams(
        n_features=n_features,
        growth_channels=growth_channels,
        n_rrdb_blocks=n_rrdb_blocks,
        residual_scale=residual_scale,
        upscale_factor=upscale_factor,
        in_channels=in_channels,
        head=conv(n_features, in_channels),
        blocks=blocks,
        trunk=conv(n_features, n_features),
        upsample_convs=tuple(conv(n_features, n_features) for _ in range(n_stages)),
        tail_hr=conv(n_features, n_features),
        tail_out=ConvParams(
            conv(in_channels, n_features).weights,
            np.full(in_channels, float(tail_bias)),
        ),
    )
