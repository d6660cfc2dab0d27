"""Toy-scale super-resolution core: network forward passes and GAN losses."""

from .ops import ConvParams, as_tensor, conv2d, leaky_relu, upsample_nearest
from .generator import (
    DenseBlockParams,
    GeneratorParams,
    RRDBParams,
    dense_block_forward,
    generator_forward,
    init_generator,
    load_generator,
    rrdb_forward,
    save_generator,
)
from .losses import (
    CriticBatch,
    LossResult,
    d_ra,
    discriminator_loss,
    finite_difference_check,
    generator_adversarial_loss,
)
from .quality import psnr

__all__ = [
    "ConvParams",
    "CriticBatch",
    "DenseBlockParams",
    "GeneratorParams",
    "LossResult",
    "RRDBParams",
    "as_tensor",
    "conv2d",
    "d_ra",
    "dense_block_forward",
    "discriminator_loss",
    "finite_difference_check",
    "generator_adversarial_loss",
    "generator_forward",
    "init_generator",
    "leaky_relu",
    "load_generator",
    "psnr",
    "rrdb_forward",
    "save_generator",
    "upsample_nearest",
]
