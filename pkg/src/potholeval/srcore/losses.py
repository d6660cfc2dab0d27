"""Relativistic-average GAN losses over critic score vectors.

The critic network itself is out of scope; these losses operate directly
on its raw scores. The relative-realism probability of one side against
the other is the sigmoid of the score minus the mean opposing score:

    rel(subject_i | other) = sigmoid(subject_i - mean(other))

The critic's loss drives rel(real | fake) toward 1 and rel(fake | real)
toward 0; the generator's adversarial loss is the same expression with
the roles reversed:

    critic_loss    = -mean_r[log rel(r | fake)] - mean_f[log(1 - rel(f | real))]
    generator_loss = -mean_r[log(1 - rel(r | fake))] - mean_f[log rel(f | real)]

Both are non-negative, equal 2*ln(2) when all scores coincide, and depend
only on score differences (adding a constant to every score changes
nothing). Log terms are evaluated through a numerically stable
log-sigmoid, and probabilities reported by :func:`d_ra` are clamped away
from exact 0 and 1 so downstream logs stay finite.

Analytic gradients with respect to every score ship with each loss value;
:func:`finite_difference_check` verifies them against central differences.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import NumericalGuardError, ValidationError

_PROB_FLOOR = 1e-300
_PROB_CEIL = float(np.nextafter(1.0, 0.0))


@dataclass(frozen=True)
class CriticBatch:
    """Critic scores for a batch of real and generated images."""

    c_real: np.ndarray
    c_fake: np.ndarray

    def __post_init__(self):
        real = np.atleast_1d(np.asarray(self.c_real, dtype=np.float64))
        fake = np.atleast_1d(np.asarray(self.c_fake, dtype=np.float64))
        if real.ndim != 1 or fake.ndim != 1:
            raise ValidationError("critic scores must be 1-D")
        if real.size == 0 or fake.size == 0:
            raise ValidationError("critic score lists must be non-empty")
        object.__setattr__(self, "c_real", real)
        object.__setattr__(self, "c_fake", fake)
        real.setflags(write=False)
        fake.setflags(write=False)


@dataclass(frozen=True)
class LossResult:
    loss: float
    grad_real: np.ndarray
    grad_fake: np.ndarray


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _log_sigmoid(z: np.ndarray) -> np.ndarray:
    """log(sigmoid(z)), stable for large |z|."""
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = -np.log1p(np.exp(-z[pos]))
    out[~pos] = z[~pos] - np.log1p(np.exp(z[~pos]))
    return out


def _score_diffs(subject: np.ndarray, other_mean: float) -> np.ndarray:
    with np.errstate(over="ignore", invalid="ignore"):
        z = subject - other_mean
    if not np.all(np.isfinite(z)):
        raise NumericalGuardError(
            "score differences overflow; relative-realism probabilities "
            "would clamp to exactly 0 or 1"
        )
    return z


def d_ra(c_subject, c_other) -> np.ndarray:
    """Relative-realism probabilities of each subject score vs the other side."""
    subject = np.atleast_1d(np.asarray(c_subject, dtype=np.float64))
    other = np.atleast_1d(np.asarray(c_other, dtype=np.float64))
    if subject.size == 0 or other.size == 0:
        raise ValidationError("score lists must be non-empty")
    diffs = _score_diffs(subject, np.mean(other))
    return np.clip(_sigmoid(diffs), _PROB_FLOOR, _PROB_CEIL)


def discriminator_loss(batch: CriticBatch) -> LossResult:
    """Critic-side loss: reward real scores above the fake mean and vice versa."""
    r, f = batch.c_real, batch.c_fake
    n_r, n_f = r.size, f.size
    zr = _score_diffs(r, np.mean(f))  # real scores against the fake mean
    zf = _score_diffs(f, np.mean(r))  # fake scores against the real mean
    loss = -np.mean(_log_sigmoid(zr)) - np.mean(_log_sigmoid(-zf))
    sig_zr = _sigmoid(zr)
    sig_zf = _sigmoid(zf)
    grad_real = -(1.0 - sig_zr) / n_r - np.sum(sig_zf) / (n_r * n_f)
    grad_fake = sig_zf / n_f + np.sum(1.0 - sig_zr) / (n_r * n_f)
    return LossResult(float(loss), grad_real, grad_fake)


def generator_adversarial_loss(batch: CriticBatch) -> LossResult:
    """Generator-side loss: the same relativistic terms with roles reversed."""
    r, f = batch.c_real, batch.c_fake
    n_r, n_f = r.size, f.size
    zr = _score_diffs(r, np.mean(f))
    zf = _score_diffs(f, np.mean(r))
    loss = -np.mean(_log_sigmoid(-zr)) - np.mean(_log_sigmoid(zf))
    sig_zr = _sigmoid(zr)
    sig_zf = _sigmoid(zf)
    grad_real = sig_zr / n_r + np.sum(1.0 - sig_zf) / (n_r * n_f)
    grad_fake = -(1.0 - sig_zf) / n_f - np.sum(sig_zr) / (n_r * n_f)
    return LossResult(float(loss), grad_real, grad_fake)


def finite_difference_check(
    loss_op: Callable[[CriticBatch], LossResult],
    batch: CriticBatch,
    epsilon: float = 1e-5,
) -> float:
    """Max relative error of analytic gradients vs central differences.

    The relative error denominator is ``max(|analytic|, 1e-8)`` so tiny
    gradients do not blow up the ratio.
    """
    if epsilon <= 0:
        raise ValidationError(f"epsilon {epsilon} must be positive")
    analytic = loss_op(batch)

    def loss_at(real, fake):
        return loss_op(CriticBatch(real, fake)).loss

    worst = 0.0
    for side, grads in (("real", analytic.grad_real), ("fake", analytic.grad_fake)):
        base = batch.c_real if side == "real" else batch.c_fake
        other = batch.c_fake if side == "real" else batch.c_real
        for i in range(base.size):
            plus = base.copy()
            minus = base.copy()
            plus[i] += epsilon
            minus[i] -= epsilon
            if side == "real":
                numeric = (loss_at(plus, other) - loss_at(minus, other)) / (2 * epsilon)
            else:
                numeric = (loss_at(other, plus) - loss_at(other, minus)) / (2 * epsilon)
            err = abs(numeric - grads[i]) / max(abs(grads[i]), 1e-8)
            worst = max(worst, err)
    return worst
