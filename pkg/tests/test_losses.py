import math

import numpy as np
import pytest

from potholeval.errors import NumericalGuardError, ValidationError
from potholeval.srcore import (
    CriticBatch,
    d_ra,
    discriminator_loss,
    finite_difference_check,
    generator_adversarial_loss,
)

TWO_LN_2 = 2 * math.log(2)


def random_batch(rng, max_size=8, scale=5.0):
    n_r = int(rng.integers(1, max_size + 1))
    n_f = int(rng.integers(1, max_size + 1))
    return CriticBatch(rng.uniform(-scale, scale, n_r), rng.uniform(-scale, scale, n_f))


class TestDRa:
    def test_equal_scores_give_half(self):
        assert d_ra([0.3], [0.3])[0] == 0.5

    def test_saturation_high(self):
        assert d_ra([20.0], [0.0])[0] == pytest.approx(1.0, abs=1e-8)

    def test_scalar_sigmoid_value(self):
        assert d_ra([1.0], [0.0])[0] == pytest.approx(0.7310585786300049, abs=1e-12)

    def test_mean_of_other_side(self):
        # subject compared against the average opposing score
        values = d_ra([1.0], [0.0, 2.0])
        assert values[0] == 0.5

    def test_outputs_strictly_inside_unit_interval(self):
        values = d_ra([-800.0, 800.0], [0.0])
        assert 0.0 < values[0] and values[1] < 1.0

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            d_ra([], [0.0])


class TestLossValues:
    def test_symmetric_point(self):
        batch = CriticBatch([0.7], [0.7])
        assert discriminator_loss(batch).loss == pytest.approx(TWO_LN_2, abs=1e-12)
        assert generator_adversarial_loss(batch).loss == pytest.approx(TWO_LN_2, abs=1e-12)

    def test_separated_critic_wins(self):
        batch = CriticBatch([30.0], [0.0])
        assert discriminator_loss(batch).loss < 1e-8

    def test_separated_generator_wins(self):
        batch = CriticBatch([0.0], [30.0])
        assert generator_adversarial_loss(batch).loss < 1e-8

    def test_scalar_oracle_value(self):
        # straight scalar evaluation of the two-real one-fake case
        c_real, c_fake = [0.3, -0.1], [0.2]
        batch = CriticBatch(c_real, c_fake)

        def sig(z):
            return 1.0 / (1.0 + math.exp(-z))

        m_r = sum(c_real) / len(c_real)
        m_f = sum(c_fake) / len(c_fake)
        expected = -(
            sum(math.log(sig(r - m_f)) for r in c_real) / len(c_real)
        ) - (
            sum(math.log(1.0 - sig(f - m_r)) for f in c_fake) / len(c_fake)
        )
        assert discriminator_loss(batch).loss == pytest.approx(expected, abs=1e-14)

    def test_role_swap_identity(self, rng):
        # critic loss equals generator loss with real and fake exchanged
        for _ in range(50):
            batch = random_batch(rng)
            swapped = CriticBatch(batch.c_fake, batch.c_real)
            assert discriminator_loss(batch).loss == pytest.approx(
                generator_adversarial_loss(swapped).loss, abs=1e-12
            )

    def test_losses_non_negative(self, rng):
        for _ in range(100):
            batch = random_batch(rng)
            assert discriminator_loss(batch).loss >= 0.0
            assert generator_adversarial_loss(batch).loss >= 0.0

    def test_shift_invariance(self, rng):
        for _ in range(100):
            batch = random_batch(rng)
            c = float(rng.uniform(-10, 10))
            shifted = CriticBatch(batch.c_real + c, batch.c_fake + c)
            for loss_op in (discriminator_loss, generator_adversarial_loss):
                assert abs(loss_op(batch).loss - loss_op(shifted).loss) < 1e-10

    def test_overflowing_scores_guarded(self):
        with pytest.raises(NumericalGuardError):
            discriminator_loss(CriticBatch([1e308], [-1e308]))

    def test_empty_batch_rejected(self):
        with pytest.raises(ValidationError):
            CriticBatch([], [1.0])


class TestGradients:
    def test_finite_difference_agreement(self, rng):
        for _ in range(60):
            batch = random_batch(rng)
            for loss_op in (discriminator_loss, generator_adversarial_loss):
                assert finite_difference_check(loss_op, batch) < 1e-4

    def test_gradient_sums_cancel(self, rng):
        # shift direction is flat, so per-side gradient sums are opposite
        for _ in range(50):
            batch = random_batch(rng)
            for loss_op in (discriminator_loss, generator_adversarial_loss):
                result = loss_op(batch)
                assert float(np.sum(result.grad_real) + np.sum(result.grad_fake)) == \
                    pytest.approx(0.0, abs=1e-12)

    def test_symmetric_case_gradients(self):
        # all scores zero: every sigmoid is 1/2, so each real-score gradient
        # of the critic loss is -(1/2)/n_r - (1/2)/(n_r) = -1/n_r
        batch = CriticBatch([0.0, 0.0], [0.0, 0.0])
        result = discriminator_loss(batch)
        assert result.grad_real == pytest.approx([-0.5, -0.5], abs=1e-15)
        assert result.grad_fake == pytest.approx([0.5, 0.5], abs=1e-15)

    def test_epsilon_validation(self):
        with pytest.raises(ValidationError):
            finite_difference_check(discriminator_loss, CriticBatch([0.0], [0.0]), epsilon=0.0)
