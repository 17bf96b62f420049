"""Finite-difference checks of the analytic gradients."""

import numpy as np
import pytest

from graph_of_records.neuralnet.gradcheck import (
    PASS_THRESHOLD,
    GradCheckReport,
    grad_check,
    grad_check_report,
    relative_error,
)


class TestRelativeError:
    """Tests for relative_error."""

    def test_identical(self) -> None:
        """Equal arrays have zero error."""
        assert relative_error(np.ones(3), np.ones(3)) == 0.0

    def test_zero_arrays(self) -> None:
        """Two zero arrays do not divide by zero."""
        assert relative_error(np.zeros(3), np.zeros(3)) == 0.0

    def test_opposite(self) -> None:
        """Opposite arrays have error one."""
        assert relative_error(np.ones(2), -np.ones(2)) == pytest.approx(1.0)

    def test_numerically_zero_gradients(self) -> None:
        """Rounding noise on both sides of a vanishing gradient counts as agreement."""
        assert relative_error(np.full(3, 1e-15), np.full(3, 3e-11)) == 0.0

    def test_small_but_real_gradients_compared(self) -> None:
        """Gradients above the zero floor are still compared relatively."""
        assert relative_error(np.full(3, 1e-5), np.zeros(3)) == pytest.approx(1.0)


class TestGradCheck:
    """Analytic gradients agree with central differences."""

    @pytest.mark.parametrize("tau", [0.07, 1.0])
    @pytest.mark.parametrize("seed", range(10))
    def test_passes_across_seeds(self, seed: int, tau: float) -> None:
        """Every parameter tensor is within the threshold."""
        assert grad_check(seed=seed, tau=tau, alpha=0.5) < PASS_THRESHOLD

    def test_report_covers_every_tensor(self) -> None:
        """The report has one entry per parameter and passes."""
        report = grad_check_report(seed=1, dropout=0.0, alpha=0.9)
        assert set(report.per_tensor) == {
            "w1", "a1_src", "a1_dst", "b1", "w2", "a2_src", "a2_dst", "b2",
        }
        assert report.per_tensor["b2"] < PASS_THRESHOLD
        assert report.passed

    def test_contrastive_only(self) -> None:
        """With alpha 0 only the contrastive loss is checked."""
        assert grad_check_report(seed=3, alpha=0.0).passed

    def test_report_threshold(self) -> None:
        """A report fails at or above the threshold."""
        assert not GradCheckReport(per_tensor={"w1": 1e-4}).passed
        assert GradCheckReport(per_tensor={"w1": 1e-6, "b1": 2e-5}).max_error == 2e-5

    def test_heads_must_divide(self) -> None:
        """The random model needs an even head split."""
        with pytest.raises(ValueError, match="divisible"):
            grad_check_report(dim=7, heads=2)
