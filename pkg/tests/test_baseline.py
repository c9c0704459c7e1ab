"""Tests for the subsample-and-aggregate baseline."""

import pytest

from dpcausal.core.dataset import split_folds
from dpcausal.core.exceptions import ConfigError
from dpcausal.core.models import Bounds, EstimatorKind, LearnerSpec
from dpcausal.experiments.baseline import (
    private_subsample_aggregate,
    subsample_aggregate_estimate,
    subsample_aggregate_sensitivity,
)
from dpcausal.experiments.generators import gen_low_overlap

BOUNDS = Bounds(1.0, 10.0)
CONSTANT = LearnerSpec("constant")


class TestSubsampleAggregate:
    """Test the baseline estimator."""

    def test_small_folds_rejected(self) -> None:
        data = gen_low_overlap(9, seed=0)
        folds = split_folds(9, 3, seed=0)
        with pytest.raises(ConfigError, match="at least 4"):
            subsample_aggregate_estimate(data, folds, CONSTANT, CONSTANT, BOUNDS, EstimatorKind.G)

    def test_two_folds_of_four(self) -> None:
        data = gen_low_overlap(8, seed=1)
        folds = split_folds(8, 2, seed=0)
        tau = subsample_aggregate_estimate(
            data, folds, CONSTANT, CONSTANT, BOUNDS, EstimatorKind.AIPW, seed=2
        )
        assert abs(tau) <= 2.0 * (1.0 + 10.0)

    def test_sensitivity(self) -> None:
        """Test 2 M max|I_k| / n with M = 2 B_mu for the G-Formula."""
        folds = split_folds(10, 3, seed=0)
        assert subsample_aggregate_sensitivity(EstimatorKind.G, BOUNDS, folds) == pytest.approx(
            2.0 * 2.0 * 4 / 10
        )

    def test_private_release(self) -> None:
        data = gen_low_overlap(40, seed=3)
        folds = split_folds(40, 4, seed=1)
        args = (data, folds, CONSTANT, CONSTANT, BOUNDS, EstimatorKind.G)
        exact, zero = private_subsample_aggregate(*args, 0.0, seed=5)
        assert zero == 0.0
        assert exact == pytest.approx(subsample_aggregate_estimate(*args, seed=5))
        noisy, variance = private_subsample_aggregate(*args, 1.0, seed=5)
        assert variance == pytest.approx((4.0 * 10 / 40) ** 2)
        assert noisy != exact
        assert private_subsample_aggregate(*args, 1.0, seed=5)[0] == noisy
