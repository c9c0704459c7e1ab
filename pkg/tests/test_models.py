"""Tests for core models."""

import numpy as np
import pytest

from dpcausal.core.exceptions import ConfigError, DataError, EstimationError
from dpcausal.core.models import (
    BoundScores,
    Bounds,
    CIMethod,
    Dataset,
    EstimatorConstant,
    EstimatorKind,
    LearnerSpec,
    NuisanceMatrix,
    PrivacyBudget,
    StudyRecord,
)


class TestModels:
    """Test core data models."""

    def test_estimator_kind_enum(self) -> None:
        """Test EstimatorKind enum values."""
        assert EstimatorKind.G.value == "G"
        assert EstimatorKind.IPW.value == "IPW"
        assert EstimatorKind("AIPW") is EstimatorKind.AIPW

    def test_ci_method_enum(self) -> None:
        """Test CIMethod enum values."""
        assert CIMethod("bootstrap") is CIMethod.BOOTSTRAP
        assert CIMethod.NONE.value == "none"

    def test_dataset_shapes(self) -> None:
        """Test Dataset normalises a 1-d covariate vector into one column."""
        data = Dataset([0.1, 0.2, 0.3], [0, 1, 1], [0.5, -0.5, 1.0])
        assert data.n == 3
        assert data.d == 1
        assert data.covariates.shape == (3, 1)

    def test_dataset_is_read_only(self) -> None:
        """Test Dataset arrays cannot be modified in place."""
        data = Dataset(np.zeros((2, 2)), [0, 1], [0.0, 1.0])
        with pytest.raises(ValueError):
            data.outcome[0] = 5.0

    def test_dataset_length_mismatch(self) -> None:
        """Test mismatched lengths are rejected."""
        with pytest.raises(DataError):
            Dataset(np.zeros((3, 1)), [0, 1], [0.0, 1.0, 0.0])

    def test_dataset_subset_allows_repeats(self) -> None:
        """Test subset with repeated indices, as used by the bootstrap."""
        data = Dataset(np.arange(3.0), [0, 1, 0], [1.0, 2.0, 3.0])
        sub = data.subset(np.array([2, 2, 0]))
        np.testing.assert_array_equal(sub.outcome, [3.0, 3.0, 1.0])

    def test_bounds(self) -> None:
        """Test Bounds validation and the propensity clip range."""
        bounds = Bounds(1.0, 5.0)
        assert bounds.eta == pytest.approx(0.2)
        assert bounds.propensity_range == pytest.approx((0.2, 0.8))
        with pytest.raises(ConfigError):
            Bounds(0.0, 5.0)
        with pytest.raises(ConfigError):
            Bounds(1.0, 1.0)

    def test_privacy_budget(self) -> None:
        """Test PrivacyBudget rejects negative mu and flags mu = 0 as non-private."""
        assert PrivacyBudget(1.5).is_private
        assert not PrivacyBudget(0.0).is_private
        with pytest.raises(ConfigError):
            PrivacyBudget(-0.1)

    def test_learner_spec_validation(self) -> None:
        """Test LearnerSpec hyperparameter checks."""
        assert LearnerSpec("forest").n_trees == 300
        with pytest.raises(ConfigError):
            LearnerSpec("forest", subsample_fraction=0.0)
        with pytest.raises(ConfigError):
            LearnerSpec("tree", min_leaf=0)

    def test_estimator_constant_positive(self) -> None:
        """Test EstimatorConstant rejects nonpositive values."""
        with pytest.raises(ConfigError):
            EstimatorConstant(0.0)

    def test_nuisance_matrix_shapes(self) -> None:
        """Test NuisanceMatrix requires one shared n x K shape."""
        matrix = NuisanceMatrix(np.full((4, 2), 0.5), np.zeros((4, 2)), np.zeros((4, 2)))
        assert (matrix.n, matrix.k) == (4, 2)
        with pytest.raises(EstimationError):
            NuisanceMatrix(np.full((4, 2), 0.5), np.zeros((4, 3)), np.zeros((4, 2)))

    def test_bound_scores_order(self) -> None:
        """Test BoundScores rejects lower > upper."""
        with pytest.raises(EstimationError):
            BoundScores(np.array([1.0]), np.array([0.0]))

    def test_study_record(self) -> None:
        """Test StudyRecord needs at least one record."""
        record = StudyRecord(0.1, 2.0, 100, PrivacyBudget(1.0))
        assert record.budget.mu == 1.0
        with pytest.raises(DataError):
            StudyRecord(0.1, 2.0, 0)
