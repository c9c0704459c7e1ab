"""Tests for dataset validation, clipping, folds and file ingestion."""

import json

import numpy as np
import pytest

from dpcausal.core.dataset import (
    clip_outcomes,
    load_dataset,
    prepare_dataset,
    read_csv,
    rescale_covariates,
    split_folds,
    validate,
    write_csv,
    write_json,
)
from dpcausal.core.exceptions import DataError, DatasetValidationError, InvalidFoldCountError
from dpcausal.core.models import Bounds, Dataset

BOUNDS = Bounds(1.0, 10.0)


class TestValidate:
    """Test dataset validation."""

    def test_valid_dataset_passes(self) -> None:
        """Test a dataset meeting every constraint passes."""
        data = Dataset(np.zeros((3, 1)), [0, 1, 1], [-1.0, 0.0, 1.0])
        report = validate(data, BOUNDS)
        assert report.passed
        assert report.n_requiring_clipping == 0
        assert report.messages == []

    def test_non_binary_treatment(self) -> None:
        """Test a treatment value of 2 is a hard error."""
        data = Dataset(np.zeros((3, 1)), [0, 2, 1], [0.0, 0.0, 0.0])
        with pytest.raises(DatasetValidationError, match="non-binary treatment"):
            validate(data, BOUNDS)

    def test_non_finite_entries(self) -> None:
        """Test NaN anywhere is a hard error."""
        data = Dataset(np.array([[0.0], [np.nan]]), [0, 1], [0.0, 0.0])
        with pytest.raises(DatasetValidationError):
            validate(data, BOUNDS)

    def test_out_of_bound_outcome_is_reported(self) -> None:
        """Test an outcome of 1.7 with B_mu = 1 is reported for clipping."""
        data = Dataset(np.zeros((3, 1)), [0, 1, 1], [0.0, 1.7, 0.2])
        report = validate(data, BOUNDS)
        assert report.n_requiring_clipping == 1
        assert report.messages == ["1 outcome requires clipping"]
        assert report.passed
        assert not validate(data, BOUNDS, clip_policy=False).passed


class TestClipOutcomes:
    """Test outcome clipping."""

    def test_clip_examples(self) -> None:
        """Test values inside, above and below the bound."""
        data = Dataset(np.zeros((3, 1)), [0, 1, 0], [0.5, 1.7, -3.0])
        clipped = clip_outcomes(data, BOUNDS)
        np.testing.assert_array_equal(clipped.outcome, [0.5, 1.0, -1.0])
        np.testing.assert_array_equal(clipped.treatment, data.treatment)
        np.testing.assert_array_equal(clipped.covariates, data.covariates)

    def test_clip_is_idempotent(self) -> None:
        """Test clipping twice equals clipping once."""
        rng = np.random.default_rng(3)
        data = Dataset(rng.normal(size=(20, 2)), rng.integers(0, 2, 20), 3 * rng.normal(size=20))
        once = clip_outcomes(data, BOUNDS)
        twice = clip_outcomes(once, BOUNDS)
        np.testing.assert_array_equal(once.outcome, twice.outcome)

    def test_prepare_dataset_clips_once(self) -> None:
        """Test ingestion validates and clips."""
        data = Dataset(np.zeros((2, 1)), [0, 1], [2.0, -0.5])
        prepared = prepare_dataset(data, BOUNDS)
        np.testing.assert_array_equal(prepared.outcome, [1.0, -0.5])


class TestSplitFolds:
    """Test fold partitioning."""

    def test_exact_division(self) -> None:
        """Test n=10, k=5 gives five folds of two."""
        folds = split_folds(10, 5, seed=0)
        assert folds.sizes == [2, 2, 2, 2, 2]

    def test_remainder_rule(self) -> None:
        """Test n=11, k=5 gives sizes {3,2,2,2,2}."""
        folds = split_folds(11, 5, seed=1)
        assert sorted(folds.sizes, reverse=True) == [3, 2, 2, 2, 2]

    def test_k_larger_than_n(self) -> None:
        """Test k > n raises an invalid fold count error."""
        with pytest.raises(InvalidFoldCountError, match="invalid fold count"):
            split_folds(3, 5, seed=0)

    def test_k_below_two(self) -> None:
        """Test k < 2 raises."""
        with pytest.raises(InvalidFoldCountError):
            split_folds(10, 1, seed=0)

    @pytest.mark.parametrize("seed", [0, 1, 7, 12345])
    def test_partition_property(self, seed: int) -> None:
        """Test the members form a partition of 0..n-1 consistent with fold_of."""
        folds = split_folds(37, 6, seed)
        combined = np.sort(np.concatenate(folds.members))
        np.testing.assert_array_equal(combined, np.arange(37))
        for k, members in enumerate(folds.members):
            assert np.all(folds.fold_of[members] == k)

    def test_deterministic(self) -> None:
        """Test the same seed reproduces the same assignment."""
        a = split_folds(50, 4, seed=9)
        b = split_folds(50, 4, seed=9)
        np.testing.assert_array_equal(a.fold_of, b.fold_of)
        c = split_folds(50, 4, seed=10)
        assert not np.array_equal(a.fold_of, c.fold_of)


class TestRescaleCovariates:
    """Test covariate norm rescaling."""

    def test_norms_bounded_by_one(self) -> None:
        """Test every rescaled row has norm at most 1."""
        rng = np.random.default_rng(0)
        data = Dataset(rng.normal(size=(500, 3)), rng.integers(0, 2, 500), np.zeros(500))
        rescaled = rescale_covariates(data)
        norms = np.linalg.norm(rescaled.covariates, axis=1)
        assert norms.max() <= 1.0 + 1e-12
        assert np.mean(norms >= 1.0 - 1e-12) <= 0.02


class TestFileIO:
    """Test CSV and JSON ingestion."""

    def test_csv_round_trip(self, tmp_path) -> None:
        """Test a written CSV reads back to the same dataset."""
        data = Dataset(np.array([[0.25, -1.5], [3.0, 0.0]]), [1, 0], [0.1, -0.9])
        path = tmp_path / "data.csv"
        write_csv(data, path)
        assert path.read_text(encoding="utf-8").splitlines()[0] == "x0,x1,a,y"
        loaded = read_csv(path)
        np.testing.assert_array_equal(loaded.covariates, data.covariates)
        np.testing.assert_array_equal(loaded.treatment, data.treatment)
        np.testing.assert_array_equal(loaded.outcome, data.outcome)

    def test_json_mirrors_csv(self, tmp_path) -> None:
        """Test the JSON schema uses the CSV column names."""
        data = Dataset(np.array([[0.5]]), [1], [0.2])
        path = tmp_path / "data.json"
        write_json(data, path)
        records = json.loads(path.read_text(encoding="utf-8"))
        assert records == [{"x0": 0.5, "a": 1, "y": 0.2}]
        assert load_dataset(path).n == 1

    def test_missing_columns(self, tmp_path) -> None:
        """Test a CSV without the outcome column is rejected."""
        path = tmp_path / "bad.csv"
        path.write_text("x0,a\n0.1,1\n", encoding="utf-8")
        with pytest.raises(DataError):
            read_csv(path)

    def test_unreadable_file(self, tmp_path) -> None:
        """Test a missing file raises DataError."""
        with pytest.raises(DataError):
            read_csv(tmp_path / "missing.csv")
