"""Tests for the built-in nuisance learners."""

import numpy as np
import pytest

from dpcausal.core.exceptions import ConfigError, FitError
from dpcausal.core.models import LearnerSpec
from dpcausal.core.predictor import ClippedPredictor, ConstantPredictor, FunctionPredictor
from dpcausal.learners import (
    ForestPredictor,
    LinearPredictor,
    LogisticPredictor,
    available_learners,
    fit_constant,
    fit_forest,
    fit_learner,
    fit_linear,
    fit_logistic,
    fit_tree,
    register_learner,
)


class TestConstantAndLinear:
    """Test the constant and linear learners."""

    def test_constant_mean(self) -> None:
        model = fit_constant(np.zeros((3, 1)), np.array([1.0, 2.0, 6.0]), LearnerSpec("constant"))
        np.testing.assert_array_equal(model.predict(np.zeros((2, 1))), [3.0, 3.0])

    def test_constant_outcome_fold(self) -> None:
        """Test a fold with Y = 0.3 everywhere gives 0.3 everywhere."""
        model = fit_constant(np.ones((4, 2)), np.full(4, 0.3), LearnerSpec("constant"))
        np.testing.assert_allclose(model.predict(np.zeros((3, 2))), 0.3)

    def test_constant_empty(self) -> None:
        with pytest.raises(FitError):
            fit_constant(np.zeros((0, 1)), np.array([]), LearnerSpec("constant"))

    def test_linear_exact_fit(self) -> None:
        """Test exactly linear data Y = 2x is recovered within 1e-8."""
        x = np.linspace(-0.5, 0.5, 21).reshape(-1, 1)
        model = fit_linear(x, 2.0 * x[:, 0], LearnerSpec("linear"))
        assert isinstance(model, LinearPredictor)
        np.testing.assert_allclose(model.predict(x), 2.0 * x[:, 0], atol=1e-8)

    def test_linear_dimension_check(self) -> None:
        model = fit_linear(np.zeros((4, 2)), np.zeros(4), LearnerSpec())
        with pytest.raises(FitError):
            model.predict(np.zeros((1, 3)))


class TestLogistic:
    """Test damped Newton logistic regression."""

    def test_single_class_constant(self) -> None:
        """Test an all-ones target returns a constant predictor at rate 1."""
        model = fit_logistic(np.zeros((5, 1)), np.ones(5), LearnerSpec("logistic"))
        assert isinstance(model, ConstantPredictor)
        assert model.value == 1.0

    def test_symmetric_data_half_at_origin(self) -> None:
        """Test symmetric labels predict 0.5 at x = 0."""
        x = np.tile([[-1.0], [1.0]], (10, 1))
        labels = np.tile([0.0, 1.0], 10)
        model = fit_logistic(x, labels, LearnerSpec("logistic"))
        assert model.predict(np.zeros((1, 1)))[0] == pytest.approx(0.5, abs=1e-6)

    def test_loss_non_increasing(self) -> None:
        """Test the recorded log-loss never increases."""
        rng = np.random.default_rng(0)
        x = rng.normal(size=(300, 2))
        labels = (rng.random(300) < 1 / (1 + np.exp(-(0.5 + x @ [1.0, -2.0])))).astype(float)
        model = fit_logistic(x, labels, LearnerSpec("logistic"))
        assert isinstance(model, LogisticPredictor)
        history = np.array(model.loss_history)
        assert np.all(np.diff(history) <= 1e-15)
        assert model.coef[0] > 0 > model.coef[1]

    def test_separable_data_terminates(self) -> None:
        """Test perfectly separable data stops after max_iter with finite output."""
        x = np.array([[-2.0], [-1.0], [1.0], [2.0]])
        labels = np.array([0.0, 0.0, 1.0, 1.0])
        model = fit_logistic(x, labels, LearnerSpec("logistic", max_iter=25))
        preds = model.predict(x)
        assert np.all(np.isfinite(preds))
        assert preds[0] < 0.5 < preds[3]


class TestTrees:
    """Test CART trees and forests."""

    def test_step_function(self) -> None:
        """Test a single split recovers a step function."""
        x = np.linspace(-1, 1, 40).reshape(-1, 1)
        y = np.where(x[:, 0] > 0, 1.0, -1.0)
        model = fit_tree(x, y, LearnerSpec("tree", min_leaf=2))
        np.testing.assert_array_equal(model.predict(x), y)
        assert model.n_leaves == 2

    def test_plateau_means(self) -> None:
        """Test two plateaus split at zero give exact plateau means."""
        x = np.array([[-2.0], [-1.0], [1.0], [2.0]])
        model = fit_tree(x, np.array([0.5, 0.5, 1.0, 1.0]), LearnerSpec("tree", min_leaf=1))
        left, right = model.predict(np.array([[-1.5], [1.5]]))
        assert right == 1.0
        assert left == 0.5
        assert model.n_leaves == 2

    def test_single_full_tree_forest(self) -> None:
        """Test one tree on the full sample equals a plain tree."""
        rng = np.random.default_rng(5)
        x = rng.normal(size=(30, 2))
        y = rng.normal(size=30)
        spec = LearnerSpec("forest", n_trees=1, subsample_fraction=1.0)
        forest = fit_forest(x, y, spec, seed=3)
        np.testing.assert_array_equal(forest.predict(x), fit_tree(x, y, spec).predict(x))
        np.testing.assert_array_equal(forest.predict_variance(x), np.zeros(30))

    def test_min_leaf_respected(self) -> None:
        rng = np.random.default_rng(1)
        x = rng.normal(size=(60, 2))
        y = rng.normal(size=60)
        model = fit_tree(x, y, LearnerSpec("tree", min_leaf=7))
        counts = np.bincount(model.apply(x))
        assert counts[counts > 0].min() >= 7

    def test_depth_one_single_split(self) -> None:
        """Test depth 1 allows at most one split."""
        rng = np.random.default_rng(2)
        x = rng.normal(size=(50, 1))
        model = fit_tree(x, x[:, 0] ** 2, LearnerSpec("tree", max_depth=1, min_leaf=1))
        assert model.n_leaves <= 2

    def test_forest_variance(self) -> None:
        """Test the forest variance is the between-tree variance over the tree count."""
        rng = np.random.default_rng(3)
        x = rng.normal(size=(80, 1))
        y = x[:, 0] + 0.1 * rng.normal(size=80)
        spec = LearnerSpec("forest", n_trees=10, min_leaf=3)
        model = fit_forest(x, y, spec, seed=0)
        assert isinstance(model, ForestPredictor)
        per_tree = model.predict_per_tree(x[:5])
        assert per_tree.shape == (10, 5)
        np.testing.assert_allclose(model.predict(x[:5]), per_tree.mean(axis=0))
        np.testing.assert_allclose(
            model.predict_variance(x[:5]), per_tree.var(axis=0, ddof=1) / 10
        )

    def test_forest_deterministic(self) -> None:
        rng = np.random.default_rng(4)
        x = rng.normal(size=(40, 2))
        y = rng.normal(size=40)
        spec = LearnerSpec("forest", n_trees=5)
        a = fit_forest(x, y, spec, seed=11).predict(x)
        b = fit_forest(x, y, spec, seed=11).predict(x)
        np.testing.assert_array_equal(a, b)


class TestPredictors:
    """Test predictor wrappers."""

    @pytest.mark.parametrize("scale", [1.0, 1e6, 1e300])
    def test_clipping_holds_for_extreme_inputs(self, scale: float) -> None:
        """Test clipped outputs stay in range even when the base model overflows."""
        base = LinearPredictor(0.0, np.array([5.0]))
        clipped = ClippedPredictor(base, -1.0, 1.0)
        x = np.array([[-scale], [0.0], [scale], [np.inf], [-np.inf]])
        preds = clipped.predict(x)
        assert np.all((preds >= -1.0) & (preds <= 1.0))

    def test_function_predictor(self) -> None:
        model = FunctionPredictor(lambda x: x[:, 0] * 3)
        np.testing.assert_array_equal(model(np.array([[1.0], [2.0]])), [3.0, 6.0])


class TestRegistry:
    """Test the learner registry."""

    def test_builtin_names(self) -> None:
        assert {"constant", "linear", "logistic", "tree", "forest"} <= set(available_learners())

    def test_unknown_learner(self) -> None:
        with pytest.raises(ConfigError, match="unknown learner"):
            fit_learner(LearnerSpec("boosting"), np.zeros((2, 1)), np.zeros(2))

    def test_register_custom_learner(self) -> None:
        """Test a user learner becomes available by name."""

        def fit_zero(covariates, target, spec, seed=None):  # type: ignore
            return ConstantPredictor(0.0)

        register_learner("zero_for_test", fit_zero)
        model = fit_learner(LearnerSpec("zero_for_test"), np.zeros((2, 1)), np.ones(2))
        np.testing.assert_array_equal(model.predict(np.zeros((3, 1))), np.zeros(3))
