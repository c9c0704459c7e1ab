"""CART regression trees and subsampled regression forests."""

from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..core.exceptions import FitError
from ..core.models import LearnerSpec
from ..core.predictor import Predictor, as_matrix
from ..utils.seeding import SeedLike, as_rng

LEAF = -1


class TreePredictor(Predictor):
    """Binary regression tree stored as flat node arrays.

    ``feature[i] == -1`` marks a leaf; otherwise rows with
    ``x[feature[i]] <= threshold[i]`` descend to ``left[i]`` and the rest to ``right[i]``.
    """

    def __init__(
        self,
        feature: Sequence[int],
        threshold: Sequence[float],
        left: Sequence[int],
        right: Sequence[int],
        value: Sequence[float],
        n_features: int,
    ):
        self.feature = np.asarray(feature, dtype=int)
        self.threshold = np.asarray(threshold, dtype=float)
        self.left = np.asarray(left, dtype=int)
        self.right = np.asarray(right, dtype=int)
        self.value = np.asarray(value, dtype=float)
        self.n_features = int(n_features)

    @property
    def n_nodes(self) -> int:
        return int(self.value.shape[0])

    @property
    def n_leaves(self) -> int:
        return int(np.count_nonzero(self.feature == LEAF))

    def apply(self, covariates: np.ndarray) -> np.ndarray:
        """Leaf index reached by every row."""
        matrix = as_matrix(covariates)
        if matrix.shape[1] != self.n_features:
            raise FitError(f"tree fitted on {self.n_features} covariates, got {matrix.shape[1]}")
        node = np.zeros(matrix.shape[0], dtype=int)
        active = np.nonzero(self.feature[node] != LEAF)[0]
        while active.size:
            current = node[active]
            go_left = matrix[active, self.feature[current]] <= self.threshold[current]
            node[active] = np.where(go_left, self.left[current], self.right[current])
            active = active[self.feature[node[active]] != LEAF]
        return node

    def predict(self, covariates: np.ndarray) -> np.ndarray:
        return self.value[self.apply(covariates)]


class _TreeBuilder:
    def __init__(self, spec: LearnerSpec):
        self.max_depth = spec.max_depth
        self.min_leaf = spec.min_leaf
        self.feature: List[int] = []
        self.threshold: List[float] = []
        self.left: List[int] = []
        self.right: List[int] = []
        self.value: List[float] = []

    def _new_node(self, value: float) -> int:
        self.feature.append(LEAF)
        self.threshold.append(0.0)
        self.left.append(LEAF)
        self.right.append(LEAF)
        self.value.append(value)
        return len(self.value) - 1

    def _best_split(self, x: np.ndarray, y: np.ndarray) -> Tuple[float, int, float]:
        m = y.shape[0]
        best: Tuple[float, int, float] = (np.inf, LEAF, 0.0)
        left_n = np.arange(1, m, dtype=float)
        right_n = m - left_n
        size_ok = (left_n >= self.min_leaf) & (right_n >= self.min_leaf)

        for j in range(x.shape[1]):
            order = np.argsort(x[:, j], kind="stable")
            xs, ys = x[order, j], y[order]
            csum, csq = np.cumsum(ys), np.cumsum(ys * ys)
            left_sum, left_sq = csum[:-1], csq[:-1]
            right_sum, right_sq = csum[-1] - left_sum, csq[-1] - left_sq
            sse = (left_sq - left_sum**2 / left_n) + (right_sq - right_sum**2 / right_n)
            valid = size_ok & (xs[1:] > xs[:-1])
            if not valid.any():
                continue
            sse = np.where(valid, sse, np.inf)
            i = int(np.argmin(sse))
            if sse[i] < best[0]:
                threshold = 0.5 * (xs[i] + xs[i + 1])
                if threshold >= xs[i + 1]:
                    threshold = xs[i]
                best = (float(sse[i]), j, float(threshold))
        return best

    def build(self, x: np.ndarray, y: np.ndarray, depth: int = 0) -> int:
        node = self._new_node(float(np.mean(y)))
        m = y.shape[0]
        if depth >= self.max_depth or m < 2 * self.min_leaf:
            return node
        parent_sse = float(np.sum((y - np.mean(y)) ** 2))
        if parent_sse <= 0:
            return node

        sse, feature, threshold = self._best_split(x, y)
        if feature == LEAF or sse >= parent_sse:
            return node

        mask = x[:, feature] <= threshold
        self.feature[node] = feature
        self.threshold[node] = threshold
        self.left[node] = self.build(x[mask], y[mask], depth + 1)
        self.right[node] = self.build(x[~mask], y[~mask], depth + 1)
        return node


def fit_tree(
    covariates: np.ndarray, target: np.ndarray, spec: LearnerSpec, seed: Optional[SeedLike] = None
) -> TreePredictor:
    """CART with variance-reduction splits at midpoint thresholds.

    Growth stops at ``spec.max_depth``, when a child would hold fewer than
    ``spec.min_leaf`` rows, or when no split lowers the squared error.
    """
    x = as_matrix(covariates)
    y = np.asarray(target, dtype=float).reshape(-1)
    if y.shape[0] == 0:
        raise FitError("cannot fit a tree to zero rows")
    if x.shape[0] != y.shape[0]:
        raise FitError(f"{x.shape[0]} covariate rows but {y.shape[0]} targets")

    builder = _TreeBuilder(spec)
    builder.build(x, y)
    return TreePredictor(
        builder.feature, builder.threshold, builder.left, builder.right, builder.value, x.shape[1]
    )


class ForestPredictor(Predictor):
    """Average of regression trees."""

    def __init__(self, trees: Sequence[TreePredictor]):
        if not trees:
            raise FitError("a forest needs at least one tree")
        self.trees = tuple(trees)

    @property
    def n_trees(self) -> int:
        return len(self.trees)

    def predict_per_tree(self, covariates: np.ndarray) -> np.ndarray:
        """(n_trees, m) matrix of individual tree predictions."""
        return np.vstack([tree.predict(covariates) for tree in self.trees])

    def predict(self, covariates: np.ndarray) -> np.ndarray:
        return np.mean(self.predict_per_tree(covariates), axis=0)

    def predict_variance(self, covariates: np.ndarray) -> np.ndarray:
        """Between-tree variance of the forest average."""
        per_tree = self.predict_per_tree(covariates)
        if self.n_trees < 2:
            return np.zeros(per_tree.shape[1])
        return np.var(per_tree, axis=0, ddof=1) / self.n_trees


def fit_forest(
    covariates: np.ndarray, target: np.ndarray, spec: LearnerSpec, seed: Optional[SeedLike] = None
) -> ForestPredictor:
    """Average of ``spec.n_trees`` CART trees, each grown on a subsample drawn without
    replacement holding ``spec.subsample_fraction`` of the rows."""
    x = as_matrix(covariates)
    y = np.asarray(target, dtype=float).reshape(-1)
    m = y.shape[0]
    if m == 0:
        raise FitError("cannot fit a forest to zero rows")
    if x.shape[0] != m:
        raise FitError(f"{x.shape[0]} covariate rows but {m} targets")

    rng = as_rng(0 if seed is None else seed)
    size = max(1, int(round(spec.subsample_fraction * m)))
    trees = []
    for _ in range(spec.n_trees):
        rows = np.sort(rng.choice(m, size=size, replace=False))
        trees.append(fit_tree(x[rows], y[rows], spec))
    return ForestPredictor(trees)
