"""Fold-based private confidence intervals.

Both procedures build per-record lower and upper CATE bounds from the G-Formula
fold models, average them over the foreign folds, and release the two means with
the Gaussian mechanism. The bootstrap variant refits each fold on resamples; the
pointwise variant uses a CATE model that reports its own variance.
"""

import dataclasses
import logging
import math
from typing import List, Optional, Protocol, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from scipy.stats import norm

from ..core.exceptions import ConfigError, EstimationError
from ..core.models import BoundScores, Bounds, Dataset, FoldAssignment, LearnerSpec
from ..core.predictor import ConstantPredictor, Predictor
from ..core.privacy import add_gaussian_noise
from ..learners import ForestPredictor, fit_forest
from ..utils.seeding import (
    RELEASE_INTERVAL_LOWER,
    RELEASE_INTERVAL_UPPER,
    STREAM_BOOTSTRAP,
    STREAM_LEARNERS,
    STREAM_NOISE,
    derive_seed,
    make_rng,
)
from .aggregate import leave_out_mean
from .nuisance import fit_outcome_models

logger = logging.getLogger(__name__)

MIN_RECOMMENDED_REPS = 20


class CATEModel(Protocol):
    """Per-fold CATE estimator with a pointwise variance estimate."""

    def predict(self, covariates: np.ndarray) -> np.ndarray:
        ...

    def predict_variance(self, covariates: np.ndarray) -> np.ndarray:
        ...


def empirical_quantile(sorted_sample: np.ndarray, q: float) -> np.ndarray:
    """Element of rank ceil(q * r) (1-indexed, clamped to [1, r]) along axis 0."""
    r = sorted_sample.shape[0]
    rank = min(max(math.ceil(q * r - 1e-9), 1), r)
    return sorted_sample[rank - 1]


def _fold_cate(
    fold_data: Dataset, spec_mu: LearnerSpec, bounds: Bounds, seed: int
) -> "ArmDifferenceCATE":
    outcome0, outcome1, _ = fit_outcome_models(fold_data, spec_mu, bounds, seed)
    return ArmDifferenceCATE(outcome1, outcome0)


def _bootstrap_fold(
    data: Dataset,
    members: np.ndarray,
    spec_mu: LearnerSpec,
    bounds: Bounds,
    r: int,
    alpha: float,
    seed: int,
    fold: int,
) -> Tuple[np.ndarray, np.ndarray]:
    fold_data = data.subset(members)
    base_model = _fold_cate(fold_data, spec_mu, bounds, derive_seed(seed, STREAM_LEARNERS, fold))
    base = base_model.predict(data.covariates)
    replicates = np.empty((r, data.n))
    for b in range(r):
        rng = make_rng(seed, STREAM_BOOTSTRAP, fold, b)
        resample = fold_data.subset(rng.integers(0, fold_data.n, size=fold_data.n))
        model = _fold_cate(resample, spec_mu, bounds, derive_seed(seed, STREAM_BOOTSTRAP, fold, b))
        replicates[b] = model.predict(data.covariates)

    debiased = np.sort(replicates + base - np.median(replicates, axis=0), axis=0)
    # projected per fold so every foreign-fold term stays within [-2 B_mu, 2 B_mu]
    limit = 2.0 * bounds.b_mu
    lower = np.clip(empirical_quantile(debiased, alpha / 2.0), -limit, limit)
    upper = np.clip(empirical_quantile(debiased, 1.0 - alpha / 2.0), -limit, limit)
    return lower, upper


def bootstrap_bounds(
    data: Dataset,
    folds: FoldAssignment,
    spec_mu: LearnerSpec,
    bounds: Bounds,
    r: int,
    alpha: float,
    seed: int,
    n_jobs: int = 1,
    warnings: Optional[List[str]] = None,
) -> BoundScores:
    """Within-fold bootstrap bounds on each record's CATE score.

    For fold k and replication b the outcome models are refit on a same-size
    resample of fold k. The replicate scores are debiased as
    rep + base - median(rep); the alpha/2 and 1 - alpha/2 empirical quantiles are
    clipped to [-2 B_mu, 2 B_mu] per fold and then averaged over the folds other
    than the record's own.
    """
    if r < 2:
        raise ConfigError(f"bootstrap needs at least 2 replications, got {r}")
    if not 0 < alpha <= 1:
        raise ConfigError(f"alpha must lie in (0, 1], got {alpha}")
    if min(folds.sizes) < 2:
        raise ConfigError("bootstrap bounds need folds of at least 2 records")
    if r < MIN_RECOMMENDED_REPS:
        message = f"only {r} bootstrap replications; quantiles will be coarse"
        logger.warning(message)
        if warnings is not None:
            warnings.append(message)

    per_fold = Parallel(n_jobs=n_jobs, backend="threading")(
        delayed(_bootstrap_fold)(data, members, spec_mu, bounds, r, alpha, seed, k)
        for k, members in enumerate(folds.members)
    )
    lower = np.column_stack([lo for lo, _ in per_fold])
    upper = np.column_stack([hi for _, hi in per_fold])
    return BoundScores(
        gamma_minus=leave_out_mean(lower, folds.fold_of),
        gamma_plus=leave_out_mean(upper, folds.fold_of),
    )


class ArmDifferenceCATE:
    """CATE as the difference of the treated and control outcome models.

    Its variance is the sum of the between-tree variances of the two arms; arms
    that are not forests contribute zero.
    """

    def __init__(self, treated: Predictor, control: Predictor):
        self.treated = treated
        self.control = control

    def predict(self, covariates: np.ndarray) -> np.ndarray:
        return self.treated.predict(covariates) - self.control.predict(covariates)

    def predict_variance(self, covariates: np.ndarray) -> np.ndarray:
        return _forest_variance(self.treated, covariates) + _forest_variance(
            self.control, covariates
        )


def _forest_variance(model: Predictor, covariates: np.ndarray) -> np.ndarray:
    if isinstance(model, ForestPredictor):
        return model.predict_variance(covariates)
    return np.zeros(np.asarray(covariates).shape[0])


def fit_forest_cate(
    fold_data: Dataset, spec_mu: LearnerSpec, bounds: Bounds, seed: int
) -> ArmDifferenceCATE:
    """Forest CATE model on one fold; an arm without records predicts 0 with zero variance."""
    spec = dataclasses.replace(spec_mu, kind="forest")
    arms: List[Predictor] = []
    for arm in (1, 0):
        rows = np.nonzero(fold_data.treatment == arm)[0]
        if rows.size == 0:
            logger.warning("fold has no records with A=%d; CATE arm falls back to 0", arm)
            arms.append(ConstantPredictor(0.0))
            continue
        arms.append(
            fit_forest(
                fold_data.covariates[rows],
                np.clip(fold_data.outcome[rows], -bounds.b_mu, bounds.b_mu),
                spec,
                make_rng(seed, arm),
            )
        )
    return ArmDifferenceCATE(arms[0], arms[1])


def fit_cate_models(
    data: Dataset,
    folds: FoldAssignment,
    spec_mu: LearnerSpec,
    bounds: Bounds,
    seed: int,
    n_jobs: int = 1,
) -> List[ArmDifferenceCATE]:
    """One forest CATE model per fold."""
    return list(
        Parallel(n_jobs=n_jobs, backend="threading")(
            delayed(fit_forest_cate)(
                data.subset(members), spec_mu, bounds, derive_seed(seed, STREAM_LEARNERS, k)
            )
            for k, members in enumerate(folds.members)
        )
    )


def pointwise_variance_bounds(
    data: Dataset,
    folds: FoldAssignment,
    models: Sequence[CATEModel],
    alpha: float,
    b_mu: float,
) -> BoundScores:
    """Bonferroni pointwise bounds from per-fold CATE variance estimates.

    For each foreign fold k the score is widened by
    Phi^-1(1 - alpha/(2 n K)) sqrt(V_k(x_i)), projected to [-2 B_mu, 2 B_mu], and
    the projections are averaged.
    """
    if len(models) != folds.k:
        raise EstimationError(f"expected {folds.k} CATE models, got {len(models)}")
    if not 0 < alpha < 1:
        raise ConfigError(f"alpha must lie in (0, 1), got {alpha}")

    z = float(norm.ppf(1.0 - alpha / (2.0 * data.n * folds.k)))
    limit = 2.0 * b_mu
    lower, upper = [], []
    for model in models:
        centre = np.asarray(model.predict(data.covariates), dtype=float)
        variance = np.asarray(model.predict_variance(data.covariates), dtype=float)
        if np.any(variance < 0):
            raise EstimationError("CATE variance estimates must be nonnegative")
        spread = z * np.sqrt(variance)
        lower.append(np.clip(centre - spread, -limit, limit))
        upper.append(np.clip(centre + spread, -limit, limit))

    return BoundScores(
        gamma_minus=leave_out_mean(np.column_stack(lower), folds.fold_of),
        gamma_plus=leave_out_mean(np.column_stack(upper), folds.fold_of),
    )


def private_interval(
    bounds: BoundScores,
    sigma1_sq: float,
    beta: float,
    b_mu: float,
    n: int,
    seed: int,
    warnings: Optional[List[str]] = None,
) -> Tuple[float, float]:
    """Release the noised means of the lower and upper bounds, widened by
    c (sigma1 + B_mu / (2 sqrt(n))) with c = Phi^-1(1 - beta/2).

    The two ends get independent noise, so the release composes two mechanisms at
    the budget behind ``sigma1_sq``. The noised ends are put in order before
    widening.
    """
    if not 0 < beta < 1:
        raise ConfigError(f"beta must lie in (0, 1), got {beta}")
    if n < 1:
        raise ConfigError(f"n must be positive, got {n}")

    c = float(norm.ppf(1.0 - beta / 2.0))
    widening = c * (math.sqrt(sigma1_sq) + b_mu / (2.0 * math.sqrt(n)))
    lower_mean = float(np.mean(bounds.gamma_minus))
    upper_mean = float(np.mean(bounds.gamma_plus))
    tau_minus = float(
        add_gaussian_noise(
            lower_mean, sigma1_sq, make_rng(seed, STREAM_NOISE, RELEASE_INTERVAL_LOWER)
        )
    )
    tau_plus = float(
        add_gaussian_noise(
            upper_mean, sigma1_sq, make_rng(seed, STREAM_NOISE, RELEASE_INTERVAL_UPPER)
        )
    )
    if tau_minus > tau_plus:
        message = "interval ends crossed after noise; returning them in sorted order"
        logger.warning(message)
        if warnings is not None:
            warnings.append(message)
        tau_minus, tau_plus = tau_plus, tau_minus
    # ordered before widening, so the width is never below 2 * widening
    return tau_minus - widening, tau_plus + widening
