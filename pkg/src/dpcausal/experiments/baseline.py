"""Subsample-and-aggregate baseline.

Each fold is split into two halves; nuisances fit on one half score the other and
vice versa, so every record is scored by models from its own fold only. Used to
compare against the cross-fold ensemble.
"""

import logging
from typing import Tuple

import numpy as np

from ..core.dataset import prepare_dataset
from ..core.exceptions import ConfigError
from ..core.models import (
    AggregatedNuisance,
    Bounds,
    Dataset,
    EstimatorKind,
    FoldAssignment,
    LearnerSpec,
    PrivacyBudget,
)
from ..core.privacy import add_gaussian_noise, score_bound
from ..estimation.estimators import compute_scores
from ..estimation.nuisance import fit_triple
from ..utils.seeding import STREAM_BASELINE, STREAM_NOISE, derive_seed, make_rng

logger = logging.getLogger(__name__)

MIN_FOLD_SIZE = 4


def _half_scores(
    data: Dataset,
    train: np.ndarray,
    score: np.ndarray,
    spec_pi: LearnerSpec,
    spec_mu: LearnerSpec,
    bounds: Bounds,
    kind: EstimatorKind,
    seed: int,
) -> np.ndarray:
    triple = fit_triple(data.subset(train), spec_pi, spec_mu, bounds, seed)
    target = data.subset(score)
    pi = triple.propensity.predict(target.covariates)
    nuisance = AggregatedNuisance(
        pi1=pi,
        one_minus_pi0=1.0 - pi,
        mu0=triple.outcome0.predict(target.covariates),
        mu1=triple.outcome1.predict(target.covariates),
    )
    return compute_scores(target, nuisance, kind).scores


def subsample_aggregate_estimate(
    data: Dataset,
    folds: FoldAssignment,
    spec_pi: LearnerSpec,
    spec_mu: LearnerSpec,
    bounds: Bounds,
    kind: EstimatorKind,
    seed: int = 0,
) -> float:
    """Mean of half-fold cross-fitted scores over all folds."""
    if folds.n != data.n:
        raise ConfigError(f"fold assignment covers {folds.n} rows, dataset has {data.n}")
    if min(folds.sizes) < MIN_FOLD_SIZE:
        raise ConfigError(
            f"subsample-and-aggregate needs folds of at least {MIN_FOLD_SIZE} records, "
            f"smallest has {min(folds.sizes)}"
        )
    data = prepare_dataset(data, bounds)

    scores = []
    for k, members in enumerate(folds.members):
        shuffled = make_rng(seed, STREAM_BASELINE, k).permutation(members)
        first, second = np.array_split(shuffled, 2)
        first, second = np.sort(first), np.sort(second)
        for half, (train, score) in enumerate(((first, second), (second, first))):
            half_seed = derive_seed(seed, STREAM_BASELINE, k, half)
            scores.append(
                _half_scores(data, train, score, spec_pi, spec_mu, bounds, kind, half_seed)
            )
    return float(np.mean(np.concatenate(scores)))


def subsample_aggregate_sensitivity(
    kind: EstimatorKind, bounds: Bounds, folds: FoldAssignment
) -> float:
    """Replacement sensitivity of the baseline mean: 2M max_k |I_k| / n.

    A changed record moves its own score and, through one half-fold model, the
    scores of the other half of its fold; each score moves by at most 2M.
    """
    return 2.0 * score_bound(kind, bounds) * max(folds.sizes) / folds.n


def private_subsample_aggregate(
    data: Dataset,
    folds: FoldAssignment,
    spec_pi: LearnerSpec,
    spec_mu: LearnerSpec,
    bounds: Bounds,
    kind: EstimatorKind,
    mu: float,
    seed: int = 0,
) -> Tuple[float, float]:
    """Gaussian-mechanism release of the baseline; returns (tau_dp, noise variance)."""
    budget = PrivacyBudget(mu)
    tau = subsample_aggregate_estimate(data, folds, spec_pi, spec_mu, bounds, kind, seed)
    if not budget.is_private:
        return tau, 0.0
    variance = (subsample_aggregate_sensitivity(kind, bounds, folds) / budget.mu) ** 2
    noisy = add_gaussian_noise(tau, variance, make_rng(seed, STREAM_NOISE, STREAM_BASELINE))
    return float(noisy), variance
