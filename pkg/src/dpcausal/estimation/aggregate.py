"""Leave-own-fold-out aggregation of cross-fold nuisance predictions.

Record i in fold k(i) never uses model k(i). Outcomes are averaged arithmetically
over the K-1 foreign models; propensities use the harmonic mean, which bounds the
inverse propensity that the scores actually consume. The sampling scheme instead
reads a single foreign model drawn once per record.
"""

import csv
import logging
from pathlib import Path
from typing import Optional, Union

import numpy as np

from ..core.exceptions import ConfigError, DataError, EstimationError
from ..core.models import (
    AggregatedNuisance,
    AggregationScheme,
    Arm,
    FoldAssignment,
    NuisanceMatrix,
)
from ..utils.seeding import STREAM_SAMPLING, make_rng

logger = logging.getLogger(__name__)


def _own_mask(fold_of: np.ndarray, k: int) -> np.ndarray:
    return np.arange(k)[None, :] == np.asarray(fold_of, dtype=int)[:, None]


def _check_matrix(preds: np.ndarray, fold_of: np.ndarray) -> None:
    if preds.ndim != 2 or preds.shape[0] != fold_of.shape[0]:
        raise EstimationError(
            f"prediction matrix shape {preds.shape} does not match {fold_of.shape[0]} records"
        )
    k = preds.shape[1]
    if k < 2:
        raise EstimationError(f"aggregation needs at least 2 folds, got {k}")
    if fold_of.size and (fold_of.min() < 0 or fold_of.max() >= k):
        raise EstimationError(f"own-fold index outside 0..{k - 1}")


def leave_out_mean(preds: np.ndarray, fold_of: np.ndarray) -> np.ndarray:
    """Row-wise arithmetic mean over the columns other than fold_of[i]."""
    preds = np.asarray(preds, dtype=float)
    fold_of = np.asarray(fold_of, dtype=int)
    _check_matrix(preds, fold_of)
    masked = np.where(_own_mask(fold_of, preds.shape[1]), 0.0, preds)
    return masked.sum(axis=1) / (preds.shape[1] - 1)


def leave_out_harmonic(preds: np.ndarray, fold_of: np.ndarray) -> np.ndarray:
    """Row-wise harmonic mean over the columns other than fold_of[i]."""
    preds = np.asarray(preds, dtype=float)
    fold_of = np.asarray(fold_of, dtype=int)
    _check_matrix(preds, fold_of)
    mask = _own_mask(fold_of, preds.shape[1])
    inverses = np.divide(1.0, preds, out=np.zeros_like(preds), where=~mask)
    return (preds.shape[1] - 1) / inverses.sum(axis=1)


def _check_probabilities(preds: np.ndarray) -> None:
    if np.any(~np.isfinite(preds)) or np.any(preds <= 0) or np.any(preds >= 1):
        raise EstimationError("propensity predictions must lie strictly inside (0, 1); clip first")


def aggregate_outcome_mean(preds: np.ndarray, own_fold: int) -> float:
    """Mean of the K-1 entries other than ``own_fold``."""
    row = np.asarray(preds, dtype=float).reshape(1, -1)
    return float(leave_out_mean(row, np.array([own_fold]))[0])


def aggregate_propensity_harmonic(preds: np.ndarray, own_fold: int, arm: Arm) -> float:
    """Harmonic mean of pi (treated) or of 1 - pi (control) over k != own_fold.

    The control value is returned as 1 - pi_0, the quantity the scores divide by.
    """
    row = np.asarray(preds, dtype=float).reshape(1, -1)
    _check_probabilities(row)
    if arm is Arm.CONTROL:
        row = 1.0 - row
    return float(leave_out_harmonic(row, np.array([own_fold]))[0])


def draw_sampling_map(fold_of: np.ndarray, k: int, seed: int) -> np.ndarray:
    """For every record, a fold drawn uniformly from the K-1 folds other than its own."""
    fold_of = np.asarray(fold_of, dtype=int)
    if k < 2:
        raise EstimationError(f"sampling aggregation needs at least 2 folds, got {k}")
    draws = make_rng(seed, STREAM_SAMPLING).integers(0, k - 1, size=fold_of.shape[0])
    sampling_map = draws + (draws >= fold_of)
    sampling_map.setflags(write=False)
    return sampling_map


def aggregate_sampling(preds: np.ndarray, own_fold: int, seed: int) -> float:
    """Prediction of one foreign fold drawn uniformly, deterministic given the seed."""
    row = np.asarray(preds, dtype=float).reshape(-1)
    _check_matrix(row.reshape(1, -1), np.array([own_fold]))
    chosen = draw_sampling_map(np.array([own_fold]), row.shape[0], seed)[0]
    return float(row[chosen])


def build_aggregated(
    matrix: NuisanceMatrix,
    folds: FoldAssignment,
    scheme: AggregationScheme = AggregationScheme.COMPLETE_MEANS,
    seed: Optional[int] = None,
    sampling_map: Optional[np.ndarray] = None,
) -> AggregatedNuisance:
    """Aggregate the n x K prediction matrix into per-record nuisance values.

    The sampling scheme uses ``sampling_map`` when given, otherwise draws one from
    ``seed``; the map is kept on the result so that sensitivity accounting sees the
    realised fold loads.
    """
    if matrix.n != folds.n or matrix.k != folds.k:
        raise EstimationError(
            f"matrix is {matrix.n} x {matrix.k} but folds cover {folds.n} rows in {folds.k} folds"
        )
    _check_probabilities(matrix.pi_pred)
    fold_of = folds.fold_of

    if scheme is AggregationScheme.COMPLETE_MEANS:
        return AggregatedNuisance(
            pi1=leave_out_harmonic(matrix.pi_pred, fold_of),
            one_minus_pi0=leave_out_harmonic(1.0 - matrix.pi_pred, fold_of),
            mu0=leave_out_mean(matrix.mu0_pred, fold_of),
            mu1=leave_out_mean(matrix.mu1_pred, fold_of),
            scheme=scheme,
        )

    if sampling_map is None:
        if seed is None:
            raise ConfigError("the sampling aggregator needs a seed or a sampling map")
        sampling_map = draw_sampling_map(fold_of, folds.k, seed)
    sampling_map = np.asarray(sampling_map, dtype=int)
    if sampling_map.shape != fold_of.shape or np.any(sampling_map == fold_of):
        raise EstimationError("sampling map must pick a foreign fold for every record")

    rows = np.arange(folds.n)
    picked_pi = matrix.pi_pred[rows, sampling_map]
    return AggregatedNuisance(
        pi1=picked_pi,
        one_minus_pi0=1.0 - picked_pi,
        mu0=matrix.mu0_pred[rows, sampling_map],
        mu1=matrix.mu1_pred[rows, sampling_map],
        scheme=scheme,
        sampling_map=sampling_map,
    )


def write_matrix_csv(
    matrix: NuisanceMatrix, folds: FoldAssignment, path: Union[str, Path]
) -> None:
    """Audit dump: one row per record with its fold and all K predictions of each nuisance."""
    header = ["row", "fold"]
    for name in ("pi", "mu0", "mu1"):
        header += [f"{name}_{k}" for k in range(matrix.k)]
    try:
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            for i in range(matrix.n):
                values = np.concatenate([matrix.pi_pred[i], matrix.mu0_pred[i], matrix.mu1_pred[i]])
                writer.writerow([i, int(folds.fold_of[i])] + [repr(float(v)) for v in values])
    except OSError as e:
        raise DataError(f"Error writing {path}: {e}") from e
    logger.debug("wrote %d x %d nuisance matrix to %s", matrix.n, matrix.k, path)
