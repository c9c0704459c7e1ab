"""Per-fold nuisance fitting and the n x K prediction matrix."""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from ..core.exceptions import DataError, EstimationError
from ..core.models import (
    Bounds,
    Dataset,
    FoldAssignment,
    LearnerSpec,
    NuisanceMatrix,
    NuisanceTriple,
)
from ..core.predictor import ClippedPredictor, ConstantPredictor, Predictor
from ..learners import fit_learner
from ..utils.seeding import STREAM_LEARNERS, derive_seed, make_rng

logger = logging.getLogger(__name__)

_ARM_NAMES = {0: "control", 1: "treated"}


def _fit_outcome(
    data: Dataset, arm: int, spec: LearnerSpec, bounds: Bounds, seed: int
) -> Tuple[Predictor, Optional[str]]:
    rows = np.nonzero(data.treatment == arm)[0]
    if rows.size == 0:
        message = f"fold has no {_ARM_NAMES[arm]} records; outcome{arm} falls back to constant 0"
        logger.warning(message)
        return ClippedPredictor(ConstantPredictor(0.0), -bounds.b_mu, bounds.b_mu), message
    fitted = fit_learner(spec, data.covariates[rows], data.outcome[rows], make_rng(seed, 1 + arm))
    return ClippedPredictor(fitted, -bounds.b_mu, bounds.b_mu), None


def fit_outcome_models(
    fold_data: Dataset, spec_mu: LearnerSpec, bounds: Bounds, seed: int
) -> Tuple[Predictor, Predictor, Tuple[str, ...]]:
    """Clipped arm-wise outcome models (control, treated) plus fallback warnings."""
    outcome0, warning0 = _fit_outcome(fold_data, 0, spec_mu, bounds, seed)
    outcome1, warning1 = _fit_outcome(fold_data, 1, spec_mu, bounds, seed)
    return outcome0, outcome1, tuple(w for w in (warning0, warning1) if w)


def fit_triple(
    fold_data: Dataset,
    spec_pi: LearnerSpec,
    spec_mu: LearnerSpec,
    bounds: Bounds,
    seed: int,
) -> NuisanceTriple:
    """Fit propensity (X -> A) and arm-wise outcome (X -> Y | A=a) models on one fold.

    Propensity outputs are clipped to [1/B_pi, 1 - 1/B_pi] and outcome outputs to
    [-B_mu, B_mu]. An arm with no records gets the constant 0 outcome model and a
    warning on the returned triple.
    """
    if fold_data.n == 0:
        raise DataError("cannot fit nuisances on an empty fold")

    lower, upper = bounds.propensity_range
    propensity = ClippedPredictor(
        fit_learner(spec_pi, fold_data.covariates, fold_data.treatment, make_rng(seed, 0)),
        lower,
        upper,
    )
    outcome0, outcome1, warnings = fit_outcome_models(fold_data, spec_mu, bounds, seed)
    return NuisanceTriple(propensity, outcome0, outcome1, warnings)


@dataclass(frozen=True, eq=False)
class NuisanceEnsemble:
    """The K fitted triples together with the fold assignment they came from."""

    triples: Tuple[NuisanceTriple, ...]
    folds: FoldAssignment

    @property
    def k(self) -> int:
        return len(self.triples)

    @property
    def warnings(self) -> List[str]:
        return [f"fold {k}: {w}" for k, triple in enumerate(self.triples) for w in triple.warnings]

    def predict_matrix(self, covariates: np.ndarray) -> NuisanceMatrix:
        return predict_matrix(self.triples, covariates)


def predict_matrix(triples: Sequence[NuisanceTriple], covariates: np.ndarray) -> NuisanceMatrix:
    """Evaluate every fold model at every row: column k holds model k only."""
    if not triples:
        raise EstimationError("no fitted nuisance models")
    return NuisanceMatrix(
        pi_pred=np.column_stack([t.propensity.predict(covariates) for t in triples]),
        mu0_pred=np.column_stack([t.outcome0.predict(covariates) for t in triples]),
        mu1_pred=np.column_stack([t.outcome1.predict(covariates) for t in triples]),
    )


def fit_ensemble(
    dataset: Dataset,
    folds: FoldAssignment,
    spec_pi: LearnerSpec,
    spec_mu: LearnerSpec,
    bounds: Bounds,
    seed: int,
    n_jobs: int = 1,
) -> NuisanceEnsemble:
    """Fit one nuisance triple per fold; the K fits run in parallel."""
    if folds.n != dataset.n:
        raise EstimationError(f"fold assignment covers {folds.n} rows, dataset has {dataset.n}")

    logger.debug("fitting %d nuisance triples (n_jobs=%d)", folds.k, n_jobs)
    triples = Parallel(n_jobs=n_jobs, backend="threading")(
        delayed(fit_triple)(
            dataset.subset(members),
            spec_pi,
            spec_mu,
            bounds,
            derive_seed(seed, STREAM_LEARNERS, k),
        )
        for k, members in enumerate(folds.members)
    )
    return NuisanceEnsemble(tuple(triples), folds)
