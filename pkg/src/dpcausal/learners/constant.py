"""Constant learner: predicts the training mean."""

from typing import Optional

import numpy as np

from ..core.exceptions import FitError
from ..core.models import LearnerSpec
from ..core.predictor import ConstantPredictor
from ..utils.seeding import SeedLike


def fit_constant(
    covariates: np.ndarray, target: np.ndarray, spec: LearnerSpec, seed: Optional[SeedLike] = None
) -> ConstantPredictor:
    """Fit the empirical mean of the target."""
    target = np.asarray(target, dtype=float)
    if target.size == 0:
        raise FitError("cannot fit a constant to zero rows")
    return ConstantPredictor(float(np.mean(target)))
