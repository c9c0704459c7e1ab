"""Least-squares linear regression with a tiny ridge term."""

from typing import Optional

import numpy as np

from ..core.exceptions import FitError
from ..core.models import LearnerSpec
from ..core.predictor import Predictor, as_matrix
from ..utils.seeding import SeedLike

RIDGE = 1e-8


def add_intercept(covariates: np.ndarray) -> np.ndarray:
    """Prepend a column of ones."""
    matrix = as_matrix(covariates)
    return np.hstack([np.ones((matrix.shape[0], 1)), matrix])


class LinearPredictor(Predictor):
    """x -> intercept + x @ coef."""

    def __init__(self, intercept: float, coef: np.ndarray):
        self.intercept = float(intercept)
        self.coef = np.asarray(coef, dtype=float)

    def predict(self, covariates: np.ndarray) -> np.ndarray:
        matrix = as_matrix(covariates)
        if matrix.shape[1] != self.coef.shape[0]:
            raise FitError(
                f"predictor fitted on {self.coef.shape[0]} covariates, got {matrix.shape[1]}"
            )
        with np.errstate(over="ignore", invalid="ignore"):
            return self.intercept + matrix @ self.coef

    def __repr__(self) -> str:
        return f"LinearPredictor(intercept={self.intercept!r}, coef={self.coef.tolist()!r})"


def fit_linear(
    covariates: np.ndarray, target: np.ndarray, spec: LearnerSpec, seed: Optional[SeedLike] = None
) -> LinearPredictor:
    """Ridge-stabilised least squares, solved as an augmented least-squares system."""
    design = add_intercept(covariates)
    target = np.asarray(target, dtype=float).reshape(-1)
    if design.shape[0] == 0:
        raise FitError("cannot fit a linear model to zero rows")
    if design.shape[0] != target.shape[0]:
        raise FitError(f"{design.shape[0]} covariate rows but {target.shape[0]} targets")

    p = design.shape[1]
    augmented = np.vstack([design, np.sqrt(RIDGE) * np.eye(p)])
    augmented_target = np.concatenate([target, np.zeros(p)])
    weights, *_ = np.linalg.lstsq(augmented, augmented_target, rcond=None)
    return LinearPredictor(weights[0], weights[1:])
