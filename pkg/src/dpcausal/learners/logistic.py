"""Logistic regression by damped Newton iterations (IRLS)."""

import logging
from typing import List, Optional

import numpy as np
from scipy.special import expit

from ..core.exceptions import FitError
from ..core.models import LearnerSpec
from ..core.predictor import ConstantPredictor, Predictor, as_matrix
from ..utils.seeding import SeedLike
from .linear import add_intercept

logger = logging.getLogger(__name__)

HESSIAN_RIDGE = 1e-8
MIN_STEP = 2.0**-30


class LogisticPredictor(Predictor):
    """x -> expit(intercept + x @ coef)."""

    def __init__(
        self, intercept: float, coef: np.ndarray, loss_history: Optional[List[float]] = None
    ):
        self.intercept = float(intercept)
        self.coef = np.asarray(coef, dtype=float)
        self.loss_history = list(loss_history or [])

    def predict(self, covariates: np.ndarray) -> np.ndarray:
        matrix = as_matrix(covariates)
        if matrix.shape[1] != self.coef.shape[0]:
            raise FitError(
                f"predictor fitted on {self.coef.shape[0]} covariates, got {matrix.shape[1]}"
            )
        with np.errstate(over="ignore", invalid="ignore"):
            return expit(self.intercept + matrix @ self.coef)

    def __repr__(self) -> str:
        return f"LogisticPredictor(intercept={self.intercept!r}, coef={self.coef.tolist()!r})"


def _loss(design: np.ndarray, labels: np.ndarray, weights: np.ndarray) -> float:
    logits = design @ weights
    return float(np.mean(np.logaddexp(0.0, logits) - labels * logits))


def fit_logistic(
    covariates: np.ndarray, labels: np.ndarray, spec: LearnerSpec, seed: Optional[SeedLike] = None
) -> Predictor:
    """Maximum likelihood logistic fit.

    Each Newton direction is followed by step halving until the mean log-loss does
    not increase, so the recorded loss history is non-increasing. Iteration stops
    when the gradient norm drops below ``spec.tolerance`` or after ``spec.max_iter``
    steps. A single-class target yields a constant predictor at the empirical rate.
    """
    design = add_intercept(covariates)
    labels = np.asarray(labels, dtype=float).reshape(-1)
    m = design.shape[0]
    if m == 0:
        raise FitError("cannot fit a logistic model to zero rows")
    if m != labels.shape[0]:
        raise FitError(f"{m} covariate rows but {labels.shape[0]} labels")

    rate = float(np.mean(labels))
    if rate in (0.0, 1.0):
        return ConstantPredictor(rate)

    weights = np.zeros(design.shape[1])
    loss = _loss(design, labels, weights)
    history = [loss]
    ridge = HESSIAN_RIDGE * np.eye(design.shape[1])

    for iteration in range(spec.max_iter):
        probs = expit(design @ weights)
        gradient = design.T @ (probs - labels) / m
        if np.linalg.norm(gradient) < spec.tolerance:
            break
        hessian = (design.T * (probs * (1.0 - probs))) @ design / m + ridge
        direction = np.linalg.solve(hessian, gradient)

        step = 1.0
        while step >= MIN_STEP:
            candidate = weights - step * direction
            candidate_loss = _loss(design, labels, candidate)
            if candidate_loss <= loss:
                break
            step /= 2.0
        else:
            logger.debug("line search stalled at iteration %d, loss %.6g", iteration, loss)
            break

        weights, loss = candidate, candidate_loss
        history.append(loss)

    return LogisticPredictor(weights[0], weights[1:], history)
