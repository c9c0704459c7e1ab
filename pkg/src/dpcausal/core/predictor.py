"""Base predictor classes for nuisance models."""

from abc import ABC, abstractmethod
from typing import Callable

import numpy as np

from .exceptions import ConfigError


class Predictor(ABC):
    """Base class for fitted nuisance predictors.

    A predictor maps an (m, d) covariate matrix to m real predictions. Fitted
    predictors are immutable and safe to share across workers.
    """

    @abstractmethod
    def predict(self, covariates: np.ndarray) -> np.ndarray:
        """Predict one value per covariate row."""
        pass

    def __call__(self, covariates: np.ndarray) -> np.ndarray:
        return self.predict(covariates)


def as_matrix(covariates: np.ndarray) -> np.ndarray:
    """Coerce covariates to a 2-d float matrix."""
    matrix = np.asarray(covariates, dtype=float)
    if matrix.ndim == 1:
        matrix = matrix.reshape(-1, 1)
    return matrix


class ConstantPredictor(Predictor):
    """Predicts the same value everywhere."""

    def __init__(self, value: float):
        self.value = float(value)

    def predict(self, covariates: np.ndarray) -> np.ndarray:
        return np.full(as_matrix(covariates).shape[0], self.value)

    def __repr__(self) -> str:
        return f"ConstantPredictor({self.value!r})"


class FunctionPredictor(Predictor):
    """Wraps a plain callable, the hook for user-supplied models."""

    def __init__(self, func: Callable[[np.ndarray], np.ndarray]):
        self.func = func

    def predict(self, covariates: np.ndarray) -> np.ndarray:
        return np.asarray(self.func(as_matrix(covariates)), dtype=float).reshape(-1)


class ClippedPredictor(Predictor):
    """Projects another predictor's output onto [lower, upper]."""

    def __init__(self, base: Predictor, lower: float, upper: float):
        if lower > upper:
            raise ConfigError(f"empty clip range [{lower}, {upper}]")
        self.base = base
        self.lower = float(lower)
        self.upper = float(upper)

    def predict(self, covariates: np.ndarray) -> np.ndarray:
        raw = np.asarray(self.base.predict(covariates), dtype=float)
        # NaN from overflowing inputs maps to the range midpoint
        raw = np.where(np.isnan(raw), 0.5 * (self.lower + self.upper), raw)
        return np.clip(raw, self.lower, self.upper)

    def __repr__(self) -> str:
        return f"ClippedPredictor({self.base!r}, {self.lower!r}, {self.upper!r})"
