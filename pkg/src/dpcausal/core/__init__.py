"""Core data model, dataset handling and privacy accounting."""

from .exceptions import (
    ConfigError,
    DataError,
    DatasetValidationError,
    DPCausalError,
    EstimationError,
    FitError,
    InvalidFoldCountError,
    NonPrivateModeError,
    PrivacyContractError,
)
from .models import Bounds, Dataset, FoldAssignment, PrivacyBudget
from .predictor import Predictor

__all__ = [
    "Bounds",
    "ConfigError",
    "DataError",
    "Dataset",
    "DatasetValidationError",
    "DPCausalError",
    "EstimationError",
    "FitError",
    "FoldAssignment",
    "InvalidFoldCountError",
    "NonPrivateModeError",
    "PrivacyBudget",
    "PrivacyContractError",
    "Predictor",
]
