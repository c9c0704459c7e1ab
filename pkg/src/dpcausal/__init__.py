"""
dpcausal

Differentially private estimation of average treatment effects from
observational data with cross-fold nuisance ensembles and Gaussian
differential privacy accounting.
"""

__version__ = "0.1.0"
__author__ = "dpcausal developers"

from .core.exceptions import (
    ConfigError,
    DataError,
    DPCausalError,
    EstimationError,
    PrivacyContractError,
)
from .core.models import (
    AggregationScheme,
    Bounds,
    CIMethod,
    Dataset,
    EstimationSettings,
    EstimatorKind,
    LearnerSpec,
    PrivacyBudget,
    PrivateEstimate,
    StudyRecord,
)
from .estimation.meta import meta_combine, optimal_weights
from .estimation.pipeline import DPATEPipeline, estimate_ate

__all__ = [
    "AggregationScheme",
    "Bounds",
    "CIMethod",
    "ConfigError",
    "DataError",
    "Dataset",
    "DPATEPipeline",
    "DPCausalError",
    "EstimationError",
    "EstimationSettings",
    "EstimatorKind",
    "LearnerSpec",
    "PrivacyBudget",
    "PrivacyContractError",
    "PrivateEstimate",
    "StudyRecord",
    "estimate_ate",
    "meta_combine",
    "optimal_weights",
]
