"""Built-in nuisance learners and the learner registry."""

from typing import Callable, Dict, List, Optional

import numpy as np

from ..core.exceptions import ConfigError
from ..core.models import LearnerSpec
from ..core.predictor import Predictor
from ..utils.seeding import SeedLike
from .constant import fit_constant
from .linear import LinearPredictor, fit_linear
from .logistic import LogisticPredictor, fit_logistic
from .tree import ForestPredictor, TreePredictor, fit_forest, fit_tree

FitFunction = Callable[[np.ndarray, np.ndarray, LearnerSpec, Optional[SeedLike]], Predictor]

_REGISTRY: Dict[str, FitFunction] = {
    "constant": fit_constant,
    "linear": fit_linear,
    "logistic": fit_logistic,
    "tree": fit_tree,
    "forest": fit_forest,
}


def register_learner(name: str, fit: FitFunction) -> None:
    """Make a user learner available under ``name`` in LearnerSpec.kind."""
    if not name:
        raise ConfigError("learner name must be non-empty")
    _REGISTRY[name] = fit


def available_learners() -> List[str]:
    return sorted(_REGISTRY)


def fit_learner(
    spec: LearnerSpec,
    covariates: np.ndarray,
    target: np.ndarray,
    seed: Optional[SeedLike] = None,
) -> Predictor:
    """Dispatch to the learner named by ``spec.kind``."""
    try:
        fit = _REGISTRY[spec.kind]
    except KeyError:
        raise ConfigError(
            f"unknown learner '{spec.kind}'; available: {', '.join(available_learners())}"
        ) from None
    return fit(covariates, target, spec, seed)


__all__ = [
    "ForestPredictor",
    "LinearPredictor",
    "LogisticPredictor",
    "TreePredictor",
    "available_learners",
    "fit_constant",
    "fit_forest",
    "fit_learner",
    "fit_linear",
    "fit_logistic",
    "fit_tree",
    "register_learner",
]
