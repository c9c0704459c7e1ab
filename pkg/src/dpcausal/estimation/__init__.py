"""Nuisance ensembles, aggregation, private estimators and intervals."""

from .aggregate import build_aggregated
from .estimators import asymptotic_ci, compute_scores, private_ate, private_variance
from .intervals import bootstrap_bounds, pointwise_variance_bounds, private_interval
from .meta import meta_combine, optimal_weights
from .nuisance import fit_ensemble, fit_triple
from .pipeline import DPATEPipeline, estimate_ate

__all__ = [
    "DPATEPipeline",
    "asymptotic_ci",
    "bootstrap_bounds",
    "build_aggregated",
    "compute_scores",
    "estimate_ate",
    "fit_ensemble",
    "fit_triple",
    "meta_combine",
    "optimal_weights",
    "pointwise_variance_bounds",
    "private_ate",
    "private_interval",
    "private_variance",
]
