"""Synthetic generators, baseline estimator and replication harness."""

from .generators import (
    gen_effect_of_k,
    gen_good_overlap_binary,
    gen_low_overlap,
    gen_misspecified,
    get_generator,
)
from .harness import run_replications, run_sweep

__all__ = [
    "gen_effect_of_k",
    "gen_good_overlap_binary",
    "gen_low_overlap",
    "gen_misspecified",
    "get_generator",
    "run_replications",
    "run_sweep",
]
