"""Seed streams, run configuration and report formatting."""

from .seeding import derive_seed, make_rng

__all__ = ["derive_seed", "make_rng"]
