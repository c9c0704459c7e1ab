"""Counter-based random streams keyed by (run seed, purpose, index...)."""

from typing import Union

import numpy as np

from ..core.exceptions import ConfigError

SeedLike = Union[int, np.random.Generator]

# Stream purposes; each release or fit draws from its own keyed stream.
STREAM_FOLDS = 0
STREAM_LEARNERS = 1
STREAM_NOISE = 2
STREAM_SAMPLING = 3
STREAM_BOOTSTRAP = 4
STREAM_DATA = 5
STREAM_REPLICATION = 6
STREAM_BASELINE = 7

# Release indices inside STREAM_NOISE.
RELEASE_ATE = 0
RELEASE_VARIANCE = 1
RELEASE_INTERVAL_LOWER = 2
RELEASE_INTERVAL_UPPER = 3


def _check_key(value: int) -> int:
    value = int(value)
    if value < 0:
        raise ConfigError(f"seeds must be nonnegative integers, got {value}")
    return value


def make_rng(seed: int, *keys: int) -> np.random.Generator:
    """Philox generator for the stream identified by seed and keys."""
    entropy = [_check_key(seed), *(_check_key(key) for key in keys)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def derive_seed(seed: int, *keys: int) -> int:
    """Independent integer seed for a substream."""
    entropy = [_check_key(seed), *(_check_key(key) for key in keys)]
    return int(np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint32)[0])


def as_rng(seed: SeedLike) -> np.random.Generator:
    """Use a generator as-is, or build one from an integer seed."""
    if isinstance(seed, np.random.Generator):
        return seed
    return make_rng(seed)
