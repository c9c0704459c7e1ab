"""Tests for keyed random streams."""

import numpy as np
import pytest

from dpcausal.core.exceptions import ConfigError
from dpcausal.utils.seeding import (
    RELEASE_ATE,
    RELEASE_VARIANCE,
    STREAM_NOISE,
    as_rng,
    derive_seed,
    make_rng,
)


class TestSeeding:
    """Test seed streams."""

    def test_same_key_same_stream(self) -> None:
        a = make_rng(5, STREAM_NOISE, RELEASE_ATE).normal(size=4)
        b = make_rng(5, STREAM_NOISE, RELEASE_ATE).normal(size=4)
        np.testing.assert_array_equal(a, b)

    def test_release_streams_differ(self) -> None:
        a = make_rng(5, STREAM_NOISE, RELEASE_ATE).normal(size=4)
        b = make_rng(5, STREAM_NOISE, RELEASE_VARIANCE).normal(size=4)
        assert not np.array_equal(a, b)

    def test_derive_seed(self) -> None:
        assert derive_seed(1, 2, 3) == derive_seed(1, 2, 3)
        assert derive_seed(1, 2, 3) != derive_seed(1, 3, 2)

    def test_negative_seed(self) -> None:
        with pytest.raises(ConfigError):
            make_rng(-1)

    def test_as_rng_passthrough(self) -> None:
        rng = np.random.default_rng(0)
        assert as_rng(rng) is rng
        assert isinstance(as_rng(3), np.random.Generator)
