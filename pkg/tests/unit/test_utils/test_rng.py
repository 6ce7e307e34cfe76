"""
Unit tests for the counter-based random streams.
"""

import numpy as np
import pytest

from src.utils.exceptions import ValidationError
from src.utils.rng import EDGE_STREAM, PARTITION_STREAM, derive_seed, philox_stream, uniform_draws


class TestUniformDraws:
    """Unit tests for uniform_draws."""

    def test_same_seed_same_draws(self) -> None:
        """Test draws are a pure function of the seed."""
        assert np.array_equal(uniform_draws(42, 100), uniform_draws(42, 100))

    def test_prefix_stability(self) -> None:
        """Test draw i does not depend on how many draws are requested."""
        assert np.array_equal(uniform_draws(9, 50)[:10], uniform_draws(9, 10))

    def test_streams_are_separate(self) -> None:
        """Test different stream ids give different draws."""
        assert not np.array_equal(
            uniform_draws(1, 20, EDGE_STREAM), uniform_draws(1, 20, PARTITION_STREAM)
        )

    def test_draws_in_unit_interval(self) -> None:
        """Test every draw lies in [0, 1)."""
        draws = uniform_draws(123, 1000)

        assert draws.min() >= 0.0
        assert draws.max() < 1.0

    def test_generator_type(self) -> None:
        """Test philox_stream returns a numpy Generator."""
        assert isinstance(philox_stream(0), np.random.Generator)


class TestDeriveSeed:
    """Unit tests for derive_seed."""

    def test_deterministic(self) -> None:
        """Test the child seed depends only on (master, index)."""
        assert derive_seed(5, 3) == derive_seed(5, 3)

    def test_indices_differ(self) -> None:
        """Test neighbouring indices give distinct seeds."""
        seeds = {derive_seed(5, i) for i in range(100)}

        assert len(seeds) == 100

    def test_range(self) -> None:
        """Test child seeds are 64-bit unsigned values."""
        seed = derive_seed(2**64 - 1, 0)

        assert 0 <= seed < 2**64

    @pytest.mark.parametrize("bad", [-1, 2**64, True, 1.5])
    def test_invalid_seed(self, bad: object) -> None:
        """Test seeds outside the 64-bit range are rejected."""
        with pytest.raises(ValidationError):
            uniform_draws(bad, 1)  # type: ignore[arg-type]
