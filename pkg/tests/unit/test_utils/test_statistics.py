"""
Unit tests for the statistics helpers.
"""

import numpy as np
import pytest

from src.utils.exceptions import ValidationError
from src.utils.statistics import (
    lower_median,
    normal_mean_interval,
    quantiles,
    standard_error,
    wilson_interval,
    z_value,
)


class TestLowerMedian:
    """Unit tests for lower_median."""

    def test_even_sample_takes_lower_middle(self) -> None:
        """Test the lower of the two middle values is returned."""
        assert lower_median([4, 1, 3, 2]) == 2.0

    def test_single_value(self) -> None:
        """Test a one-point sample."""
        assert lower_median([5]) == 5.0

    def test_weighted_half_mass(self) -> None:
        """Test mass exactly 1/2 at the lower value selects it."""
        assert lower_median([0, 1], [0.5, 0.5]) == 0.0
        assert lower_median([0, 1], [0.4, 0.6]) == 1.0

    def test_accepts_generators(self) -> None:
        """Test non-sequence iterables are materialized."""
        assert lower_median(x for x in [3, 1, 2]) == 2.0

    def test_both_half_mass_conditions(self) -> None:
        """Test P(X <= M) >= 1/2 and P(X >= M) >= 1/2."""
        rng = np.random.default_rng(3)
        values = rng.integers(0, 6, size=25)
        weights = rng.random(25)
        weights /= weights.sum()

        m = lower_median(values, weights)

        assert weights[values <= m].sum() >= 0.5 - 1e-12
        assert weights[values >= m].sum() >= 0.5 - 1e-12

    def test_empty_sample_raises(self) -> None:
        """Test the median of nothing is undefined."""
        with pytest.raises(ValidationError):
            lower_median([])

    def test_mismatched_weights_raise(self) -> None:
        """Test weights must align with values."""
        with pytest.raises(ValidationError):
            lower_median([1, 2, 3], [0.5, 0.5])


class TestIntervals:
    """Unit tests for confidence intervals."""

    def test_z_value_95(self) -> None:
        """Test the 95% two-sided normal quantile."""
        assert z_value() == pytest.approx(1.959964, abs=1e-6)

    def test_wilson_contains_estimate(self) -> None:
        """Test the Wilson interval contains the point estimate."""
        low, high = wilson_interval(7, 20)

        assert low <= 7 / 20 <= high

    def test_wilson_zero_successes(self) -> None:
        """Test the interval starts at 0 with no successes."""
        low, high = wilson_interval(0, 50)

        assert low == 0.0
        assert 0.0 < high < 0.1

    @pytest.mark.parametrize("total", [1, 50, 1000, 10_000])
    def test_wilson_edges_are_exact(self, total: int) -> None:
        """Test 0 and total successes give bounds exactly at 0 and 1."""
        assert wilson_interval(0, total)[0] == 0.0
        assert wilson_interval(total, total)[1] == 1.0

    def test_wilson_always_contains_estimate(self) -> None:
        """Test every count lies inside its own interval."""
        for successes in range(0, 201):
            low, high = wilson_interval(successes, 200)
            assert low <= successes / 200 <= high

    def test_wilson_without_trials(self) -> None:
        """Test the uninformative interval when total is 0."""
        assert wilson_interval(0, 0) == (0.0, 1.0)

    def test_wilson_shrinks_with_more_trials(self) -> None:
        """Test the width at 4x trials does not exceed the width at 1x."""
        low1, high1 = wilson_interval(5, 10)
        low4, high4 = wilson_interval(20, 40)

        assert high4 - low4 <= high1 - low1

    def test_normal_interval_constant_sample(self) -> None:
        """Test a constant sample collapses the interval."""
        assert normal_mean_interval([2, 2, 2]) == (2.0, 2.0, 2.0)

    def test_normal_interval_brackets_mean(self) -> None:
        """Test low < mean < high for a spread sample."""
        mean, low, high = normal_mean_interval([1, 2, 3])

        assert mean == 2.0
        assert low < mean < high

    def test_standard_error(self) -> None:
        """Test the standard error of the mean."""
        assert standard_error([1]) == 0.0
        assert standard_error([1, 3]) == pytest.approx(1.0)


class TestQuantiles:
    """Unit tests for quantiles."""

    def test_lower_rule_returns_sample_values(self) -> None:
        """Test quantiles are sample values under the lower rule."""
        assert quantiles([1, 2, 3, 4], [0.5, 1.0]) == (2.0, 4.0)

    def test_empty_raises(self) -> None:
        """Test quantiles of nothing are undefined."""
        with pytest.raises(ValidationError):
            quantiles([], [0.5])
