"""
Statistical helpers shared by the exact cube computations and the
Monte Carlo summaries.
"""

from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import norm

from src.utils.exceptions import ValidationError

CONFIDENCE_LEVEL = 0.95
_HALF_MASS_TOLERANCE = 1e-12


def z_value(level: float = CONFIDENCE_LEVEL) -> float:
    """Two-sided standard normal quantile for a confidence level."""
    return float(norm.ppf(0.5 + level / 2.0))


def lower_median(values: Iterable[float], weights: Optional[Iterable[float]] = None) -> float:
    """
    Lower median inf{a : P(X <= a) >= 1/2} of a discrete distribution.

    With no weights every value carries equal mass (empirical median).
    Both P(X <= M) >= 1/2 and P(X >= M) >= 1/2 hold for the result.
    """
    x = np.asarray(values if isinstance(values, (np.ndarray, list, tuple)) else list(values), dtype=float)
    if x.size == 0:
        raise ValidationError("Median of an empty sample is undefined", "values", [])
    if weights is None:
        w = np.full(x.size, 1.0 / x.size)
    else:
        w = np.asarray(weights if isinstance(weights, (np.ndarray, list, tuple)) else list(weights), dtype=float)
        if w.shape != x.shape:
            raise ValidationError("weights must match values", "weights", w.shape)

    order = np.argsort(x, kind="stable")
    cumulative = np.cumsum(w[order])
    total = cumulative[-1]
    index = int(np.searchsorted(cumulative, 0.5 * total - _HALF_MASS_TOLERANCE, side="left"))
    return float(x[order][min(index, x.size - 1)])


def wilson_interval(successes: int, total: int, level: float = CONFIDENCE_LEVEL) -> Tuple[float, float]:
    """Wilson score interval for a Bernoulli proportion."""
    if total <= 0:
        return (0.0, 1.0)
    z = z_value(level)
    p = successes / total
    z2 = z * z
    denom = 1.0 + z2 / total
    center = (p + z2 / (2.0 * total)) / denom
    margin = (z * np.sqrt(p * (1.0 - p) / total + z2 / (4.0 * total * total))) / denom
    # rounding can push a bound past p at 0 or total successes
    low = 0.0 if successes == 0 else min(p, max(0.0, float(center - margin)))
    high = 1.0 if successes == total else max(p, min(1.0, float(center + margin)))
    return (low, high)


def normal_mean_interval(values: Sequence[float], level: float = CONFIDENCE_LEVEL) -> Tuple[float, float, float]:
    """
    Sample mean with its normal-approximation confidence interval.

    Returns:
        (mean, low, high); the interval collapses to the mean for n = 1
    """
    x = np.asarray(values, dtype=float)
    if x.size == 0:
        raise ValidationError("Mean of an empty sample is undefined", "values", [])
    mean = float(x.mean())
    if x.size == 1:
        return (mean, mean, mean)
    half = z_value(level) * float(x.std(ddof=1)) / np.sqrt(x.size)
    return (mean, mean - half, mean + half)


def standard_error(values: Sequence[float]) -> float:
    """Standard error of the sample mean (0 for a single value)."""
    x = np.asarray(values, dtype=float)
    if x.size < 2:
        return 0.0
    return float(x.std(ddof=1) / np.sqrt(x.size))


def quantiles(values: Sequence[float], probs: Sequence[float]) -> Tuple[float, ...]:
    """Empirical quantiles with the 'lower' rule so results are sample values."""
    x = np.asarray(values, dtype=float)
    if x.size == 0:
        raise ValidationError("Quantiles of an empty sample are undefined", "values", [])
    return tuple(float(q) for q in np.quantile(x, probs, method="lower"))
