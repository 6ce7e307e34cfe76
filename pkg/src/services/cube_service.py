"""
Cube core service.

Evaluation, discrete derivatives and local Lipschitz norms of monotone
multilinear functions, plus exact expectations, tails and medians under
a product measure by full enumeration.
"""

from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple, Union
import logging

import numpy as np

from src.models.cube import CubePoint, FunctionTable, MultilinearFunction, ProductMeasure
from src.utils.config import LabConfig
from src.utils.exceptions import DimensionError, EnumerationLimitError, MonotonicityError, ValidationError
from src.utils.rng import INSTANCE_STREAM, philox_stream
from src.utils.statistics import lower_median

FunctionLike = Union[MultilinearFunction, FunctionTable]

_INT64_SAFE = 1 << 62


@dataclass(frozen=True)
class MonotonicityReport:
    """Either ok, or the first (x, i, quantity) where monotonicity fails."""

    ok: bool
    x: Optional[CubePoint] = None
    i: Optional[int] = None
    quantity: Optional[str] = None


@dataclass(frozen=True, eq=False)
class LocalLinearization:
    """
    L(z) = Z(x) + sum_i V_i(x) (z_i - x_i), the local linear map at x.

    Its gradient norm is the local Lipschitz norm sqrt(V(x)).
    """

    x: CubePoint
    value: Any
    gradient: Tuple[Any, ...]

    @property
    def norm(self) -> float:
        return float(np.sqrt(float(sum(g * g for g in self.gradient))))

    def __call__(self, z: CubePoint) -> Any:
        if z.m != self.x.m:
            raise DimensionError("Point dimension does not match", self.x.m, z.m)
        return self.value + sum(g * (zi - xi) for g, zi, xi in zip(self.gradient, z.bits, self.x.bits))


class CubeService:
    """
    Operations on functions over {0,1}^m.
    """

    def __init__(self, config: Optional[LabConfig] = None, logger: Optional[logging.Logger] = None) -> None:
        self.config = config or LabConfig()
        self.logger = logger or logging.getLogger(__name__)

    # ------------------------------------------------------------------
    # pointwise operations

    @staticmethod
    def _check_point(f: MultilinearFunction, x: CubePoint) -> None:
        if x.m != f.m:
            raise DimensionError(f"Point has dimension {x.m}, function has {f.m}", f.m, x.m)

    def evaluate(self, f: MultilinearFunction, x: CubePoint) -> Any:
        """Z(x) = sum of alpha_C over monomials C contained in the support of x."""
        self._check_point(f, x)
        support = x.index
        return sum((w for mask, w in f.coefficients.items() if mask & support == mask), 0)

    def discrete_derivative(self, f: MultilinearFunction, x: CubePoint, i: int) -> Any:
        """V_i(x) = Z(x) - Z(x with x_i = 0); zero when x_i = 0."""
        self._check_point(f, x)
        if not 1 <= i <= f.m:
            raise DimensionError(f"Coordinate {i} out of range 1..{f.m}", f.m, i)
        bit = 1 << (i - 1)
        support = x.index
        if not support & bit:
            return 0
        # monomials containing i and otherwise inside the support
        return sum(
            (w for mask, w in f.coefficients.items() if mask & bit and mask & support == mask),
            0,
        )

    def gradient(self, f: MultilinearFunction, x: CubePoint) -> Tuple[Any, ...]:
        return tuple(self.discrete_derivative(f, x, i) for i in range(1, f.m + 1))

    def local_variance(self, f: MultilinearFunction, x: CubePoint) -> Any:
        """V(x) = sum_i V_i(x)^2."""
        return sum((g * g for g in self.gradient(f, x)), 0)

    def linearization(self, f: MultilinearFunction, x: CubePoint) -> LocalLinearization:
        return LocalLinearization(x=x, value=self.evaluate(f, x), gradient=self.gradient(f, x))

    # ------------------------------------------------------------------
    # whole-cube tables

    def _guard(self, m: int, limit: Optional[int] = None) -> None:
        limit = self.config.max_enumeration_m if limit is None else limit
        if m > limit:
            raise EnumerationLimitError(
                f"Full enumeration of the {m}-cube exceeds the limit m <= {limit}", limit, m
            )

    @staticmethod
    def _table_dtype(f: MultilinearFunction) -> Any:
        if not f.is_integral:
            return np.float64
        return np.int64 if f.total_weight < _INT64_SAFE else object

    def function_table(self, f: FunctionLike) -> FunctionTable:
        """
        Materialize Z on every vertex via the subset-sum (zeta) transform.

        Integer coefficients give an exact integer table.
        """
        if isinstance(f, FunctionTable):
            return f
        self._guard(f.m)
        table = np.zeros(1 << f.m, dtype=self._table_dtype(f))
        for mask, weight in f.coefficients.items():
            table[mask] = weight
        for i in range(f.m):
            view = table.reshape(-1, 2, 1 << i)
            view[:, 1, :] += view[:, 0, :]
        return FunctionTable(f.m, table)

    def derivative_tables(self, f: FunctionLike) -> np.ndarray:
        """
        Array D with D[i - 1, v] = Z(v) - Z(v with coordinate i zeroed).

        Rows vanish on vertices with x_i = 0.
        """
        table = self.function_table(f)
        m = table.m
        values = table.values
        vertices = np.arange(1 << m)
        rows = np.zeros((m, 1 << m), dtype=values.dtype)
        for i in range(m):
            bit = 1 << i
            rows[i] = values - values[vertices & ~bit]
        return rows

    def variance_table(self, f: FunctionLike) -> np.ndarray:
        """V(x) for every vertex."""
        derivatives = self.derivative_tables(f)
        if derivatives.dtype == np.int64:
            peak = int(np.abs(derivatives).max()) if derivatives.size else 0
            if peak * peak * max(derivatives.shape[0], 1) >= _INT64_SAFE:
                derivatives = derivatives.astype(object)
        return (derivatives * derivatives).sum(axis=0)

    def flip_variance_table(self, f: FunctionLike) -> np.ndarray:
        """sum_i (f(x) - f(x^i))^2 over all m flips, for every vertex."""
        table = self.function_table(f)
        values = table.values.astype(float)
        vertices = np.arange(1 << table.m)
        total = np.zeros(1 << table.m)
        for i in range(table.m):
            diff = values - values[vertices ^ (1 << i)]
            total += diff * diff
        return total

    def check_monotone(self, f: FunctionLike) -> MonotonicityReport:
        """
        Confirm Z and every V_i are non-decreasing in each coordinate.

        Returns the first counterexample in (quantity, vertex, coordinate)
        scan order otherwise.
        """
        table = self.function_table(f)
        m = table.m
        vertices = np.arange(1 << m)
        derivatives = self.derivative_tables(table)
        quantities = [("Z", table.values)] + [(f"V_{j + 1}", derivatives[j]) for j in range(m)]
        for name, values in quantities:
            for i in range(m):
                bit = 1 << i
                low = vertices[(vertices & bit) == 0]
                bad = np.flatnonzero(values[low | bit] < values[low])
                if bad.size:
                    x = CubePoint.from_index(int(low[bad[0]]), m)
                    self.logger.info(
                        "Monotonicity violated",
                        extra={"quantity": name, "vertex": str(x), "coordinate": i + 1},
                    )
                    return MonotonicityReport(ok=False, x=x, i=i + 1, quantity=name)
        return MonotonicityReport(ok=True)

    def require_monotone(self, f: FunctionLike) -> None:
        report = self.check_monotone(f)
        if not report.ok:
            raise MonotonicityError(
                f"{report.quantity} decreases along coordinate {report.i} at x={report.x}",
                witness={"x": str(report.x), "i": report.i, "quantity": report.quantity},
            )

    def global_discrete_norm(self, f: FunctionLike) -> float:
        """||f||_d = sup_x (sum_i (f(x) - f(x^i))^2)^{1/2}."""
        totals = self.flip_variance_table(f)
        return float(np.sqrt(totals.max())) if totals.size else 0.0

    # ------------------------------------------------------------------
    # product-measure quantities

    def _weights(self, m: int, measure: ProductMeasure) -> np.ndarray:
        if measure.m != m:
            raise DimensionError("Measure dimension does not match the function", m, measure.m)
        self._guard(m)
        return measure.vertex_weights()

    def expectation(self, f: FunctionLike, measure: ProductMeasure) -> float:
        table = self.function_table(f)
        weights = self._weights(table.m, measure)
        return float(np.dot(weights, table.values.astype(float)))

    def tail_probability(self, f: FunctionLike, threshold: float, measure: ProductMeasure) -> float:
        """P(Z >= threshold)."""
        table = self.function_table(f)
        weights = self._weights(table.m, measure)
        return float(weights[table.values.astype(float) >= threshold].sum())

    def lower_tail_probability(self, f: FunctionLike, threshold: float, measure: ProductMeasure) -> float:
        """P(Z <= threshold)."""
        table = self.function_table(f)
        weights = self._weights(table.m, measure)
        return float(weights[table.values.astype(float) <= threshold].sum())

    def median(self, f: FunctionLike, measure: ProductMeasure) -> float:
        """Lower median inf{a : P(Z <= a) >= 1/2}."""
        table = self.function_table(f)
        weights = self._weights(table.m, measure)
        return lower_median(table.values.astype(float), weights)

    # ------------------------------------------------------------------
    # random instances

    def random_function(
        self, m: int, seed: int, terms: Optional[int] = None, max_weight: int = 5
    ) -> MultilinearFunction:
        """
        Seeded monotone test function: `terms` monomials (default m) over
        random nonempty subsets with integer weights in [1, max_weight].
        """
        if m < 1:
            raise DimensionError("Random functions need m >= 1", 1, m)
        if max_weight < 1:
            raise ValidationError("max_weight must be positive", "max_weight", max_weight)
        rng = philox_stream(seed, INSTANCE_STREAM)
        count = m if terms is None else terms
        masks = rng.integers(1, 1 << m, size=count)
        weights = rng.integers(1, max_weight + 1, size=count)
        coefficients: Dict[int, int] = {}
        for mask, weight in zip(masks.tolist(), weights.tolist()):
            coefficients[mask] = coefficients.get(mask, 0) + weight
        return MultilinearFunction(m, coefficients)
