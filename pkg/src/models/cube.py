"""
Boolean cube domain types.

Vertices of {0,1}^m are addressed by an integer index whose bit (i - 1)
holds coordinate x_i; every table in the lab uses this ordering.
"""

from dataclasses import dataclass, field
from numbers import Integral
from typing import Any, Dict, Iterable, List, Mapping, Sequence, Tuple

import numpy as np

from src.utils.exceptions import DimensionError, ValidationError


def subset_to_mask(subset: Iterable[int]) -> int:
    """Encode a subset of {1..m} (1-based) as a bitmask."""
    mask = 0
    for i in subset:
        if int(i) < 1:
            raise ValidationError("Coordinate indices are 1-based", "subset", i)
        mask |= 1 << (int(i) - 1)
    return mask


def mask_to_subset(mask: int) -> List[int]:
    """Decode a bitmask into its sorted 1-based coordinate list."""
    subset = []
    i = 1
    while mask:
        if mask & 1:
            subset.append(i)
        mask >>= 1
        i += 1
    return subset


@dataclass(frozen=True)
class CubePoint:
    """
    A vertex x = (x_1, ..., x_m) of the discrete cube.
    """

    bits: Tuple[int, ...]

    def __post_init__(self) -> None:
        bits = tuple(int(b) for b in self.bits)
        if any(b not in (0, 1) for b in bits):
            raise ValidationError("Cube coordinates must be 0 or 1", "bits", self.bits)
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_index(cls, index: int, m: int) -> "CubePoint":
        if not 0 <= index < (1 << m):
            raise DimensionError(f"Vertex index {index} outside the {m}-cube", m, index)
        return cls(tuple((index >> i) & 1 for i in range(m)))

    @classmethod
    def zeros(cls, m: int) -> "CubePoint":
        return cls((0,) * m)

    @classmethod
    def ones(cls, m: int) -> "CubePoint":
        return cls((1,) * m)

    @property
    def m(self) -> int:
        return len(self.bits)

    @property
    def index(self) -> int:
        return sum(b << i for i, b in enumerate(self.bits))

    @property
    def weight(self) -> int:
        """Hamming weight |x|."""
        return sum(self.bits)

    def _check_coordinate(self, i: int) -> None:
        if not 1 <= i <= self.m:
            raise DimensionError(f"Coordinate {i} out of range 1..{self.m}", self.m, i)

    def flip(self, i: int) -> "CubePoint":
        """The neighbour x^i differing from x in coordinate i (1-based)."""
        self._check_coordinate(i)
        bits = list(self.bits)
        bits[i - 1] ^= 1
        return CubePoint(tuple(bits))

    def with_zero(self, i: int) -> "CubePoint":
        self._check_coordinate(i)
        bits = list(self.bits)
        bits[i - 1] = 0
        return CubePoint(tuple(bits))

    def complement(self) -> "CubePoint":
        return CubePoint(tuple(1 - b for b in self.bits))

    def hamming(self, other: "CubePoint") -> int:
        if other.m != self.m:
            raise DimensionError("Points live in different cubes", self.m, other.m)
        return sum(a != b for a, b in zip(self.bits, other.bits))

    def as_array(self) -> np.ndarray:
        return np.array(self.bits, dtype=np.int8)

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)


@dataclass(frozen=True)
class ProductMeasure:
    """
    Product Bernoulli(p) measure on {0,1}^m.
    """

    p: float
    m: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise ValidationError("p must lie in [0, 1]", "p", self.p)
        if self.m < 0:
            raise ValidationError("m must be nonnegative", "m", self.m)

    def probability(self, x: CubePoint) -> float:
        if x.m != self.m:
            raise DimensionError("Point dimension does not match the measure", self.m, x.m)
        k = x.weight
        return float(self.p**k * (1.0 - self.p) ** (self.m - k))

    def vertex_weights(self) -> np.ndarray:
        """P({x}) for every vertex, in vertex-index order."""
        ones = np.bitwise_count(np.arange(1 << self.m, dtype=np.uint64)).astype(np.int64)
        return np.power(self.p, ones) * np.power(1.0 - self.p, self.m - ones)


@dataclass(frozen=True)
class MultilinearFunction:
    """
    Z(x) = sum_C alpha_C prod_{i in C} x_i with all alpha_C >= 0.

    Coefficients are kept sparse: subset bitmask -> weight. Zero weights
    are dropped on construction.
    """

    m: int
    coefficients: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.m < 0:
            raise ValidationError("m must be nonnegative", "m", self.m)
        cleaned: Dict[int, Any] = {}
        limit = 1 << self.m
        for mask, weight in self.coefficients.items():
            mask = int(mask)
            if not 0 <= mask < limit:
                raise DimensionError(
                    f"Monomial {mask_to_subset(mask)} is not a subset of 1..{self.m}",
                    self.m,
                    mask_to_subset(mask),
                )
            if isinstance(weight, bool) or not isinstance(weight, (Integral, float)):
                raise ValidationError("Weights must be real numbers", "weight", weight)
            if weight < 0:
                raise ValidationError(
                    "Weights must be nonnegative", "weight", {"subset": mask_to_subset(mask), "weight": weight}
                )
            if weight:
                cleaned[mask] = int(weight) if isinstance(weight, Integral) else float(weight)
        object.__setattr__(self, "coefficients", dict(sorted(cleaned.items())))

    @classmethod
    def from_terms(cls, m: int, terms: Iterable[Tuple[Sequence[int], float]]) -> "MultilinearFunction":
        """Build from (1-based subset, weight) pairs; repeated subsets add up."""
        coefficients: Dict[int, Any] = {}
        for subset, weight in terms:
            mask = subset_to_mask(subset)
            coefficients[mask] = coefficients.get(mask, 0) + weight
        return cls(m, coefficients)

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "MultilinearFunction":
        try:
            m = int(data["m"])
            terms = [(term["subset"], term["weight"]) for term in data.get("terms", [])]
        except (KeyError, TypeError) as e:
            raise ValidationError(f"Malformed function document: {e}", "terms", data)
        return cls.from_terms(m, terms)

    def to_json(self) -> Dict[str, Any]:
        return {
            "m": self.m,
            "terms": [
                {"subset": mask_to_subset(mask), "weight": weight}
                for mask, weight in self.coefficients.items()
            ],
        }

    @property
    def is_integral(self) -> bool:
        """True when every weight is an integer, enabling exact arithmetic."""
        return all(isinstance(w, int) for w in self.coefficients.values())

    @property
    def total_weight(self) -> Any:
        """Z at the all-ones point."""
        return sum(self.coefficients.values())

    def __add__(self, other: "MultilinearFunction") -> "MultilinearFunction":
        if other.m != self.m:
            raise DimensionError("Cannot add functions on different cubes", self.m, other.m)
        merged: Dict[int, Any] = dict(self.coefficients)
        for mask, weight in other.coefficients.items():
            merged[mask] = merged.get(mask, 0) + weight
        return MultilinearFunction(self.m, merged)

    def __len__(self) -> int:
        return len(self.coefficients)


@dataclass(frozen=True, eq=False)
class FunctionTable:
    """
    A function on {0,1}^m given by its 2^m values in vertex-index order.
    """

    m: int
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values)
        if values.ndim != 1 or values.shape[0] != (1 << self.m):
            raise DimensionError(
                f"Table for m={self.m} needs exactly {1 << self.m} values",
                1 << self.m,
                values.shape,
            )
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(cls, m: int, func: Any) -> "FunctionTable":
        """Tabulate func(CubePoint) over the cube."""
        return cls(m, np.array([func(CubePoint.from_index(v, m)) for v in range(1 << m)]))

    def __getitem__(self, x: CubePoint) -> Any:
        if x.m != self.m:
            raise DimensionError("Point dimension does not match the table", self.m, x.m)
        return self.values[x.index]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FunctionTable):
            return NotImplemented
        return self.m == other.m and bool(np.array_equal(self.values, other.values))
