"""
Convex-hull distance domain types.
"""

from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np

from src.models.cube import CubePoint
from src.utils.exceptions import DimensionError, EmptySetError


@dataclass(frozen=True)
class VertexSet:
    """
    A set A of cube vertices, stored by vertex index in ascending order.
    """

    m: int
    indices: Tuple[int, ...]

    def __post_init__(self) -> None:
        limit = 1 << self.m
        cleaned = tuple(sorted(set(int(v) for v in self.indices)))
        for v in cleaned:
            if not 0 <= v < limit:
                raise DimensionError(f"Vertex {v} outside the {self.m}-cube", self.m, v)
        object.__setattr__(self, "indices", cleaned)

    @classmethod
    def from_points(cls, m: int, points: Iterable[CubePoint]) -> "VertexSet":
        indices = []
        for point in points:
            if point.m != m:
                raise DimensionError("Member dimension does not match the set", m, point.m)
            indices.append(point.index)
        return cls(m, tuple(indices))

    @classmethod
    def full(cls, m: int) -> "VertexSet":
        return cls(m, tuple(range(1 << m)))

    @property
    def members(self) -> Tuple[CubePoint, ...]:
        return tuple(CubePoint.from_index(v, self.m) for v in self.indices)

    def require_nonempty(self) -> None:
        if not self.indices:
            raise EmptySetError()

    def mask(self) -> np.ndarray:
        """Indicator of A over all vertices."""
        indicator = np.zeros(1 << self.m, dtype=bool)
        indicator[list(self.indices)] = True
        return indicator

    def __contains__(self, x: object) -> bool:
        if isinstance(x, CubePoint):
            return x.m == self.m and x.index in set(self.indices)
        return False

    def __len__(self) -> int:
        return len(self.indices)

    def issubset(self, other: "VertexSet") -> bool:
        return self.m == other.m and set(self.indices) <= set(other.indices)


@dataclass(frozen=True, eq=False)
class GeneratorSet:
    """
    Disagreement patterns h(y) = (1{y_i != x_i})_i for y in A, deduplicated.

    Rows of `generators` are sorted by their integer encoding so solver
    tie-breaks are reproducible.
    """

    m: int
    generators: np.ndarray

    @property
    def size(self) -> int:
        return int(self.generators.shape[0])

    @property
    def contains_zero(self) -> bool:
        return bool(np.any(~self.generators.any(axis=1)))

    def min_hamming(self) -> int:
        return int(self.generators.sum(axis=1).min())


@dataclass(frozen=True, eq=False)
class DistanceResult:
    """
    f_c(A, x) with the convex weights over the generators attaining it.
    """

    value: float
    witness: np.ndarray
    generators: GeneratorSet
    method: str = "wolfe"
    iterations: int = 0

    @property
    def point(self) -> np.ndarray:
        """The minimum-norm point sum_g w_g g."""
        return self.witness @ self.generators.generators.astype(float)

    @property
    def squared(self) -> float:
        return self.value * self.value
