"""
Graph domain types for G(n, p) experiments.

Edges are enumerated in colexicographic order: for u < v the edge {u, v}
has index v(v - 1)/2 + u, so (0,1) -> 0, (0,2) -> 1, (1,2) -> 2, ...
"""

from dataclasses import dataclass, field
from math import isqrt
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Tuple

import numpy as np

from src.utils.exceptions import ValidationError


def edge_slots(n: int) -> int:
    """Number of edge slots m = n(n - 1)/2."""
    return n * (n - 1) // 2


def edge_index(u: int, v: int) -> int:
    """Colex index of the edge {u, v}."""
    if u == v:
        raise ValidationError("An edge needs two distinct endpoints", "edge", (u, v))
    if u < 0 or v < 0:
        raise ValidationError("Vertices are nonnegative integers", "edge", (u, v))
    if u > v:
        u, v = v, u
    return v * (v - 1) // 2 + u


def edge_endpoints_array(indices: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorized edge_endpoints: arrays (u, v) for an array of edge indices."""
    e = np.asarray(indices, dtype=np.int64)
    v = ((1 + np.sqrt(1 + 8 * e.astype(np.float64))) // 2).astype(np.int64)
    v = np.where(v * (v - 1) // 2 > e, v - 1, v)
    v = np.where((v + 1) * v // 2 <= e, v + 1, v)
    return e - v * (v - 1) // 2, v


def edge_endpoints(index: int) -> Tuple[int, int]:
    """Inverse of edge_index: the pair (u, v), u < v, with that index."""
    if index < 0:
        raise ValidationError("Edge index must be nonnegative", "index", index)
    v = (1 + isqrt(1 + 8 * index)) // 2
    while v * (v - 1) // 2 > index:
        v -= 1
    while (v + 1) * v // 2 <= index:
        v += 1
    return index - v * (v - 1) // 2, v


@dataclass(frozen=True, eq=False)
class Graph:
    """
    Undirected simple graph on vertices 0..n-1.

    `presence` is the cube point x (x_e = 1 iff edge e is present) over
    the colex edge enumeration; `adjacency[v]` is v's neighbour bitset.
    """

    n: int
    presence: np.ndarray
    adjacency: Tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValidationError("A graph needs at least one vertex", "n", self.n)
        presence = np.asarray(self.presence, dtype=bool)
        if presence.shape != (edge_slots(self.n),):
            raise ValidationError(
                f"Presence vector must have {edge_slots(self.n)} slots", "presence", presence.shape
            )
        presence = presence.copy()
        presence.setflags(write=False)
        object.__setattr__(self, "presence", presence)

        adjacency = [0] * self.n
        us, vs = edge_endpoints_array(np.flatnonzero(presence))
        for u, v in zip(us.tolist(), vs.tolist()):
            adjacency[u] |= 1 << v
            adjacency[v] |= 1 << u
        if self.adjacency and tuple(self.adjacency) != tuple(adjacency):
            raise ValidationError("Adjacency bitsets disagree with the presence vector", "adjacency")
        object.__setattr__(self, "adjacency", tuple(adjacency))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Tuple[int, int]]) -> "Graph":
        presence = np.zeros(edge_slots(n), dtype=bool)
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValidationError(f"Edge ({u}, {v}) has an endpoint outside 0..{n - 1}", "edge", (u, v))
            presence[edge_index(u, v)] = True
        return cls(n, presence)

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(n, np.ones(edge_slots(n), dtype=bool))

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, np.zeros(edge_slots(n), dtype=bool))

    @property
    def m(self) -> int:
        return edge_slots(self.n)

    @property
    def edge_count(self) -> int:
        return int(self.presence.sum())

    def degrees(self) -> np.ndarray:
        return np.array([a.bit_count() for a in self.adjacency], dtype=np.int64)

    def degree(self, v: int) -> int:
        return self.adjacency[v].bit_count()

    def max_degree(self) -> int:
        return max((a.bit_count() for a in self.adjacency), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return u != v and bool((self.adjacency[u] >> v) & 1)

    def neighbors(self, v: int) -> List[int]:
        bits = self.adjacency[v]
        out = []
        while bits:
            low = bits & -bits
            out.append(low.bit_length() - 1)
            bits ^= low
        return out

    def edges(self) -> Iterator[Tuple[int, int]]:
        """Present edges (u, v), u < v, in colex order."""
        for e in np.flatnonzero(self.presence):
            yield edge_endpoints(int(e))

    def with_edge(self, u: int, v: int, present: bool = True) -> "Graph":
        presence = self.presence.copy()
        presence[edge_index(u, v)] = present
        return Graph(self.n, presence)

    def relabeled(self, permutation: List[int]) -> "Graph":
        """Isomorphic copy with vertex v renamed permutation[v]."""
        if sorted(permutation) != list(range(self.n)):
            raise ValidationError("Relabeling must be a permutation of the vertices", "permutation")
        return Graph.from_edges(self.n, ((permutation[u], permutation[v]) for u, v in self.edges()))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.presence, other.presence))


@dataclass(frozen=True)
class DegreeProfile:
    """
    Degrees and the dyadic bucket decomposition V_1, V_2, ...

    V_1 = {d_v < 16np}; V_j = {2^{j+2} np <= d_v < 2^{j+3} np} for j >= 2.
    """

    degrees: Tuple[int, ...]
    np_value: float
    buckets: Dict[int, FrozenSet[int]]

    def bucket_of(self, v: int) -> int:
        for j, members in self.buckets.items():
            if v in members:
                return j
        raise ValidationError(f"Vertex {v} is not in any bucket", "vertex", v)

    def size(self, j: int) -> int:
        return len(self.buckets.get(j, frozenset()))

    @property
    def highest_bucket(self) -> int:
        return max(self.buckets) if self.buckets else 1


@dataclass(frozen=True)
class EventEResult:
    """
    Event E: max degree <= (np)^2 and card V_j <= np/(j 2^j loglog np)
    for every 2 <= j <= log(np).
    """

    holds: bool
    max_degree: int
    max_degree_bound: float
    bucket_sizes: Dict[int, int]
    thresholds: Dict[int, float]
    np_value: float

    @property
    def degree_clause(self) -> bool:
        return self.max_degree <= self.max_degree_bound

    @property
    def bucket_clause(self) -> bool:
        return all(self.bucket_sizes.get(j, 0) <= t for j, t in self.thresholds.items())

    @property
    def violating_buckets(self) -> List[int]:
        return [j for j, t in self.thresholds.items() if self.bucket_sizes.get(j, 0) > t]


@dataclass(frozen=True)
class LemmaEstimate:
    """
    Empirical frequency of a bad event with its Wilson interval and the
    analytic bound it is compared with.
    """

    lemma: str
    trials: int
    hits: int
    interval: Tuple[float, float]
    bound: float
    bound_label: str
    c_constant: Optional[float] = None

    @property
    def frequency(self) -> float:
        return self.hits / self.trials if self.trials else 0.0

    def to_dict(self) -> Dict[str, object]:
        return {
            "lemma": self.lemma,
            "trials": self.trials,
            "hits": self.hits,
            "frequency": self.frequency,
            "interval": list(self.interval),
            "bound": self.bound,
            "bound_label": self.bound_label,
            "c_constant": self.c_constant,
        }
