"""
Cycle statistics domain types.
"""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, Tuple

from src.models.graph import edge_index
from src.utils.exceptions import ValidationError

Cycle = Tuple[int, ...]


def cycle_edges(cycle: Cycle) -> Tuple[int, ...]:
    """Colex indices of the k edges of a cycle, in traversal order."""
    k = len(cycle)
    return tuple(edge_index(cycle[i], cycle[(i + 1) % k]) for i in range(k))


def canonical_cycle(vertices: Cycle) -> Cycle:
    """
    Canonical rotation/reflection of a cyclic vertex sequence.

    Minimal vertex first, followed by the smaller of its two neighbours.
    """
    k = len(vertices)
    start = vertices.index(min(vertices))
    forward = tuple(vertices[(start + i) % k] for i in range(k))
    backward = (forward[0],) + tuple(reversed(forward[1:]))
    return forward if forward[1] < forward[-1] else backward


@dataclass(frozen=True)
class CycleSet:
    """
    All present k-cycles of a graph, each once in canonical form.
    """

    k: int
    n: int
    cycles: Tuple[Cycle, ...]

    def __len__(self) -> int:
        return len(self.cycles)

    def __iter__(self) -> Iterator[Cycle]:
        return iter(self.cycles)

    def edge_sets(self) -> List[FrozenSet[int]]:
        return [frozenset(cycle_edges(c)) for c in self.cycles]

    def through_edge(self) -> Dict[int, List[int]]:
        """C_k(e): positions in `cycles` of the cycles using edge e."""
        index: Dict[int, List[int]] = {}
        for pos, cycle in enumerate(self.cycles):
            for e in cycle_edges(cycle):
                index.setdefault(e, []).append(pos)
        return index

    def to_lines(self) -> List[str]:
        return [" ".join(str(v) for v in cycle) for cycle in self.cycles]


@dataclass(frozen=True)
class CycleStatistics:
    """
    Z, the per-edge counts N_e, V = sum over present e of N_e^2, and W.
    """

    k: int
    Z: int
    per_edge: Dict[int, int]
    V: int
    W: int

    @property
    def per_edge_histogram(self) -> List[int]:
        """Entry h is the number of present edges lying on exactly h cycles."""
        if not self.per_edge:
            return []
        top = max(self.per_edge.values())
        histogram = [0] * (top + 1)
        for count in self.per_edge.values():
            histogram[count] += 1
        return histogram

    def to_dict(self) -> Dict[str, object]:
        return {
            "k": self.k,
            "Z": self.Z,
            "V": self.V,
            "W": self.W,
            "per_edge_histogram": self.per_edge_histogram,
        }


@dataclass(frozen=True)
class VertexPartition:
    """
    Partition of the vertex set into classes F_1, ..., F_{2k-2}.

    `assignment[v]` is the 1-based class of vertex v.
    """

    k: int
    assignment: Tuple[int, ...]
    classes: Tuple[FrozenSet[int], ...] = field(default=())

    def __post_init__(self) -> None:
        size = self.class_count
        if any(not 1 <= c <= size for c in self.assignment):
            raise ValidationError(f"Class labels must lie in 1..{size}", "assignment")
        classes = tuple(
            frozenset(v for v, c in enumerate(self.assignment) if c == i) for i in range(1, size + 1)
        )
        object.__setattr__(self, "classes", classes)

    @property
    def class_count(self) -> int:
        return 2 * self.k - 2

    @property
    def n(self) -> int:
        return len(self.assignment)

    def class_of(self, v: int) -> int:
        return self.assignment[v]

    def members(self, i: int) -> FrozenSet[int]:
        """F_i, 1-based."""
        return self.classes[i - 1]


@dataclass(frozen=True)
class InjectionCount:
    """
    card Sigma_0 and card Sigma for one partition.

    `start_tallies[v]` counts sigma in Sigma with sigma(1) = v.
    """

    sigma0: int
    sigma: int
    start_tallies: Dict[int, int] = field(default_factory=dict)


@dataclass(frozen=True)
class PathCounts:
    """
    card S_l(v) for l = 1..2k-2, with the breakdown by the bucket of
    sigma(l - 1) for l >= 2.
    """

    v: int
    counts: Tuple[int, ...]
    per_bucket: Dict[int, Dict[int, int]]

    def size(self, l: int) -> int:
        return self.counts[l - 1]


@dataclass(frozen=True)
class SigmaDecomposition:
    """
    Sigma split by whether sigma(1) lies in V_1, plus the trace set P.
    """

    sigma: int
    sigma1: int
    sigma2: int
    traces: int
    Z: int

    @property
    def trace_bound_holds(self) -> bool:
        return self.traces <= self.Z
