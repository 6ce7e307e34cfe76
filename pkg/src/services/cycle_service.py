"""
k-cycle statistics service.

Cycles are enumerated by DFS from their minimal vertex over adjacency
bitsets; per-edge counts N_e, V = sum_e N_e^2 and the shared-edge pair
count W are derived from the per-edge cycle lists. The injection sets
Sigma_0 / Sigma are walked directly by a bitset DFS without
materializing cycle pairs.

An injection sigma : {1..2k-2} -> V is encoded as a vertex tuple where
sigma(1)..sigma(k) traverses the first cycle, and
sigma(k), sigma(k+1), ..., sigma(2k-2), sigma(1) traverses the second;
the two cycles share exactly the edge sigma(1)sigma(k).
"""

from math import comb
from typing import Dict, Iterator, List, Optional, Sequence, Set, Tuple
import logging

import numpy as np

from src.models.cube import MultilinearFunction
from src.models.cycles import (
    Cycle,
    CycleSet,
    CycleStatistics,
    InjectionCount,
    PathCounts,
    SigmaDecomposition,
    VertexPartition,
    cycle_edges,
)
from src.models.graph import Graph, edge_endpoints_array, edge_slots
from src.services.graph_service import GraphService
from src.utils.config import LabConfig
from src.utils.exceptions import EnumerationLimitError, PreconditionError, ValidationError
from src.utils.rng import PARTITION_STREAM, philox_stream

Injection = Tuple[int, ...]


def _iter_bits(bits: int) -> Iterator[int]:
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


def enumerate_canonical_cycles(adjacency: Sequence[int], k: int) -> List[Cycle]:
    """
    All k-cycles in canonical form: minimal vertex s first, every other
    vertex above s, second vertex smaller than the last.
    """
    n = len(adjacency)
    found: List[Cycle] = []

    for s in range(n):
        higher = ~((1 << (s + 1)) - 1)
        closing = adjacency[s] & higher
        if closing.bit_count() < 2:
            continue
        path = [s]

        def extend(v: int, used: int) -> None:
            depth = len(path)
            if depth == k:
                if path[1] < path[-1]:
                    found.append(tuple(path))
                return
            candidates = adjacency[v] & higher & ~used
            if depth == k - 1:
                candidates &= closing
            for w in _iter_bits(candidates):
                path.append(w)
                extend(w, used | (1 << w))
                path.pop()

        extend(s, 1 << s)
    return found


def count_triangles(adjacency: Sequence[int]) -> int:
    """Triangle count from bitsets: each triangle u < v < w counted at edge (u, v)."""
    total = 0
    for v in range(len(adjacency)):
        above_v = ~((1 << (v + 1)) - 1)
        for u in _iter_bits(adjacency[v] & ((1 << v) - 1)):
            total += (adjacency[u] & adjacency[v] & above_v).bit_count()
    return total


def iter_injections(
    adjacency: Sequence[int],
    k: int,
    class_masks: Optional[Sequence[int]] = None,
    starts: Optional[Sequence[int]] = None,
) -> Iterator[Injection]:
    """
    Walk Sigma_0, or Sigma when `class_masks[i]` restricts position i + 1.
    """
    n = len(adjacency)
    length = 2 * k - 2
    everyone = (1 << n) - 1
    masks = list(class_masks) if class_masks is not None else [everyone] * length
    first_cycle_end = k - 1
    last = length - 1

    for s in starts if starts is not None else range(n):
        if not (masks[0] >> s) & 1:
            continue
        seq = [s]

        def extend(pos: int, used: int) -> Iterator[Injection]:
            candidates = adjacency[seq[-1]] & ~used & masks[pos]
            if pos == first_cycle_end or pos == last:
                candidates &= adjacency[s]
            for w in _iter_bits(candidates):
                if pos == last:
                    yield tuple(seq) + (w,)
                    continue
                seq.append(w)
                yield from extend(pos + 1, used | (1 << w))
                seq.pop()

        yield from extend(1, 1 << s)


def _class_masks(partition: VertexPartition) -> List[int]:
    return [sum(1 << v for v in partition.members(i)) for i in range(1, partition.class_count + 1)]


class CycleService:
    """
    Cycle enumeration and the statistics built on it.
    """

    def __init__(
        self,
        config: Optional[LabConfig] = None,
        graph_service: Optional[GraphService] = None,
        logger: Optional[logging.Logger] = None,
    ) -> None:
        self.config = config or LabConfig()
        self.graphs = graph_service or GraphService(self.config)
        self.logger = logger or logging.getLogger(__name__)

    # ------------------------------------------------------------------
    # enumeration and counting

    def _check(self, g: Graph, k: int) -> None:
        if not 3 <= k <= g.n:
            raise ValidationError(f"Cycle length must satisfy 3 <= k <= n = {g.n}", "k", k)
        limit = self.config.cycle_guard(k)
        if g.n > limit:
            raise EnumerationLimitError(f"Cycle enumeration for k={k} is limited to n <= {limit}", limit, g.n)

    def enumerate_cycles(self, g: Graph, k: int) -> CycleSet:
        self._check(g, k)
        cycles = enumerate_canonical_cycles(g.adjacency, k)
        self.logger.debug("Enumerated cycles", extra={"k": k, "n": g.n, "cycles": len(cycles)})
        return CycleSet(k=k, n=g.n, cycles=tuple(cycles))

    def count_cycles(self, g: Graph, k: int, fast: bool = True) -> int:
        """Z; triangles use the bitset fast path unless fast=False."""
        self._check(g, k)
        if k == 3 and fast:
            return count_triangles(g.adjacency)
        return len(enumerate_canonical_cycles(g.adjacency, k))

    @staticmethod
    def per_edge_counts(cycles: CycleSet) -> Dict[int, int]:
        """N_e for every edge lying on at least one cycle."""
        counts: Dict[int, int] = {}
        for cycle in cycles:
            for e in cycle_edges(cycle):
                counts[e] = counts.get(e, 0) + 1
        return counts

    def triangle_statistics(self, g: Graph) -> CycleStatistics:
        """
        k = 3 statistics straight from bitsets: N_uv = |N(u) & N(v)|.

        Two distinct triangles on a common edge share nothing else, so
        W = sum_e C(N_e, 2).
        """
        self._check(g, 3)
        per_edge: Dict[int, int] = {}
        adjacency = g.adjacency
        present = np.flatnonzero(g.presence)
        us, vs = edge_endpoints_array(present)
        for e, u, v in zip(present.tolist(), us.tolist(), vs.tolist()):
            count = (adjacency[u] & adjacency[v]).bit_count()
            if count:
                per_edge[e] = count
        total = sum(per_edge.values())
        return CycleStatistics(
            k=3,
            Z=total // 3,
            per_edge=per_edge,
            V=sum(c * c for c in per_edge.values()),
            W=sum(comb(c, 2) for c in per_edge.values()),
        )

    def local_variance_cycles(self, g: Graph, k: int, fast: bool = True, with_w: bool = True) -> CycleStatistics:
        """
        Z, N_e, V = sum over present e of N_e^2, and the strict W
        (left at 0 when with_w is False).
        """
        if k == 3 and fast:
            return self.triangle_statistics(g)
        cycles = self.enumerate_cycles(g, k)
        per_edge = self.per_edge_counts(cycles)
        return CycleStatistics(
            k=k,
            Z=len(cycles),
            per_edge=per_edge,
            V=sum(c * c for c in per_edge.values()),
            W=self._shared_pairs(cycles, strict=True) if with_w else 0,
        )

    # ------------------------------------------------------------------
    # cycle pairs

    @staticmethod
    def _shared_pairs(cycles: CycleSet, strict: bool) -> int:
        """
        Unordered pairs sharing exactly one edge, found by scanning each
        C_k(e) list; a qualifying pair is seen at its unique shared edge.
        """
        edge_sets = cycles.edge_sets()
        vertex_sets = [frozenset(c) for c in cycles.cycles]
        total = 0
        for e, members in cycles.through_edge().items():
            for a_pos, a in enumerate(members):
                for b in members[a_pos + 1 :]:
                    if len(edge_sets[a] & edge_sets[b]) != 1:
                        continue
                    if strict and len(vertex_sets[a] & vertex_sets[b]) != 2:
                        continue
                    total += 1
        return total

    def count_shared_edge_pairs(self, g: Graph, k: int, strict: bool = True) -> int:
        """
        W: unordered pairs of present k-cycles sharing one edge.

        The default strict=True is narrower than "edge sets meet in exactly
        one edge": the two cycles must also share no vertex besides that
        edge's endpoints, which is the count with Sigma_0 = 4W. The literal
        exactly-one-common-edge count is strict=False; on K_6 with k=4 the
        two readings give 180 and 540 pairs.
        """
        return self._shared_pairs(self.enumerate_cycles(g, k), strict)

    def count_pair_configurations(self, g: Graph, k: int) -> Dict[int, int]:
        """
        Histogram {shared edge count: pairs} over unordered pairs of present
        cycles with at least one common edge.
        """
        cycles = self.enumerate_cycles(g, k)
        edge_sets = cycles.edge_sets()
        histogram: Dict[int, int] = {}
        for e, members in cycles.through_edge().items():
            for a_pos, a in enumerate(members):
                for b in members[a_pos + 1 :]:
                    shared = edge_sets[a] & edge_sets[b]
                    # count each pair once, at its smallest shared edge
                    if min(shared) != e:
                        continue
                    histogram[len(shared)] = histogram.get(len(shared), 0) + 1
        return dict(sorted(histogram.items()))

    # ------------------------------------------------------------------
    # injections

    def count_sigma0(self, g: Graph, k: int) -> int:
        """card Sigma_0 by direct walk over injections."""
        self._check(g, k)
        return sum(1 for _ in iter_injections(g.adjacency, k))

    def random_partition(self, n: int, k: int, seed: int) -> VertexPartition:
        """Assign every vertex independently and uniformly to one of 2k - 2 classes."""
        if k < 3:
            raise ValidationError("k must be at least 3", "k", k)
        classes = 2 * k - 2
        if n < classes:
            raise ValidationError(f"Need n >= 2k - 2 = {classes} vertices", "n", n)
        labels = philox_stream(seed, PARTITION_STREAM).integers(0, classes, size=n) + 1
        return VertexPartition(k=k, assignment=tuple(int(c) for c in labels))

    def _check_partition(self, g: Graph, k: int, partition: VertexPartition) -> None:
        if partition.k != k or partition.n != g.n:
            raise ValidationError(
                "Partition does not match the graph and cycle length",
                "partition",
                {"k": partition.k, "n": partition.n},
            )

    def count_sigma(self, g: Graph, k: int, partition: VertexPartition, sigma0: Optional[int] = None) -> InjectionCount:
        """
        card Sigma = injections of Sigma_0 with sigma(i) in F_i for every i.

        Pass `sigma0` to reuse an already computed card Sigma_0.
        """
        self._check(g, k)
        self._check_partition(g, k, partition)
        tallies: Dict[int, int] = {}
        for sigma in iter_injections(g.adjacency, k, _class_masks(partition)):
            tallies[sigma[0]] = tallies.get(sigma[0], 0) + 1
        return InjectionCount(
            sigma0=self.count_sigma0(g, k) if sigma0 is None else sigma0,
            sigma=sum(tallies.values()),
            start_tallies=dict(sorted(tallies.items())),
        )

    def path_counts(
        self,
        g: Graph,
        k: int,
        partition: VertexPartition,
        v: int,
        p: Optional[float] = None,
    ) -> PathCounts:
        """
        card S_l(v) for l = 1..2k-2: distinct length-l prefixes of the
        sigma in Sigma with sigma(1) = v. With p given, S_l^j(v) splits
        each level by the degree bucket j of sigma(l - 1).
        """
        self._check(g, k)
        self._check_partition(g, k, partition)
        if partition.class_of(v) != 1:
            raise PreconditionError(f"Vertex {v} is not in F_1", "v in F_1", {"v": v})
        length = 2 * k - 2
        prefixes: List[Set[Injection]] = [set() for _ in range(length)]
        for sigma in iter_injections(g.adjacency, k, _class_masks(partition), starts=[v]):
            for l in range(1, length + 1):
                prefixes[l - 1].add(sigma[:l])

        per_bucket: Dict[int, Dict[int, int]] = {}
        if p is not None and g.n * p > 0:
            profile = self.graphs.degree_buckets(g, p)
            for l in range(2, length + 1):
                tally: Dict[int, int] = {}
                for prefix in prefixes[l - 1]:
                    j = profile.bucket_of(prefix[l - 2])
                    tally[j] = tally.get(j, 0) + 1
                per_bucket[l] = dict(sorted(tally.items()))
        return PathCounts(v=v, counts=tuple(len(s) for s in prefixes), per_bucket=per_bucket)

    def path_bound_diagnostic(self, g: Graph, k: int, p: float, partition: VertexPartition) -> float:
        """
        max over v in F_1 and l >= 2 of card S_l(v) / (d_v^+ (np)^{l-2}),
        with d_v^+ = max(d_v, np).
        """
        np_value = g.n * p
        if np_value <= 0:
            raise ValidationError("The path bound needs np > 0", "np", np_value)
        worst = 0.0
        for v in sorted(partition.members(1)):
            counts = self.path_counts(g, k, partition, v).counts
            d_plus = max(g.degree(v), np_value)
            for l in range(2, 2 * k - 1):
                worst = max(worst, counts[l - 1] / (d_plus * np_value ** (l - 2)))
        return worst

    def sigma_decomposition(self, g: Graph, k: int, partition: VertexPartition, p: float) -> SigmaDecomposition:
        """
        Sigma_1 = {sigma(1) in V_1}, Sigma_2 the rest, and the trace set P of
        second-cycle traversals (sigma(1), sigma(k), ..., sigma(2k-2)) over Sigma_1.
        """
        self._check(g, k)
        self._check_partition(g, k, partition)
        profile = self.graphs.degree_buckets(g, p)
        low_degree = profile.buckets.get(1, frozenset())
        sigma1 = sigma2 = 0
        traces: Set[Injection] = set()
        for sigma in iter_injections(g.adjacency, k, _class_masks(partition)):
            if sigma[0] in low_degree:
                sigma1 += 1
                traces.add((sigma[0],) + sigma[k - 1 :])
            else:
                sigma2 += 1
        return SigmaDecomposition(
            sigma=sigma1 + sigma2,
            sigma1=sigma1,
            sigma2=sigma2,
            traces=len(traces),
            Z=self.count_cycles(g, k),
        )

    # ------------------------------------------------------------------
    # bounds

    @staticmethod
    def ratio_from_statistics(
        stats: CycleStatistics,
        np_value: float,
        variant: str = "stated",
    ) -> float:
        """
        V / ((np)^{k-2} Z + (np)^{2(k-1)}) ("stated"), or
        V / ((np)^k Z + (np)^{2k}) ("proof"). Zero when np = 0.
        """
        if np_value <= 0:
            return 0.0
        k = stats.k
        if variant == "stated":
            denominator = np_value ** (k - 2) * stats.Z + np_value ** (2 * (k - 1))
        elif variant == "proof":
            denominator = np_value**k * stats.Z + np_value ** (2 * k)
        else:
            raise ValidationError(f"Unknown ratio variant '{variant}'", "variant", variant)
        return float(stats.V) / denominator

    def theorem2_ratio(self, g: Graph, k: int, p: float, variant: str = "stated") -> float:
        """The Theorem-2 ratio of a graph; see ratio_from_statistics."""
        return self.ratio_from_statistics(self.local_variance_cycles(g, k), g.n * p, variant)

    def cycle_polynomial(self, n: int, k: int) -> MultilinearFunction:
        """
        The k-cycle count as a function on the edge cube of K_n: one unit
        monomial per k-cycle of K_n, coordinate e + 1 for colex edge e.
        """
        complete = Graph.complete(n)
        self._check(complete, k)
        coefficients = {}
        for cycle in enumerate_canonical_cycles(complete.adjacency, k):
            coefficients[sum(1 << e for e in cycle_edges(cycle))] = 1
        return MultilinearFunction(edge_slots(n), coefficients)
