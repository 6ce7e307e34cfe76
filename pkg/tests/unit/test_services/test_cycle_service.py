"""
Unit tests for CycleService.

K_4 with k = 3 is the worked example: Z = 4, every edge lies on two
triangles, V = 24, W = 6 and card Sigma_0 = 24.
"""

from math import comb, perm

import pytest

from src.models.cube import CubePoint
from src.models.cycles import VertexPartition
from src.models.graph import Graph, edge_index
from src.services.cube_service import CubeService
from src.services.cycle_service import CycleService
from src.services.graph_service import GraphService
from src.utils.config import LabConfig
from src.utils.exceptions import EnumerationLimitError, PreconditionError, ValidationError


@pytest.fixture
def service() -> CycleService:
    config = LabConfig()
    return CycleService(config, GraphService(config))


@pytest.fixture
def k4() -> Graph:
    return Graph.complete(4)


class TestCounting:
    """Unit tests for cycle enumeration and Z."""

    def test_k4_triangles(self, service: CycleService, k4: Graph) -> None:
        """Test the four triangles of K_4 in canonical form."""
        cycles = service.enumerate_cycles(k4, 3)

        assert sorted(cycles.cycles) == [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]

    @pytest.mark.parametrize("n, k", [(5, 3), (5, 4), (5, 5), (6, 4), (6, 6)])
    def test_complete_graph_closed_form(self, service: CycleService, n: int, k: int) -> None:
        """Test Z(K_n) = n!/((n-k)! 2k)."""
        assert service.count_cycles(Graph.complete(n), k) == perm(n, k) // (2 * k)

    def test_fast_path_matches_enumeration(self, service: CycleService) -> None:
        """Test bitset triangle counting equals DFS enumeration."""
        g = GraphService().sample_graph(25, 0.3, seed=17)

        assert service.count_cycles(g, 3, fast=True) == service.count_cycles(g, 3, fast=False)

    def test_path_has_no_cycles(self, service: CycleService) -> None:
        """Test a path graph has Z = V = W = 0."""
        path = Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
        stats = service.local_variance_cycles(path, 3)

        assert (stats.Z, stats.V, stats.W) == (0, 0, 0)

    def test_cycle_graph(self, service: CycleService) -> None:
        """Test C_5 has one 5-cycle with N_e = 1 everywhere."""
        ring = Graph.from_edges(5, [(i, (i + 1) % 5) for i in range(5)])
        stats = service.local_variance_cycles(ring, 5)

        assert stats.Z == 1
        assert stats.V == 5
        assert stats.per_edge_histogram == [0, 5]

    def test_length_checked(self, service: CycleService, k4: Graph) -> None:
        """Test 3 <= k <= n."""
        with pytest.raises(ValidationError):
            service.count_cycles(k4, 5)

    def test_enumeration_guard(self) -> None:
        """Test graphs above the per-k guard are refused."""
        service = CycleService(LabConfig(cycle_guards={3: 5}))

        with pytest.raises(EnumerationLimitError):
            service.count_cycles(Graph.complete(6), 3)


class TestLocalVariance:
    """Unit tests for N_e, V and W."""

    def test_k4(self, service: CycleService, k4: Graph) -> None:
        """Test Z = 4, V = 24, W = 6 on K_4."""
        stats = service.local_variance_cycles(k4, 3)

        assert (stats.Z, stats.V, stats.W) == (4, 24, 6)
        assert stats.per_edge == {e: 2 for e in range(6)}

    def test_triangle_path_matches_generic(self, service: CycleService) -> None:
        """Test the triangle shortcut agrees with the generic pair scan."""
        g = GraphService().sample_graph(18, 0.4, seed=23)

        fast = service.local_variance_cycles(g, 3, fast=True)
        slow = service.local_variance_cycles(g, 3, fast=False)

        assert (fast.Z, fast.V, fast.W) == (slow.Z, slow.V, slow.W)
        assert fast.per_edge == slow.per_edge

    def test_complete_graph_per_edge(self, service: CycleService) -> None:
        """Test every edge of K_5 lies on 6 four-cycles, so V = 10 * 36."""
        stats = service.local_variance_cycles(Graph.complete(5), 4)

        assert set(stats.per_edge.values()) == {6}
        assert stats.V == 360

    def test_w_skipped(self, service: CycleService) -> None:
        """Test with_w=False leaves W at zero."""
        assert service.local_variance_cycles(Graph.complete(5), 4, with_w=False).W == 0

    def test_strict_and_loose_pairs(self, service: CycleService) -> None:
        """Test K_5 has no strictly edge-sharing 4-cycle pairs but some loose ones."""
        k5 = Graph.complete(5)

        assert service.count_shared_edge_pairs(k5, 4, strict=True) == 0
        assert service.count_shared_edge_pairs(k5, 4, strict=False) > 0

    def test_strict_and_loose_pair_counts_on_k6(self, service: CycleService) -> None:
        """Test K_6 4-cycles: 180 vertex-disjoint-apart-from-edge pairs, 540 one-edge pairs."""
        k6 = Graph.complete(6)

        assert service.count_shared_edge_pairs(k6, 4) == 180
        assert service.count_shared_edge_pairs(k6, 4, strict=False) == 540

    def test_pair_configurations(self, service: CycleService, k4: Graph) -> None:
        """Test the three 4-cycles of K_4 pairwise share two edges."""
        assert service.count_pair_configurations(k4, 4) == {2: 3}

    def test_triangle_w_closed_form(self, service: CycleService) -> None:
        """Test W = sum_e C(N_e, 2) for triangles of K_6."""
        stats = service.local_variance_cycles(Graph.complete(6), 3)

        assert stats.W == 15 * comb(4, 2)


class TestInjections:
    """Unit tests for Sigma_0, Sigma and the path sets."""

    def test_sigma0_is_four_w(self, service: CycleService, k4: Graph) -> None:
        """Test card Sigma_0 = 24 = 4 W on K_4."""
        assert service.count_sigma0(k4, 3) == 24

    @pytest.mark.parametrize("n, k", [(5, 3), (6, 4)])
    def test_sigma0_matches_w(self, service: CycleService, n: int, k: int) -> None:
        """Test card Sigma_0 = 4 W on complete graphs."""
        g = Graph.complete(n)

        assert service.count_sigma0(g, k) == 4 * service.count_shared_edge_pairs(g, k)

    def test_sigma_with_identity_partition(self, service: CycleService, k4: Graph) -> None:
        """Test F_i = {i - 1} admits exactly sigma = (0, 1, 2, 3)."""
        partition = VertexPartition(k=3, assignment=(1, 2, 3, 4))

        count = service.count_sigma(k4, 3, partition)

        assert count.sigma == 1
        assert count.sigma0 == 24
        assert count.start_tallies == {0: 1}

    def test_random_partition(self, service: CycleService) -> None:
        """Test seeded labels in 1..2k-2."""
        one = service.random_partition(12, 4, seed=5)

        assert one == service.random_partition(12, 4, seed=5)
        assert set(one.assignment) <= set(range(1, 7))

    def test_random_partition_needs_enough_vertices(self, service: CycleService) -> None:
        """Test n >= 2k - 2."""
        with pytest.raises(ValidationError):
            service.random_partition(3, 3, seed=0)

    def test_sigma_bounded_by_sigma0(self, service: CycleService) -> None:
        """Test card Sigma <= card Sigma_0 for a random partition."""
        g = Graph.complete(7)
        partition = service.random_partition(7, 3, seed=1)

        count = service.count_sigma(g, 3, partition)

        assert count.sigma <= count.sigma0
        assert sum(count.start_tallies.values()) == count.sigma

    def test_path_counts(self, service: CycleService, k4: Graph) -> None:
        """Test the single sigma gives one prefix per length."""
        partition = VertexPartition(k=3, assignment=(1, 2, 3, 4))

        paths = service.path_counts(k4, 3, partition, 0, p=1.0)

        assert paths.counts == (1, 1, 1, 1)
        assert paths.size(4) == 1
        assert paths.per_bucket[2] == {1: 1}

    def test_path_counts_need_first_class(self, service: CycleService, k4: Graph) -> None:
        """Test v must belong to F_1."""
        partition = VertexPartition(k=3, assignment=(1, 2, 3, 4))

        with pytest.raises(PreconditionError):
            service.path_counts(k4, 3, partition, 1)

    def test_sigma_decomposition(self, service: CycleService, k4: Graph) -> None:
        """Test all of K_4 is low degree at np = 4."""
        partition = VertexPartition(k=3, assignment=(1, 2, 3, 4))

        split = service.sigma_decomposition(k4, 3, partition, 1.0)

        assert (split.sigma, split.sigma1, split.sigma2, split.traces, split.Z) == (1, 1, 0, 1, 4)
        assert split.trace_bound_holds

    def test_path_bound_diagnostic(self, service: CycleService, k4: Graph) -> None:
        """Test the worst S_l(v) ratio on the identity partition."""
        partition = VertexPartition(k=3, assignment=(1, 2, 3, 4))

        # d_0^+ = max(3, 4) = 4; l = 2 gives 1/4, larger l divides by powers of 4
        assert service.path_bound_diagnostic(k4, 3, 1.0, partition) == pytest.approx(0.25)


class TestRatios:
    """Unit tests for the local-variance ratio."""

    def test_variants(self, service: CycleService, k4: Graph) -> None:
        """Test both denominators at np = 4."""
        assert service.theorem2_ratio(k4, 3, 1.0, "stated") == pytest.approx(24 / (4 * 4 + 4**4))
        assert service.theorem2_ratio(k4, 3, 1.0, "proof") == pytest.approx(24 / (4**3 * 4 + 4**6))

    def test_zero_np(self, service: CycleService, k4: Graph) -> None:
        """Test np = 0 gives ratio 0."""
        assert service.theorem2_ratio(k4, 3, 0.0) == 0.0

    def test_unknown_variant(self, service: CycleService, k4: Graph) -> None:
        """Test the variant name is checked."""
        with pytest.raises(ValidationError):
            service.theorem2_ratio(k4, 3, 1.0, "other")


class TestCyclePolynomial:
    """Unit tests for the cycle count as a cube function."""

    def test_evaluates_to_cycle_count(self, service: CycleService) -> None:
        """Test the polynomial at a graph's edge vector equals Z."""
        polynomial = service.cycle_polynomial(5, 3)
        g = GraphService().sample_graph(5, 0.6, seed=4)

        value = CubeService().evaluate(polynomial, CubePoint(tuple(int(b) for b in g.presence)))

        assert len(polynomial) == 10
        assert value == service.count_cycles(g, 3)

    def test_monomials_are_edge_sets(self, service: CycleService) -> None:
        """Test triangle 012 uses coordinates of edges 01, 02, 12."""
        polynomial = service.cycle_polynomial(4, 3)
        mask = sum(1 << edge_index(u, v) for u, v in [(0, 1), (0, 2), (1, 2)])

        assert polynomial.coefficients[mask] == 1
