"""
Unit tests for DistanceService: the convex-hull distance and the
exhaustive inequality verifiers.
"""

import math

import numpy as np
import pytest

from src.models.cube import CubePoint, FunctionTable, MultilinearFunction, ProductMeasure
from src.models.distance import VertexSet
from src.services.cube_service import CubeService
from src.services.distance_service import DEFAULT_T_GRID, DistanceService, minimal_codes
from src.utils.config import LabConfig
from src.utils.exceptions import EmptySetError, EnumerationLimitError, MonotonicityError, PreconditionError


@pytest.fixture
def service() -> DistanceService:
    config = LabConfig()
    return DistanceService(config, CubeService(config))


class TestConvexDistance:
    """Unit tests for convex_distance."""

    def test_member_has_distance_zero(self, service: DistanceService) -> None:
        """Test f_c(A, x) = 0 for x in A."""
        A = VertexSet(3, (0, 5))

        assert service.convex_distance(A, CubePoint.from_index(5, 3)).value == 0.0

    def test_single_member(self, service: DistanceService) -> None:
        """Test A = {000}, x = 111 gives sqrt(3)."""
        result = service.convex_distance(VertexSet(3, (0,)), CubePoint.ones(3))

        assert result.value == pytest.approx(math.sqrt(3))

    def test_two_orthogonal_generators(self, service: DistanceService) -> None:
        """Test A = {00, 11}, x = 10 gives the midpoint (1/2, 1/2)."""
        result = service.convex_distance(VertexSet(2, (0, 3)), CubePoint((1, 0)))

        assert result.value == pytest.approx(math.sqrt(0.5), abs=1e-9)
        assert np.allclose(result.point, [0.5, 0.5], atol=1e-8)
        assert result.witness.sum() == pytest.approx(1.0)

    def test_dominated_generators_are_dropped(self) -> None:
        """Test 011 is removed in favour of 001."""
        assert sorted(minimal_codes(np.array([1, 3, 6])).tolist()) == [1, 6]

    @pytest.mark.parametrize("method", ["wolfe", "faces", "nnls"])
    def test_methods_agree(self, service: DistanceService, method: str) -> None:
        """Test the solvers reach the same distance."""
        A = service.random_vertex_set(5, seed=9, density=0.2)
        x = CubePoint.ones(5) if CubePoint.ones(5) not in A else CubePoint.zeros(5)
        reference = service.convex_distance(A, x, method="faces").value

        assert service.convex_distance(A, x, method=method).value == pytest.approx(reference, abs=1e-6)

    def test_distance_at_most_hamming(self, service: DistanceService) -> None:
        """Test f_c(A, x) <= sqrt(min Hamming distance to A)."""
        A = service.random_vertex_set(6, seed=4, density=0.1)
        for v in range(0, 64, 7):
            x = CubePoint.from_index(v, 6)
            nearest = min(x.hamming(y) for y in A.members)
            assert service.convex_distance(A, x).value <= math.sqrt(nearest) + 1e-9

    def test_empty_set_refused(self, service: DistanceService) -> None:
        """Test A must be nonempty."""
        with pytest.raises(EmptySetError):
            service.convex_distance(VertexSet(2, ()), CubePoint.zeros(2))

    def test_table_matches_pointwise(self, service: DistanceService) -> None:
        """Test the sweep agrees with convex_distance on every vertex."""
        A = service.random_vertex_set(4, seed=2)
        table = service.squared_distance_table(A)

        for v in range(16):
            expected = service.convex_distance(A, CubePoint.from_index(v, 4)).value ** 2
            assert table[v] == pytest.approx(expected, abs=1e-7)

    def test_distance_guard(self) -> None:
        """Test sweeps above max_distance_m are refused."""
        service = DistanceService(LabConfig(max_distance_m=3))

        with pytest.raises(EnumerationLimitError):
            service.squared_distance_table(VertexSet(4, (0,)))


class TestTalagrand:
    """Unit tests for verify_T1 and verify_T2."""

    @pytest.mark.parametrize("p", [0.1, 0.5, 0.9])
    def test_t1_holds_on_random_sets(self, service: DistanceService, p: float) -> None:
        """Test P(A) P(f_c^2 >= t) <= exp(-t/2) on a random set."""
        A = service.random_vertex_set(5, seed=13)
        report = service.verify_T1(A, ProductMeasure(p, 5))

        assert report.passed
        assert report.inequality == "talagrand_T1"
        assert set(DEFAULT_T_GRID) <= set(report.grid)
        assert report.max_lhs_over_bound <= 1.0 + 1e-9

    def test_t1_full_cube(self, service: DistanceService) -> None:
        """Test A = cube: f_c = 0 and only t = 0 is tight."""
        report = service.verify_T1(VertexSet.full(3), ProductMeasure(0.5, 3), t_grid=[0.0, 1.0])

        assert report.passed
        assert report.max_lhs_over_bound == pytest.approx(1.0)

    def test_t2_witness(self, service: DistanceService) -> None:
        """Test a witness y in A exists for several lambdas."""
        A = service.random_vertex_set(5, seed=21, density=0.15)
        x = CubePoint.from_index(19, 5)
        rng = np.random.default_rng(0)

        for lam in [np.ones(5), np.eye(5)[2], rng.random(5)]:
            result = service.verify_T2(A, x, lam)
            assert result.ok
            assert result.witness in A

    def test_t2_check_count(self, service: DistanceService) -> None:
        """Test the batch helper reports no failures."""
        A = VertexSet(3, (0, 7))

        summary = service.t2_check_count(A, CubePoint((1, 0, 0)), [[1, 0, 0], [1, 1, 1]])

        assert summary == {"checked": 2, "failures": []}


class TestMonotoneDeviation:
    """Unit tests for the self-normalized inequality and its proof chain."""

    @pytest.mark.parametrize("p", [0.2, 0.5, 0.8])
    def test_theorem_holds(self, service: DistanceService, p: float) -> None:
        """Test the exhaustive check on a random monotone polynomial."""
        f = service.cube.random_function(5, seed=5)

        report = service.verify_theorem1(f, ProductMeasure(p, 5))

        assert report.passed
        assert report.checked > 0

    def test_level_points_without_variance_are_not_counted(self, service: DistanceService) -> None:
        """Test f = x_1: the point x = 0 sits on the level a = 0 with V = 0 and is not an upper deviation."""
        f = MultilinearFunction.from_terms(1, [([1], 1)])

        report = service.verify_theorem1(f, ProductMeasure(0.5, 1))

        assert report.passed
        assert report.violations == []
        # worst case: a = 0, t = 1, x = 1 with Z = 1 = sqrt(V t)
        assert report.max_lhs_over_bound == pytest.approx(0.25 * math.exp(0.5))

    def test_nonmonotone_refused(self, service: DistanceService) -> None:
        """Test a decreasing table is refused."""
        with pytest.raises(MonotonicityError):
            service.verify_theorem1(FunctionTable(1, np.array([1, 0])), ProductMeasure(0.5, 1))

    def test_proof_chain(self, service: DistanceService) -> None:
        """Test the telescoping steps and aggregate bound."""
        f = MultilinearFunction.from_terms(3, [([1], 1), ([1, 2], 2), ([3], 1)])
        x = CubePoint((1, 1, 0))
        y = CubePoint((0, 0, 1))

        result = service.verify_proof_chain(f, x, y, a=1.0)

        assert result.ok
        assert result.telescopes
        assert result.index_sets == {"I1": [1, 2], "I2": [3], "I3": []}
        assert result.sequence[0] == x
        assert result.sequence[-1] == y
        assert result.aggregate_lhs == pytest.approx(2.0)
        assert result.to_report().passed

    def test_proof_chain_needs_level(self, service: DistanceService) -> None:
        """Test Z(y) <= a is a precondition."""
        f = MultilinearFunction.from_terms(2, [([1], 1)])

        with pytest.raises(PreconditionError):
            service.verify_proof_chain(f, CubePoint.zeros(2), CubePoint.ones(2), a=0.5)

    def test_level_set(self, service: DistanceService) -> None:
        """Test {x : Z(x) <= a}."""
        f = MultilinearFunction.from_terms(2, [([1, 2], 1)])

        assert service.set_from_level(f, 0).indices == (0, 1, 2)


class TestDiscreteNormDeviation:
    """Unit tests for verify_bobkov."""

    def test_holds_for_non_monotone(self, service: DistanceService) -> None:
        """Test the bound also holds for a parity-like table."""
        table = FunctionTable(3, np.array([bin(v).count("1") % 2 for v in range(8)]))

        assert service.verify_bobkov(table, ProductMeasure(0.5, 3)).passed

    def test_constant_function(self, service: DistanceService) -> None:
        """Test a constant never deviates for t > 0."""
        report = service.verify_bobkov(FunctionTable(2, np.full(4, 3.0)), ProductMeasure(0.4, 2), t_grid=[1.0])

        assert report.passed
        assert report.max_lhs_over_bound == 0.0
