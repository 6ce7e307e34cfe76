"""
Convex-hull distance service.

Computes f_c(A, x) as the minimum-norm point of conv{h(y) : y in A}, where
h(y) = (1{y_i != x_i})_i. Every vector of U_A(x) dominates some h(y)
coordinatewise and domination among nonnegative vectors cannot lower the
Euclidean norm, so minimizing over the generators alone gives f_c.

Also hosts the exhaustive verifiers for Talagrand's inequality, the
(T2) witness property, the self-normalized deviation inequality for
monotone functions with its telescoping proof chain, and the
discrete-norm deviation inequality.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple
import logging
import math

import numpy as np

from src.models.cube import CubePoint, FunctionTable, MultilinearFunction, ProductMeasure
from src.models.distance import DistanceResult, GeneratorSet, VertexSet
from src.models.reports import VerificationReport, Violation
from src.services.cube_service import CubeService, FunctionLike
from src.utils.algorithms import min_norm_point
from src.utils.config import LabConfig
from src.utils.exceptions import DimensionError, EnumerationLimitError, PreconditionError
from src.utils.logging_config import log_verification_event
from src.utils.parallel import ordered_map
from src.utils.rng import INSTANCE_STREAM, philox_stream

DEFAULT_T_GRID: Tuple[float, ...] = (0.25, 0.5, 1.0, 2.0, 4.0, 8.0)
COMPARISON_TOLERANCE = 1e-9
_GRID_DECIMALS = 12
_CHUNK = 64


def _bits_matrix(codes: np.ndarray, m: int) -> np.ndarray:
    return ((codes[:, None] >> np.arange(m)) & 1).astype(np.int8)


def minimal_codes(codes: np.ndarray) -> np.ndarray:
    """Drop generator codes that coordinatewise dominate another generator."""
    if codes.size <= 1:
        return codes
    covers = (codes[:, None] & codes[None, :]) == codes[None, :]
    np.fill_diagonal(covers, False)
    return codes[~covers.any(axis=1)]


def _distance_from_codes(
    codes: np.ndarray, m: int, tolerance: float, brute_force_limit: int, method: str
) -> Tuple[float, np.ndarray, str, int]:
    """(value, weights over `codes`, method, iterations) for sorted unique codes."""
    weights = np.zeros(codes.size)
    zero = np.flatnonzero(codes == 0)
    if zero.size:
        weights[zero[0]] = 1.0
        return 0.0, weights, "trivial", 0
    reduced = minimal_codes(codes)
    if reduced.size == 1:
        weights[np.searchsorted(codes, reduced[0])] = 1.0
        return math.sqrt(int(reduced[0]).bit_count()), weights, "single", 0
    result = min_norm_point(_bits_matrix(reduced, m), tolerance, brute_force_limit, method)
    weights[np.searchsorted(codes, reduced)] = result.weights
    return result.norm, weights, result.method, result.iterations


def _squared_distance_chunk(job: Tuple[int, np.ndarray, np.ndarray, float, int]) -> np.ndarray:
    """f_c(A, x)^2 for each x in a chunk; module-level so worker processes can run it."""
    m, members, xs, tolerance, brute_force_limit = job
    out = np.empty(len(xs))
    for pos, x in enumerate(xs):
        codes = np.unique(members ^ int(x))
        value, _, _, _ = _distance_from_codes(codes, m, tolerance, brute_force_limit, "auto")
        out[pos] = value * value
    return out


@dataclass(frozen=True)
class T2Result:
    """Outcome of the (T2) witness search for one (A, x, lambda)."""

    ok: bool
    witness: Optional[CubePoint]
    lhs: float
    rhs: float
    distance: float


@dataclass
class ProofChainStep:
    coordinate: int
    index_set: str
    step: float
    bound: float
    ok: bool


@dataclass
class ProofChainResult:
    """
    Telescoping decomposition Z(x) - Z(y) = sum_i (Z(z^{i-1}) - Z(z^i)).

    Coordinates are visited I_1 first, then I_2, then I_3, so every
    intermediate z^{i-1} before the last I_1 step lies below x.
    """

    index_sets: Dict[str, List[int]]
    sequence: List[CubePoint]
    steps: List[ProofChainStep]
    aggregate_lhs: float
    aggregate_bound: float
    level: float
    telescopes: bool = True
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_report(self) -> VerificationReport:
        ratio = self.aggregate_lhs / self.aggregate_bound if self.aggregate_bound > 0 else 0.0
        return VerificationReport(
            inequality="proof_chain",
            grid=[self.level],
            max_lhs_over_bound=max(ratio, 0.0),
            violations=self.violations,
            checked=len(self.steps) + 1,
            parameters={"index_sets": self.index_sets},
        )


class DistanceService:
    """
    Convex-hull distance and the exhaustive verifiers built on it.
    """

    def __init__(
        self,
        config: Optional[LabConfig] = None,
        cube_service: Optional[CubeService] = None,
        logger: Optional[logging.Logger] = None,
    ) -> None:
        self.config = config or LabConfig()
        self.cube = cube_service or CubeService(self.config)
        self.logger = logger or logging.getLogger(__name__)

    # ------------------------------------------------------------------
    # distance

    def generators(self, A: VertexSet, x: CubePoint) -> GeneratorSet:
        """Disagreement patterns of the members of A with x, duplicates collapsed."""
        A.require_nonempty()
        if x.m != A.m:
            raise DimensionError("Point and set live in different cubes", A.m, x.m)
        codes = np.unique(np.asarray(A.indices, dtype=np.int64) ^ x.index)
        return GeneratorSet(m=A.m, generators=_bits_matrix(codes, A.m))

    def convex_distance(self, A: VertexSet, x: CubePoint, method: str = "auto") -> DistanceResult:
        """
        f_c(A, x) with witness weights over `generators(A, x)`.

        Args:
            method: "auto" (Wolfe, face enumeration fallback), "wolfe",
                "faces" or "nnls"
        """
        gens = self.generators(A, x)
        codes = np.unique(np.asarray(A.indices, dtype=np.int64) ^ x.index)
        value, weights, used, iterations = _distance_from_codes(
            codes,
            A.m,
            self.config.solver_tolerance,
            self.config.brute_force_max_generators,
            method,
        )
        return DistanceResult(value=value, witness=weights, generators=gens, method=used, iterations=iterations)

    def _distance_guard(self, m: int) -> None:
        limit = self.config.max_distance_m
        if m > limit:
            raise EnumerationLimitError(f"Distance sweeps are limited to m <= {limit}", limit, m)

    def squared_distance_table(self, A: VertexSet, workers: int = 1) -> np.ndarray:
        """f_c(A, x)^2 for every vertex x."""
        A.require_nonempty()
        self._distance_guard(A.m)
        members = np.asarray(A.indices, dtype=np.int64)
        vertices = np.arange(1 << A.m, dtype=np.int64)
        jobs = [
            (
                A.m,
                members,
                vertices[start : start + _CHUNK],
                self.config.solver_tolerance,
                self.config.brute_force_max_generators,
            )
            for start in range(0, vertices.size, _CHUNK)
        ]
        return np.concatenate(ordered_map(_squared_distance_chunk, jobs, workers))

    def set_from_level(self, f: FunctionLike, a: float) -> VertexSet:
        """The level set {x : Z(x) <= a}."""
        table = self.cube.function_table(f)
        members = np.flatnonzero(table.values.astype(float) <= a + COMPARISON_TOLERANCE)
        return VertexSet(table.m, tuple(int(v) for v in members))

    def random_vertex_set(self, m: int, seed: int, density: Optional[float] = None) -> VertexSet:
        """Nonempty random A; each vertex kept with the given (or a random) density."""
        rng = philox_stream(seed, INSTANCE_STREAM)
        keep = rng.random() if density is None else density
        members = np.flatnonzero(rng.random(1 << m) < keep)
        if members.size == 0:
            members = np.array([int(rng.integers(0, 1 << m))])
        return VertexSet(m, tuple(int(v) for v in members))

    # ------------------------------------------------------------------
    # verifiers

    @staticmethod
    def _grid(values: np.ndarray, extra: Sequence[float] = ()) -> List[float]:
        rounded = np.round(np.asarray(values, dtype=float), _GRID_DECIMALS)
        return sorted(set(float(v) for v in rounded) | set(float(t) for t in extra))

    def verify_T1(
        self,
        A: VertexSet,
        measure: ProductMeasure,
        t_grid: Optional[Sequence[float]] = None,
        workers: int = 1,
    ) -> VerificationReport:
        """
        Check P(A) P(f_c^2 >= t) <= exp(-t/2) for every attained t and the
        default t grid.
        """
        if measure.m != A.m:
            raise DimensionError("Measure dimension does not match the set", A.m, measure.m)
        squared = self.squared_distance_table(A, workers)
        weights = measure.vertex_weights()
        prob_a = float(weights[A.mask()].sum())
        grid = self._grid(squared, DEFAULT_T_GRID if t_grid is None else t_grid)

        order = np.argsort(squared, kind="stable")
        sorted_sq = squared[order]
        # upper-tail masses: tail[i] = P(f_c^2 >= sorted_sq[i])
        tail = np.concatenate([np.cumsum(weights[order][::-1])[::-1], [0.0]])

        violations: List[Violation] = []
        worst = 0.0
        for t in grid:
            start = int(np.searchsorted(sorted_sq, t - COMPARISON_TOLERANCE, side="left"))
            lhs = prob_a * float(tail[start])
            bound = math.exp(-t / 2.0)
            worst = max(worst, lhs / bound)
            if lhs > bound + COMPARISON_TOLERANCE:
                violations.append(Violation(location={"t": t}, lhs=lhs, bound=bound))

        report = VerificationReport(
            inequality="talagrand_T1",
            grid=grid,
            max_lhs_over_bound=worst,
            violations=violations,
            checked=len(grid),
            parameters={"m": A.m, "p": measure.p, "size_A": len(A), "P_A": prob_a},
        )
        log_verification_event(self.logger, "talagrand_T1", report.checked, len(violations), m=A.m, p=measure.p)
        return report

    def verify_T2(self, A: VertexSet, x: CubePoint, lam: Sequence[float]) -> T2Result:
        """
        Find y in A with sum_i lam_i 1{y_i != x_i} <= f_c(A, x) |lam|.
        """
        weights = np.asarray(lam, dtype=float)
        if weights.shape != (A.m,):
            raise DimensionError("lambda must have one weight per coordinate", A.m, weights.shape)
        distance = self.convex_distance(A, x).value
        rhs = distance * float(np.linalg.norm(weights))

        members = np.asarray(A.indices, dtype=np.int64)
        patterns = _bits_matrix(members ^ x.index, A.m).astype(float)
        sums = patterns @ weights
        best = int(np.argmin(sums))
        lhs = float(sums[best])
        ok = lhs <= rhs + COMPARISON_TOLERANCE * max(1.0, rhs)
        witness = CubePoint.from_index(int(members[best]), A.m) if ok else None
        return T2Result(ok=ok, witness=witness, lhs=lhs, rhs=rhs, distance=distance)

    def verify_theorem1(
        self,
        f: FunctionLike,
        measure: ProductMeasure,
        a_grid: Optional[Sequence[float]] = None,
        t_grid: Optional[Sequence[float]] = None,
    ) -> VerificationReport:
        """
        Check P(Z(x) > a, Z(x) >= a + sqrt(V(x) t)) P(Z <= a) <= exp(-t/2)
        exactly for every attained level a.

        Refuses non-monotone inputs with MonotonicityError.
        """
        table = self.cube.function_table(f)
        self._distance_guard(table.m)
        if measure.m != table.m:
            raise DimensionError("Measure dimension does not match the function", table.m, measure.m)
        self.cube.require_monotone(table)

        z = table.values.astype(float)
        v = self.cube.variance_table(table).astype(float)
        weights = measure.vertex_weights()
        levels = np.asarray(self._grid(z) if a_grid is None else sorted(a_grid), dtype=float)
        ts = list(DEFAULT_T_GRID if t_grid is None else t_grid)

        order = np.argsort(z, kind="stable")
        cumulative = np.cumsum(weights[order])
        below = np.searchsorted(z[order], levels + COMPARISON_TOLERANCE, side="right")
        lower_mass = np.where(below > 0, cumulative[np.maximum(below - 1, 0)], 0.0)

        violations: List[Violation] = []
        worst = 0.0
        block = max(1, (1 << 22) // max(z.size, 1))
        for t in ts:
            spread = np.sqrt(v * t)
            bound = math.exp(-t / 2.0)
            for start in range(0, levels.size, block):
                chunk = levels[start : start + block]
                # x must leave the level set {Z <= a}; Z = a with V = 0 gives no distance
                event = (z[None, :] > chunk[:, None] + COMPARISON_TOLERANCE) & (
                    z[None, :] >= chunk[:, None] + spread[None, :] - COMPARISON_TOLERANCE
                )
                upper_mass = event.astype(float) @ weights
                lhs = upper_mass * lower_mass[start : start + block]
                worst = max(worst, float(lhs.max()) / bound)
                for pos in np.flatnonzero(lhs > bound + COMPARISON_TOLERANCE):
                    violations.append(
                        Violation(location={"a": float(chunk[pos]), "t": t}, lhs=float(lhs[pos]), bound=bound)
                    )

        report = VerificationReport(
            inequality="theorem1_selfnorm",
            grid=ts,
            max_lhs_over_bound=worst,
            violations=violations,
            checked=int(levels.size * len(ts)),
            parameters={"m": table.m, "p": measure.p, "levels": int(levels.size)},
        )
        log_verification_event(self.logger, "theorem1_selfnorm", report.checked, len(violations), m=table.m, p=measure.p)
        return report

    def verify_proof_chain(self, f: MultilinearFunction, x: CubePoint, y: CubePoint, a: float) -> ProofChainResult:
        """
        Rebuild the telescoping argument behind the monotone deviation
        inequality for one pair (x, y) with Z(y) <= a.
        """
        if x.m != f.m or y.m != f.m:
            raise DimensionError("Points must match the function dimension", f.m, (x.m, y.m))
        z_y = self.cube.evaluate(f, y)
        if z_y > a:
            raise PreconditionError(f"Z(y) = {z_y} exceeds the level a = {a}", "Z(y) <= a")

        coords = range(1, f.m + 1)
        sets = {
            "I1": [i for i in coords if x.bits[i - 1] == 1 and y.bits[i - 1] == 0],
            "I2": [i for i in coords if x.bits[i - 1] == 0 and y.bits[i - 1] == 1],
            "I3": [i for i in coords if x.bits[i - 1] == y.bits[i - 1]],
        }
        gradient_x = self.cube.gradient(f, x)

        sequence = [x]
        steps: List[ProofChainStep] = []
        violations: List[Violation] = []
        current = x
        for name in ("I1", "I2", "I3"):
            for i in sets[name]:
                bits = list(current.bits)
                bits[i - 1] = y.bits[i - 1]
                following = CubePoint(tuple(bits))
                step = self.cube.evaluate(f, current) - self.cube.evaluate(f, following)
                if name == "I1":
                    derivative = self.cube.discrete_derivative(f, current, i)
                    bound = gradient_x[i - 1]
                    slack = COMPARISON_TOLERANCE * max(1.0, abs(float(step)))
                    ok = abs(step - derivative) <= slack and step <= bound + slack
                elif name == "I2":
                    bound = 0
                    ok = step <= COMPARISON_TOLERANCE
                else:
                    bound = 0
                    ok = step == 0
                steps.append(ProofChainStep(coordinate=i, index_set=name, step=float(step), bound=float(bound), ok=ok))
                if not ok:
                    violations.append(
                        Violation(location={"coordinate": i, "set": name}, lhs=float(step), bound=float(bound))
                    )
                sequence.append(following)
                current = following

        total = sum(s.step for s in steps)
        telescopes = abs(total - float(self.cube.evaluate(f, x) - z_y)) <= COMPARISON_TOLERANCE * max(1.0, abs(total))
        aggregate_lhs = float(self.cube.evaluate(f, x)) - a
        aggregate_bound = float(sum(gradient_x[i - 1] for i in sets["I1"] + sets["I2"]))
        if aggregate_lhs > aggregate_bound + COMPARISON_TOLERANCE:
            violations.append(Violation(location={"aggregate": True}, lhs=aggregate_lhs, bound=aggregate_bound))
        if not telescopes:
            violations.append(Violation(location={"telescoping": True}, lhs=total, bound=float(self.cube.evaluate(f, x) - z_y)))

        return ProofChainResult(
            index_sets=sets,
            sequence=sequence,
            steps=steps,
            aggregate_lhs=aggregate_lhs,
            aggregate_bound=aggregate_bound,
            level=float(a),
            telescopes=telescopes,
            violations=violations,
        )

    def verify_bobkov(
        self,
        f: FunctionLike,
        measure: ProductMeasure,
        t_grid: Optional[Sequence[float]] = None,
    ) -> VerificationReport:
        """
        Check P(f >= E f + ||f||_d sqrt(t)) <= exp(-t/4).
        """
        table = self.cube.function_table(f)
        self._distance_guard(table.m)
        values = table.values.astype(float)
        weights = self._weights(table, measure)
        mean = float(weights @ values)
        norm = self.cube.global_discrete_norm(table)
        ts = list(DEFAULT_T_GRID if t_grid is None else t_grid)

        violations: List[Violation] = []
        worst = 0.0
        for t in ts:
            threshold = mean + norm * math.sqrt(t)
            if norm > 0:
                lhs = float(weights[values >= threshold - COMPARISON_TOLERANCE].sum())
            else:
                # constant f: the deviation event is empty for every t > 0
                lhs = 1.0 if t == 0 else 0.0
            bound = math.exp(-t / 4.0)
            worst = max(worst, lhs / bound)
            if lhs > bound + COMPARISON_TOLERANCE:
                violations.append(Violation(location={"t": t}, lhs=lhs, bound=bound))

        report = VerificationReport(
            inequality="discrete_norm_deviation",
            grid=ts,
            max_lhs_over_bound=worst,
            violations=violations,
            checked=len(ts),
            parameters={"m": table.m, "p": measure.p, "mean": mean, "norm_d": norm},
        )
        log_verification_event(self.logger, "discrete_norm_deviation", report.checked, len(violations), m=table.m)
        return report

    def _weights(self, table: FunctionTable, measure: ProductMeasure) -> np.ndarray:
        if measure.m != table.m:
            raise DimensionError("Measure dimension does not match the table", table.m, measure.m)
        return measure.vertex_weights()

    def t2_check_count(self, A: VertexSet, x: CubePoint, lams: Sequence[Sequence[float]]) -> Dict[str, Any]:
        """Run verify_T2 over several lambdas; returns counts and failing lambdas."""
        failures = []
        for lam in lams:
            result = self.verify_T2(A, x, lam)
            if not result.ok:
                failures.append({"lambda": list(map(float, lam)), "lhs": result.lhs, "rhs": result.rhs})
        return {"checked": len(lams), "failures": failures}
