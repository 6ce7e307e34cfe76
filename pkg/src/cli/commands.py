"""
CLI Commands Module for the concentra verification lab.

One handler per subcommand. Handlers print a short human summary on
stdout, write report files when asked, and return the exit code;
errors propagate as ConcentraException subclasses for main() to map.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Union

import numpy as np

from src.models.cube import CubePoint, FunctionTable, MultilinearFunction, ProductMeasure
from src.models.distance import VertexSet
from src.models.experiment import ExperimentConfig, ExperimentReport, SummaryReport
from src.models.graph import Graph
from src.models.reports import CycleStatisticsModel, SuiteReport, VerificationReport, Violation
from src.services.cube_service import CubeService
from src.services.cycle_service import CycleService
from src.services.distance_service import DistanceService
from src.services.experiment_service import ExperimentService
from src.services.graph_io import read_edge_list, write_cycles, write_edge_list
from src.services.graph_service import E_POWER_E, GraphService
from src.services.report_writer import ReportWriterService
from src.utils.config import LabConfig
from src.utils.exceptions import EnumerationLimitError, ReportError, ValidationError
from src.utils.rng import INSTANCE_STREAM, derive_seed, philox_stream

EXIT_OK = 0
EXIT_VIOLATION = 1

SUITE_ORDER = (
    "theorem1_selfnorm",
    "talagrand_T1",
    "talagrand_T2",
    "proof_chain",
    "discrete_norm_deviation",
)
GRAPH_COLUMNS = ["n", "edges", "k", "Z", "V", "W", "p", "np", "max_degree", "event_E", "t2_ratio"]
T2_POINTS = 4
T2_RANDOM_LAMBDAS = 2

FunctionInput = Union[MultilinearFunction, FunctionTable]


class CLICommands:
    """
    Command handlers for the concentra CLI.

    Services are built once from the effective LabConfig and shared by
    every handler.
    """

    def __init__(self, config: LabConfig, quiet: bool = False) -> None:
        """
        Initialize CLI commands with configuration and services.

        Args:
            config: Effective lab configuration (env, file and flags merged)
            quiet: Suppress the progress counter
        """
        self.config = config
        self.quiet = quiet
        self.logger = logging.getLogger(__name__)

        self.cube = CubeService(config)
        self.distance = DistanceService(config, self.cube)
        self.graphs = GraphService(config)
        self.cycles = CycleService(config, self.graphs)
        self.experiments = ExperimentService(config)
        self.writer = ReportWriterService()

    # ------------------------------------------------------------------
    # verify-cube

    def verify_cube(self, args: argparse.Namespace) -> int:
        """
        Run the exhaustive cube suites; exit 0 iff no violation was found.
        """
        seed = args.seed if args.seed is not None else 0
        buckets: Dict[str, List[VerificationReport]] = {name: [] for name in SUITE_ORDER}
        if args.function or args.table:
            echo = self._verify_single(args, seed, buckets)
        else:
            echo = self._verify_sweep(args, seed, buckets)

        reports = [
            VerificationReport.combine(name, buckets[name], {"instances": len(buckets[name])})
            for name in SUITE_ORDER
            if buckets[name]
        ]
        echo.update({"seed": seed, "lab": self.config.to_dict()})
        suite = SuiteReport(config=echo, reports=reports)

        self._print_suite(suite)
        if args.out:
            self.writer.write_verification_report(suite, args.out, args.format)
        return EXIT_OK if suite.passed else EXIT_VIOLATION

    def _verify_sweep(
        self, args: argparse.Namespace, seed: int, buckets: Dict[str, List[VerificationReport]]
    ) -> Dict[str, Any]:
        if args.m_max < 1:
            raise ValidationError("--m-max must be at least 1", "m_max", args.m_max)
        if args.m_max > self.config.max_distance_m:
            raise EnumerationLimitError(
                f"Cube sweeps are limited to m <= {self.config.max_distance_m}",
                self.config.max_distance_m,
                args.m_max,
            )
        if args.functions < 1:
            raise ValidationError("--functions must be at least 1", "functions", args.functions)

        instance = 0
        for m in range(1, args.m_max + 1):
            for p in args.p:
                measure = ProductMeasure(p, m)
                for _ in range(args.functions):
                    instance_seed = derive_seed(seed, instance)
                    instance += 1
                    f = self.cube.random_function(m, instance_seed)
                    self._check_instance(f, measure, instance_seed, buckets, monotone=True)
            self.logger.info("Cube sweep dimension done", extra={"m": m, "instances": instance})
        return {"mode": "sweep", "m_max": args.m_max, "p": list(args.p), "functions": args.functions}

    def _verify_single(
        self, args: argparse.Namespace, seed: int, buckets: Dict[str, List[VerificationReport]]
    ) -> Dict[str, Any]:
        if args.function:
            f: FunctionInput = MultilinearFunction.from_json(_read_json(args.function))
            monotone = True
        else:
            f = _table_from_json(_read_json(args.table))
            report = self.cube.check_monotone(f)
            monotone = report.ok
            if not monotone:
                if not args.allow_nonmonotone:
                    self.cube.require_monotone(f)
                self.logger.warning(
                    "Non-monotone table: skipping the monotone-only suites",
                    extra={"x": str(report.x), "i": report.i, "quantity": report.quantity},
                )
        if f.m > self.config.max_distance_m:
            raise EnumerationLimitError(
                f"Cube checks are limited to m <= {self.config.max_distance_m}", self.config.max_distance_m, f.m
            )
        for p in args.p:
            self._check_instance(f, ProductMeasure(p, f.m), seed, buckets, monotone=monotone)
        return {
            "mode": "function" if args.function else "table",
            "source": args.function or args.table,
            "m": f.m,
            "p": list(args.p),
            "monotone": monotone,
        }

    def _check_instance(
        self,
        f: FunctionInput,
        measure: ProductMeasure,
        seed: int,
        buckets: Dict[str, List[VerificationReport]],
        monotone: bool,
    ) -> None:
        """Every suite on one (function, measure) pair."""
        table = self.cube.function_table(f)
        if monotone:
            buckets["theorem1_selfnorm"].append(self.distance.verify_theorem1(table, measure))
        buckets["discrete_norm_deviation"].append(self.distance.verify_bobkov(table, measure))

        median = self.cube.median(table, measure)
        level_set = self.distance.set_from_level(table, median)
        random_set = self.distance.random_vertex_set(table.m, seed)
        for A in (level_set, random_set):
            buckets["talagrand_T1"].append(self.distance.verify_T1(A, measure, workers=self.config.threads))
            buckets["talagrand_T2"].append(self._t2_report(table, A, seed))

        if monotone and isinstance(f, MultilinearFunction):
            buckets["proof_chain"].append(self._proof_chain_report(f, level_set, median, seed))

    def _t2_report(self, table: FunctionTable, A: VertexSet, seed: int) -> VerificationReport:
        """
        Witness search at a few random x, with lambda = (V_i(x)) and a
        couple of random nonnegative weight vectors.
        """
        rng = philox_stream(derive_seed(seed, 1), INSTANCE_STREAM)
        derivatives = self.cube.derivative_tables(table).astype(float)
        points = rng.integers(0, 1 << table.m, size=T2_POINTS)

        violations: List[Violation] = []
        worst = 0.0
        checked = 0
        for index in points.tolist():
            x = CubePoint.from_index(index, table.m)
            lams = [derivatives[:, index]] if derivatives[:, index].any() else []
            lams.extend(rng.random(table.m) for _ in range(T2_RANDOM_LAMBDAS))
            for lam in lams:
                result = self.distance.verify_T2(A, x, lam)
                checked += 1
                if result.rhs > 0:
                    worst = max(worst, result.lhs / result.rhs)
                if not result.ok:
                    violations.append(
                        Violation(
                            location={"x": index, "lambda": [float(v) for v in lam]},
                            lhs=result.lhs,
                            bound=result.rhs,
                        )
                    )
        return VerificationReport(
            inequality="talagrand_T2",
            max_lhs_over_bound=worst,
            violations=violations,
            checked=checked,
            parameters={"m": table.m, "size_A": len(A)},
        )

    def _proof_chain_report(
        self, f: MultilinearFunction, level_set: VertexSet, median: float, seed: int
    ) -> VerificationReport:
        rng = philox_stream(derive_seed(seed, 2), INSTANCE_STREAM)
        members = level_set.members
        y = members[int(rng.integers(0, len(members)))]
        x = CubePoint.from_index(int(rng.integers(0, 1 << f.m)), f.m)
        a = max(float(median), float(self.cube.evaluate(f, y)))
        return self.distance.verify_proof_chain(f, x, y, a).to_report()

    @staticmethod
    def _print_suite(suite: SuiteReport) -> None:
        print("\nconcentra verify-cube")
        print("=" * 64)
        print(f"{'inequality':<26}{'checked':>10}{'violations':>12}{'max lhs/bound':>16}")
        for report in suite.reports:
            print(
                f"{report.inequality:<26}{report.checked:>10}{len(report.violations):>12}"
                f"{report.max_lhs_over_bound:>16.6f}"
            )
        print("=" * 64)
        status = "PASSED" if suite.passed else "FAILED"
        print(f"{status} ({suite.violation_count} violations)")

    # ------------------------------------------------------------------
    # graph

    def graph(self, args: argparse.Namespace) -> int:
        """Cycle statistics, degree buckets and event E of one graph."""
        seed = args.seed if args.seed is not None else 0
        if args.edge_list:
            g = read_edge_list(args.edge_list)
        elif args.n is None or args.p is None:
            raise ValidationError("graph needs --n and --p, or --edge-list", "n")
        else:
            g = self.graphs.sample_graph(args.n, args.p, seed)

        stats = self.cycles.local_variance_cycles(g, args.k)
        row: Dict[str, Any] = {"n": g.n, "edges": g.edge_count, "k": args.k, "Z": stats.Z, "V": stats.V, "W": stats.W}
        payload: Dict[str, Any] = {
            "graph": {"n": g.n, "edges": g.edge_count, "source": args.edge_list or "sampled"},
            "statistics": CycleStatisticsModel(**stats.to_dict()).model_dump(),
        }
        if not args.edge_list:
            payload["graph"]["seed"] = seed

        lines = [f"n={g.n} edges={g.edge_count} k={args.k}", f"Z={stats.Z}", f"V={stats.V}", f"W={stats.W}"]
        if args.p is not None and g.n * args.p > 0:
            lines.extend(self._degree_section(g, args.p, stats, row, payload))
        if args.lemmas:
            lines.extend(self._lemma_section(g, args, seed, payload))

        if args.write_edges:
            write_edge_list(g, args.write_edges)
        if args.write_cycles:
            write_cycles(self.cycles.enumerate_cycles(g, args.k), args.write_cycles)

        print("\n".join(lines))
        if args.out:
            if args.format == "json":
                self.writer.write_json(payload, args.out)
            else:
                self.writer.write_table([row], GRAPH_COLUMNS, args.out)
        return EXIT_OK

    def _degree_section(
        self, g: Graph, p: float, stats: Any, row: Dict[str, Any], payload: Dict[str, Any]
    ) -> List[str]:
        np_value = g.n * p
        profile = self.graphs.degree_buckets(g, p)
        sizes = {j: profile.size(j) for j in profile.buckets}
        ratio = self.cycles.ratio_from_statistics(stats, np_value)
        max_degree = max(profile.degrees, default=0)
        row.update({"p": p, "np": np_value, "max_degree": max_degree, "t2_ratio": ratio})
        payload["degrees"] = {"np": np_value, "max_degree": max_degree, "buckets": sizes, "t2_ratio": ratio}

        lines = [
            f"np={np_value:.6g} max_degree={max_degree}",
            "buckets=" + " ".join(f"V_{j}:{size}" for j, size in sizes.items()),
            f"t2_ratio={ratio:.6g}",
        ]
        if np_value > E_POWER_E:
            event = self.graphs.event_E(g, p)
            row["event_E"] = event.holds
            payload["event_E"] = {
                "holds": event.holds,
                "degree_clause": event.degree_clause,
                "bucket_clause": event.bucket_clause,
                "thresholds": {str(j): t for j, t in event.thresholds.items()},
                "violating_buckets": event.violating_buckets,
            }
            lines.append(f"event_E={str(event.holds).lower()}")
        else:
            lines.append("event_E=n/a (np <= e^e)")
        return lines

    def _lemma_section(self, g: Graph, args: argparse.Namespace, seed: int, payload: Dict[str, Any]) -> List[str]:
        if args.p is None:
            raise ValidationError("--lemmas needs --p", "p")
        workers = self.config.threads
        estimates = [
            self.graphs.estimate_lemma1(g.n, args.p, args.trials, seed, workers),
            self.graphs.estimate_lemma2(g.n, args.p, args.trials, seed, args.c_constant, workers),
        ]
        payload["lemmas"] = [e.to_dict() for e in estimates]
        return [
            f"{e.lemma}: {e.hits}/{e.trials} freq={e.frequency:.4g} "
            f"ci=[{e.interval[0]:.4g}, {e.interval[1]:.4g}] bound {e.bound_label}={e.bound:.4g}"
            for e in estimates
        ]

    # ------------------------------------------------------------------
    # mc

    def mc(self, args: argparse.Namespace) -> int:
        """Seeded Monte Carlo; the report goes to --out or stdout."""
        experiment = self._experiment_config(args)
        progress = None if self.quiet else _progress_counter
        report = self.experiments.run(experiment, workers=experiment.threads, progress=progress)

        if args.out:
            self.writer.export_report(report, args.format, args.out)
            self._print_summary(report)
        else:
            sys.stdout.write(self.writer.render(report, args.format))
        return EXIT_OK

    def _experiment_config(self, args: argparse.Namespace) -> ExperimentConfig:
        overrides: Dict[str, Any] = {
            "n": args.n,
            "p": args.p,
            "np_value": args.np_value,
            "k": args.k,
            "trials": args.trials,
            "seed": args.seed,
            "c_constant": args.c_constant,
            "epsilon": args.epsilon,
            "theorem2_variant": args.t2_variant,
            "with_w": False if args.no_w else None,
            "record_timings": True if args.record_timings else None,
            "threads": self.config.threads,
            "output": args.out,
        }
        defaults = {"c_constant": self.config.default_c, "epsilon": self.config.default_epsilon}
        if args.config:
            return ExperimentConfig.from_file(args.config, overrides, defaults)
        values = {**defaults, **{key: value for key, value in overrides.items() if value is not None}}
        return ExperimentConfig.build(**values)

    @staticmethod
    def _print_summary(report: ExperimentReport) -> None:
        s: SummaryReport = report.summary
        config = report.config
        print(f"\nconcentra mc  n={config.n} p={config.edge_probability:.6g} np={config.mean_degree:.6g} k={config.k}")
        print("=" * 64)
        print(f"trials: {s.trials} (excluded {s.excluded})")
        print(f"mean Z: {s.mean_z:.6g}  95% CI [{s.mean_z_interval[0]:.6g}, {s.mean_z_interval[1]:.6g}]")
        print(f"closed-form E Z: {s.expected_z_closed_form:.6g}")
        print(f"median Z: {s.median_z:.6g}")
        print(
            f"P(Z >= {s.tail_threshold:.6g}): {s.tail_frequency:.4g}  "
            f"CI [{s.tail_interval[0]:.4g}, {s.tail_interval[1]:.4g}]"
        )
        if s.event_e_frequency is not None:
            print(f"event E frequency: {s.event_e_frequency:.4g}")
        else:
            print("event E frequency: n/a (np <= e^e)")
        print("t2 ratio quantiles: " + ", ".join(f"{q}={v:.4g}" for q, v in s.t2_ratio_quantiles.items()))
        if s.theorem3 is not None:
            t3 = s.theorem3
            print(
                f"shift a={t3.shift_a:.6g} mismatches={t3.mismatches} median/EZ={t3.median_ratio:.4g} "
                f"envelope violations={t3.envelope_violations}"
            )


def _progress_counter(done: int, total: int) -> None:
    """Plain counter on stderr."""
    end = "\n" if done == total else ""
    print(f"\rtrials {done}/{total}", end=end, file=sys.stderr, flush=True)


def _read_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise ReportError(f"Cannot read {path}: {e}", path)
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path} is not valid JSON: {e}", "input", path)


def _table_from_json(data: Any) -> FunctionTable:
    """{"m": m, "values": [2^m numbers in vertex-index order]}."""
    if not isinstance(data, dict) or "m" not in data or "values" not in data:
        raise ValidationError("A table needs the keys 'm' and 'values'", "table")
    values = np.asarray(data["values"])
    if values.dtype.kind not in "iuf":
        raise ValidationError("Table values must be numbers", "values")
    return FunctionTable(int(data["m"]), values)
