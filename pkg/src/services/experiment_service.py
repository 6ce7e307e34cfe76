"""
Monte Carlo experiment service.

Runs seeded G(n, p) trials, summarizes them, and carries out the
median-to-mean bookkeeping behind the cycle-count deviation bound.
"""

from typing import Dict, List, Optional, Tuple
import logging
import math
import time

import numpy as np

from src import __version__
from src.models.experiment import (
    ExperimentConfig,
    ExperimentReport,
    SummaryReport,
    Theorem3Check,
    TrialRecord,
)
from src.models.graph import Graph
from src.services.cycle_service import CycleService
from src.services.graph_service import E_POWER_E, GraphService, sample_presence
from src.utils.config import LabConfig
from src.utils.exceptions import ConcentraException, ReportError, ValidationError
from src.utils.logging_config import log_performance_metric, log_trial_event
from src.utils.parallel import ProgressCallback, ordered_map
from src.utils.rng import derive_seed
from src.utils.statistics import lower_median, normal_mean_interval, quantiles, standard_error, wilson_interval

RATIO_QUANTILES = (0.5, 0.9, 0.99)


def expected_cycles_closed_form(n: int, p: float, k: int) -> float:
    """E Z = n(n-1)...(n-k+1) / (2k) * p^k."""
    if not 3 <= k <= n:
        raise ValidationError(f"Cycle length must satisfy 3 <= k <= n = {n}", "k", k)
    return math.perm(n, k) / (2 * k) * p**k


def _run_trial(job: Tuple[int, int, ExperimentConfig, LabConfig]) -> TrialRecord:
    """One trial; module-level so worker processes can run it."""
    trial, seed, config, lab = job
    started = time.perf_counter()
    p = config.edge_probability
    np_value = config.mean_degree
    try:
        graphs = GraphService(lab)
        cycles = CycleService(lab, graphs)
        g = Graph(config.n, sample_presence(config.n, p, seed))
        stats = cycles.local_variance_cycles(g, config.k, with_w=config.with_w)
        event = graphs.event_E(g, p).holds if np_value > E_POWER_E else None
        record = TrialRecord(
            trial=trial,
            seed=seed,
            Z=stats.Z,
            V=stats.V,
            W=stats.W if (config.with_w or config.k == 3) else None,
            event_E=event,
            t2_ratio=CycleService.ratio_from_statistics(stats, np_value, config.theorem2_variant),
        )
    except ConcentraException as e:
        record = TrialRecord(trial=trial, seed=seed, error=str(e))
    if config.record_timings:
        record.runtime_ms = round((time.perf_counter() - started) * 1000.0, 3)
    return record


def theorem3_shift(median: float, np_value: float, k: int, epsilon: float, c_constant: float) -> float:
    """a = M - sqrt(C eps ((np)^k M + (np)^{2k}))."""
    if median < 0 or np_value < 0 or epsilon < 0 or c_constant < 0:
        raise ValidationError("theorem3_shift needs nonnegative inputs", "theorem3_shift")
    return median - _deviation_width(median, np_value, k, epsilon, c_constant)


def _deviation_width(z: float, np_value: float, k: int, epsilon: float, c_constant: float) -> float:
    return math.sqrt(c_constant * epsilon * (np_value**k * z + np_value ** (2 * k)))


def shifted_event_mismatches(
    values: List[int], median: float, np_value: float, k: int, epsilon: float, c_constant: float
) -> int:
    """
    Count Z where {Z >= a + sqrt(C eps ((np)^k Z + (np)^{2k}))} and
    {Z >= M} disagree, a being theorem3_shift(M, ...).
    """
    a = theorem3_shift(median, np_value, k, epsilon, c_constant)
    mismatches = 0
    for z in values:
        shifted = z - _deviation_width(z, np_value, k, epsilon, c_constant) >= a
        if shifted != (z >= median):
            mismatches += 1
    return mismatches


def dev_bound(np_value: float, c_constant: float = 1.0) -> Optional[float]:
    """exp(-(np)^2 / (C loglog np)); None where loglog np is not positive."""
    if np_value <= math.e or c_constant <= 0:
        return None
    return math.exp(-(np_value**2) / (c_constant * math.log(math.log(np_value))))


def baseline_bound(np_value: float, c_constant: float = 1.0) -> float:
    """The loglog-free comparison shape exp(-(np)^2 / C)."""
    if c_constant <= 0:
        return 0.0
    return math.exp(-(np_value**2) / c_constant)


class ExperimentService:
    """
    Seeded, order-independent Monte Carlo over G(n, p).
    """

    def __init__(self, config: Optional[LabConfig] = None, logger: Optional[logging.Logger] = None) -> None:
        self.config = config or LabConfig()
        self.logger = logger or logging.getLogger(__name__)

    def trial_seed(self, experiment: ExperimentConfig, trial: int) -> int:
        return derive_seed(experiment.seed, trial)

    def run_trials(
        self,
        experiment: ExperimentConfig,
        workers: Optional[int] = None,
        progress: Optional[ProgressCallback] = None,
    ) -> List[TrialRecord]:
        """
        Run every trial; records come back sorted by trial index and do not
        depend on the worker count.
        """
        workers = experiment.threads if workers is None else workers
        jobs = [(i, self.trial_seed(experiment, i), experiment, self.config) for i in range(experiment.trials)]
        started = time.perf_counter()
        records = ordered_map(_run_trial, jobs, workers, progress)
        records.sort(key=lambda r: r.trial)
        for record in records:
            log_trial_event(self.logger, record.trial, record.seed, Z=record.Z, excluded=record.excluded)
        excluded = sum(r.excluded for r in records)
        if excluded:
            self.logger.warning("Trials excluded by guards", extra={"excluded": excluded})
        log_performance_metric(
            self.logger, "trials_wall_time", round(time.perf_counter() - started, 3), "s", trials=len(records)
        )
        return records

    def summarize(self, records: List[TrialRecord], experiment: ExperimentConfig) -> SummaryReport:
        included = [r for r in records if not r.excluded]
        if not included:
            raise ReportError("No usable trial records to summarize")

        z = np.array([r.Z for r in included], dtype=float)
        mean, low, high = normal_mean_interval(z)
        median = lower_median(z)
        threshold = 2.0 * mean
        tail_hits = int(np.sum(z >= threshold))

        flags = [r.event_E for r in included if r.event_E is not None]
        event_freq = sum(flags) / len(flags) if flags else None
        event_interval = wilson_interval(sum(flags), len(flags)) if flags else None

        ratios = [r.t2_ratio for r in included]
        quantile_values = quantiles(ratios, RATIO_QUANTILES)
        ratio_quantiles: Dict[str, float] = {str(q): v for q, v in zip(RATIO_QUANTILES, quantile_values)}
        ratio_quantiles["max"] = float(max(ratios))

        closed_form = expected_cycles_closed_form(experiment.n, experiment.edge_probability, experiment.k)
        summary = SummaryReport(
            trials=len(records),
            excluded=len(records) - len(included),
            mean_z=mean,
            mean_z_interval=(low, high),
            mean_z_stderr=standard_error(z),
            median_z=median,
            expected_z_closed_form=closed_form,
            tail_threshold=threshold,
            tail_frequency=tail_hits / len(included),
            tail_interval=wilson_interval(tail_hits, len(included)),
            event_e_frequency=event_freq,
            event_e_interval=event_interval,
            t2_ratio_quantiles=ratio_quantiles,
            theorem3=self.theorem3_check([r.Z for r in included], median, closed_form, experiment),
        )
        self.logger.info(
            "Experiment summarized",
            extra={"trials": summary.trials, "excluded": summary.excluded, "mean_z": mean, "median_z": median},
        )
        return summary

    def theorem3_check(
        self, values: List[int], median: float, expected: float, experiment: ExperimentConfig
    ) -> Theorem3Check:
        """
        Shift level a, event-set mismatches, the median-vs-mean conclusion,
        and the count of records outside Z <= (1+eps) E Z + width(Z).
        """
        np_value = experiment.mean_degree
        k, eps, c = experiment.k, experiment.epsilon, experiment.c_constant
        envelope = sum(
            1 for z in values if z > (1.0 + eps) * expected + _deviation_width(z, np_value, k, eps, c)
        )
        return Theorem3Check(
            shift_a=theorem3_shift(median, np_value, k, eps, c),
            mismatches=shifted_event_mismatches(values, median, np_value, k, eps, c),
            median_ratio=median / expected if expected > 0 else 0.0,
            median_within_bound=median <= (1.0 + eps) * expected,
            envelope_violations=envelope,
            dev_bound=dev_bound(np_value, c),
            baseline_bound=baseline_bound(np_value, c),
        )

    def run(
        self,
        experiment: ExperimentConfig,
        workers: Optional[int] = None,
        progress: Optional[ProgressCallback] = None,
    ) -> ExperimentReport:
        records = self.run_trials(experiment, workers, progress)
        summary = self.summarize(records, experiment)
        return ExperimentReport(version=__version__, config=experiment, summary=summary, records=records)
