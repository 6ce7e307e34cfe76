"""
Random graph service.

G(n, p) sampling over the colex edge enumeration, degree buckets, the
event E used by the cycle-count bound, and Monte Carlo estimators for
the two degree lemmas.
"""

from typing import Dict, Optional, Tuple
import logging
import math

import numpy as np

from src.models.graph import DegreeProfile, EventEResult, Graph, LemmaEstimate, edge_index, edge_slots
from src.utils.config import LabConfig
from src.utils.exceptions import GuardError, ValidationError
from src.utils.parallel import ordered_map
from src.utils.rng import EDGE_STREAM, derive_seed, uniform_draws
from src.utils.statistics import wilson_interval

E_POWER_E = math.exp(math.e)
_LOG_SLACK = 1e-12
_DEGREE_TOLERANCE = 1e-9


def _check_parameters(n: int, p: float) -> None:
    if n < 2:
        raise ValidationError("G(n, p) needs n >= 2", "n", n)
    if not 0.0 <= p <= 1.0:
        raise ValidationError("p must lie in [0, 1]", "p", p)


def sample_presence(n: int, p: float, seed: int) -> np.ndarray:
    """Edge e is present iff the e-th uniform of the (seed, edges) stream is < p."""
    _check_parameters(n, p)
    return uniform_draws(seed, edge_slots(n), EDGE_STREAM) < p


def bucket_index(degree: int, np_value: float) -> int:
    """
    Bucket of a vertex with the given degree.

    V_1 takes every degree below 16np; otherwise j >= 2 is the unique
    index with 2^{j+2} np <= d < 2^{j+3} np.
    """
    if degree < 16 * np_value:
        return 1
    j = max(2, int(math.floor(math.log2(degree / np_value))) - 2)
    # floating log2 can land one off at the interval edges
    while degree < (2 ** (j + 2)) * np_value and j > 2:
        j -= 1
    while degree >= (2 ** (j + 3)) * np_value:
        j += 1
    return j


def bucket_ceiling(np_value: float, log_base: float = 2.0) -> int:
    """Largest j with j <= log_base(np)."""
    if np_value <= 1.0:
        return 0
    return int(math.floor(math.log(np_value) / math.log(log_base) + _LOG_SLACK))


def bucket_thresholds(np_value: float, log_base: float = 2.0, loglog_base: float = math.e) -> Dict[int, float]:
    """np / (j 2^j loglog np) for 2 <= j <= log(np)."""
    ceiling = bucket_ceiling(np_value, log_base)
    if ceiling < 2:
        return {}
    loglog = math.log(math.log(np_value, loglog_base), loglog_base)
    if loglog <= 0:
        raise GuardError("loglog np must be positive for the bucket thresholds", "loglog_np", np_value)
    return {j: np_value / (j * 2**j * loglog) for j in range(2, ceiling + 1)}


def _lemma_trial(job: Tuple[int, float, int, float, float]) -> Tuple[bool, bool]:
    """(degree event, bucket event) for one seed; module-level for worker pools."""
    n, p, seed, log_base, loglog_base = job
    degrees = Graph(n, sample_presence(n, p, seed)).degrees()
    np_value = n * p
    degree_event = bool(degrees.max(initial=0) >= np_value**2 - _DEGREE_TOLERANCE)
    bucket_event = False
    thresholds = bucket_thresholds(np_value, log_base, loglog_base) if np_value > 0 else {}
    if thresholds:
        sizes: Dict[int, int] = {}
        for d in degrees.tolist():
            j = bucket_index(d, np_value)
            sizes[j] = sizes.get(j, 0) + 1
        bucket_event = any(sizes.get(j, 0) >= t for j, t in thresholds.items())
    return degree_event, bucket_event


class GraphService:
    """
    Sampling and degree statistics of G(n, p).
    """

    def __init__(self, config: Optional[LabConfig] = None, logger: Optional[logging.Logger] = None) -> None:
        self.config = config or LabConfig()
        self.logger = logger or logging.getLogger(__name__)

    def sample_graph(self, n: int, p: float, seed: int) -> Graph:
        """
        Draw G(n, p); identical (n, p, seed) gives the identical graph.
        """
        graph = Graph(n, sample_presence(n, p, seed))
        self.logger.debug("Sampled graph", extra={"n": n, "p": p, "seed": seed, "edges": graph.edge_count})
        return graph

    @staticmethod
    def edge_index(u: int, v: int) -> int:
        return edge_index(u, v)

    def degree_buckets(self, g: Graph, p: float) -> DegreeProfile:
        np_value = g.n * p
        if np_value <= 0:
            raise ValidationError("Degree buckets need np > 0", "np", np_value)
        degrees = tuple(int(d) for d in g.degrees())
        members: Dict[int, set] = {1: set()}
        for v, d in enumerate(degrees):
            members.setdefault(bucket_index(d, np_value), set()).add(v)
        buckets = {j: frozenset(vs) for j, vs in sorted(members.items())}
        return DegreeProfile(degrees=degrees, np_value=np_value, buckets=buckets)

    def event_E(self, g: Graph, p: float) -> EventEResult:
        """
        Evaluate E = {max degree <= (np)^2} and {card V_j <= threshold_j
        for 2 <= j <= log np}.

        Raises:
            GuardError: If np <= e^e
        """
        np_value = g.n * p
        if np_value <= E_POWER_E:
            raise GuardError(f"Event E needs np > e^e, got np = {np_value:.4g}", "np > e^e", np_value)
        profile = self.degree_buckets(g, p)
        thresholds = bucket_thresholds(np_value, self.config.bucket_log_base, self.config.loglog_base)
        sizes = {j: profile.size(j) for j in thresholds}
        max_degree = max(profile.degrees, default=0)
        bound = np_value**2
        holds = max_degree <= bound and all(sizes[j] <= t for j, t in thresholds.items())
        return EventEResult(
            holds=holds,
            max_degree=max_degree,
            max_degree_bound=bound,
            bucket_sizes=sizes,
            thresholds=thresholds,
            np_value=np_value,
        )

    def _run_lemma_trials(self, n: int, p: float, trials: int, seed: int, workers: int) -> Tuple[int, int]:
        _check_parameters(n, p)
        if trials < 1:
            raise ValidationError("trials must be positive", "trials", trials)
        jobs = [
            (n, p, derive_seed(seed, i), self.config.bucket_log_base, self.config.loglog_base)
            for i in range(trials)
        ]
        outcomes = ordered_map(_lemma_trial, jobs, workers)
        return sum(a for a, _ in outcomes), sum(b for _, b in outcomes)

    def estimate_lemma1(self, n: int, p: float, trials: int, seed: int, workers: int = 1) -> LemmaEstimate:
        """
        Frequency of {some vertex has d_v >= (np)^2} against exp(-(np)^2 / 2).
        """
        hits, _ = self._run_lemma_trials(n, p, trials, seed, workers)
        np_value = n * p
        estimate = LemmaEstimate(
            lemma="lemma1_max_degree",
            trials=trials,
            hits=hits,
            interval=wilson_interval(hits, trials),
            bound=math.exp(-(np_value**2) / 2.0),
            bound_label="exp(-(np)^2/2)",
        )
        self.logger.info("Lemma 1 estimate", extra=estimate.to_dict())
        return estimate

    def estimate_lemma2(
        self,
        n: int,
        p: float,
        trials: int,
        seed: int,
        c_constant: float = 1.0,
        workers: int = 1,
    ) -> LemmaEstimate:
        """
        Frequency of {some 2 <= j <= log np has card V_j >= threshold_j}
        reported next to exp(-(np)^2 / (C loglog np)).
        """
        if c_constant <= 0:
            raise ValidationError("C must be positive", "c_constant", c_constant)
        _, hits = self._run_lemma_trials(n, p, trials, seed, workers)
        np_value = n * p
        bound = self.lemma2_bound_shape(np_value, c_constant)
        estimate = LemmaEstimate(
            lemma="lemma2_buckets",
            trials=trials,
            hits=hits,
            interval=wilson_interval(hits, trials),
            bound=bound,
            bound_label="exp(-(np)^2/(C loglog np))",
            c_constant=c_constant,
        )
        self.logger.info("Lemma 2 estimate", extra=estimate.to_dict())
        return estimate

    def lemma2_bound_shape(self, np_value: float, c_constant: float = 1.0) -> float:
        """exp(-(np)^2 / (C loglog np)); 1.0 where loglog np is not positive."""
        if np_value <= math.e:
            return 1.0
        loglog = math.log(math.log(np_value, self.config.loglog_base), self.config.loglog_base)
        if loglog <= 0:
            return 1.0
        return math.exp(-(np_value**2) / (c_constant * loglog))

    @staticmethod
    def lemma1_vertex_bound(n: int, p: float) -> Dict[str, float]:
        """
        Single-vertex tail e^{-(np)^2} (meaningful for np >= 4) and the
        union-bound form e^{-(np)^2/2}.
        """
        _check_parameters(n, p)
        np_value = n * p
        return {
            "np": np_value,
            "single_vertex": math.exp(-(np_value**2)),
            "union": math.exp(-(np_value**2) / 2.0),
            "valid": np_value >= 4.0,
        }
