"""
Monte Carlo experiment schemas.

ExperimentConfig doubles as the JSON config-file format of `concentra mc`.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError as PydanticValidationError, model_validator

from src import __version__
from src.utils.exceptions import ConfigurationError, ValidationError

QUANTILE_LABELS = ("0.5", "0.9", "0.99", "max")


class ExperimentConfig(BaseModel):
    """
    Parameters of one Monte Carlo sweep.

    Exactly one of `p` and `np_value` is given; the other is derived via
    p = np_value / n.
    """

    model_config = ConfigDict(extra="forbid")

    n: int = Field(ge=2)
    p: Optional[float] = None
    np_value: Optional[float] = None
    k: int = Field(default=3, ge=3)
    trials: int = Field(default=100, ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)
    c_constant: float = Field(default=1.0, ge=0.0)
    epsilon: float = Field(default=0.1, gt=0.0)
    theorem2_variant: Literal["stated", "proof"] = "stated"
    with_w: bool = True
    record_timings: bool = False
    threads: int = Field(default=1, ge=1)
    output: Optional[str] = None

    @model_validator(mode="after")
    def _resolve_probability(self) -> "ExperimentConfig":
        if self.p is None and self.np_value is None:
            raise ValueError("one of p or np_value is required")
        if self.p is None:
            self.p = self.np_value / self.n
        elif self.np_value is None:
            self.np_value = self.n * self.p
        elif abs(self.np_value - self.n * self.p) > 1e-9 * max(1.0, self.np_value):
            raise ValueError("p and np_value disagree")
        if not 0.0 < self.p <= 1.0:
            raise ValueError("p must lie in (0, 1]")
        if self.k > self.n:
            raise ValueError("k cannot exceed n")
        return self

    @property
    def edge_probability(self) -> float:
        assert self.p is not None
        return self.p

    @property
    def mean_degree(self) -> float:
        """np, the scale parameter of every bound."""
        return self.n * self.edge_probability

    def fingerprint(self) -> Dict[str, Any]:
        """Fields that determine the trial outcomes (threads and paths excluded)."""
        return self.model_dump(exclude={"threads", "output"})

    @classmethod
    def from_file(
        cls,
        path: str,
        overrides: Optional[Dict[str, Any]] = None,
        defaults: Optional[Dict[str, Any]] = None,
    ) -> "ExperimentConfig":
        """Load a JSON config; file values win over defaults, non-None overrides over both."""
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigurationError(f"Cannot read experiment config {path}: {e}", "config")
        if not isinstance(data, dict):
            raise ConfigurationError("Experiment config must be a JSON object", "config")
        # lab settings may share the file
        data = {**(defaults or {}), **{key: value for key, value in data.items() if key in cls.model_fields}}
        if overrides:
            data.update({key: value for key, value in overrides.items() if value is not None})
            # an explicit p on the command line replaces a file-level np_value and vice versa
            if overrides.get("p") is not None and overrides.get("np_value") is None:
                data.pop("np_value", None)
            if overrides.get("np_value") is not None and overrides.get("p") is None:
                data.pop("p", None)
        return cls.build(**data)

    @classmethod
    def build(cls, **values: Any) -> "ExperimentConfig":
        """Construct, translating pydantic failures into the lab's ValidationError."""
        try:
            return cls(**values)
        except PydanticValidationError as e:
            raise ValidationError(f"Invalid experiment config: {e.errors()[0]['msg']}", "config", values)


class TrialRecord(BaseModel):
    """One G(n, p) draw. `error` is set when the trial was excluded."""

    trial: int
    seed: int
    Z: int = 0
    V: int = 0
    W: Optional[int] = None
    event_E: Optional[bool] = None
    t2_ratio: float = 0.0
    runtime_ms: Optional[float] = None
    error: Optional[str] = None

    @property
    def excluded(self) -> bool:
        return self.error is not None


class Theorem3Check(BaseModel):
    """Bookkeeping of the median-to-mean argument on the sampled Z values."""

    shift_a: float
    mismatches: int
    median_ratio: float
    median_within_bound: bool
    envelope_violations: int
    dev_bound: Optional[float]
    baseline_bound: float


class SummaryReport(BaseModel):
    """Aggregates over the non-excluded trials."""

    trials: int
    excluded: int
    mean_z: float
    mean_z_interval: Tuple[float, float]
    mean_z_stderr: float
    median_z: float
    expected_z_closed_form: float
    tail_threshold: float
    tail_frequency: float
    tail_interval: Tuple[float, float]
    event_e_frequency: Optional[float] = None
    event_e_interval: Optional[Tuple[float, float]] = None
    t2_ratio_quantiles: Dict[str, float] = Field(default_factory=dict)
    theorem3: Optional[Theorem3Check] = None


class ExperimentReport(BaseModel):
    """Full output of `concentra mc`: config, summary and every record."""

    version: str = __version__
    config: ExperimentConfig
    summary: SummaryReport
    records: List[TrialRecord]

    def included_records(self) -> List[TrialRecord]:
        return [r for r in self.records if not r.excluded]
