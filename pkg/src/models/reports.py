"""
JSON wire schemas for verification reports.
"""

from typing import Any, Dict, Iterable, List

from pydantic import BaseModel, Field

from src import __version__


class Violation(BaseModel):
    """One grid point where the checked inequality failed."""

    location: Dict[str, Any]
    lhs: float
    bound: float


class VerificationReport(BaseModel):
    """Outcome of one exhaustive inequality check."""

    inequality: str
    grid: List[float] = Field(default_factory=list)
    max_lhs_over_bound: float = 0.0
    violations: List[Violation] = Field(default_factory=list)
    checked: int = 0
    parameters: Dict[str, Any] = Field(default_factory=dict)
    version: str = __version__

    @property
    def passed(self) -> bool:
        return not self.violations

    @classmethod
    def combine(
        cls, inequality: str, reports: Iterable["VerificationReport"], parameters: Dict[str, Any]
    ) -> "VerificationReport":
        """Merge per-instance reports; grid values are unioned and sorted."""
        grid: set = set()
        violations: List[Violation] = []
        checked = 0
        worst = 0.0
        for report in reports:
            grid.update(report.grid)
            violations.extend(report.violations)
            checked += report.checked
            worst = max(worst, report.max_lhs_over_bound)
        return cls(
            inequality=inequality,
            grid=sorted(grid),
            max_lhs_over_bound=worst,
            violations=violations,
            checked=checked,
            parameters=parameters,
        )


class SuiteReport(BaseModel):
    """Everything one `verify-cube` run checked."""

    version: str = __version__
    config: Dict[str, Any] = Field(default_factory=dict)
    reports: List[VerificationReport] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(report.passed for report in self.reports)

    @property
    def violation_count(self) -> int:
        return sum(len(report.violations) for report in self.reports)


class CycleStatisticsModel(BaseModel):
    """Serialized CycleStatistics."""

    k: int
    Z: int
    V: int
    W: int
    per_edge_histogram: List[int] = Field(default_factory=list)
