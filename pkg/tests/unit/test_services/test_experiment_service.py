"""
Unit tests for ExperimentService and the median-to-mean helpers.
"""

import math

import pytest

from src.models.experiment import ExperimentConfig, TrialRecord
from src.services.experiment_service import (
    ExperimentService,
    baseline_bound,
    dev_bound,
    expected_cycles_closed_form,
    shifted_event_mismatches,
    theorem3_shift,
)
from src.utils.config import LabConfig
from src.utils.exceptions import ReportError, ValidationError


@pytest.fixture
def service() -> ExperimentService:
    return ExperimentService(LabConfig())


class TestClosedForm:
    """Unit tests for E Z."""

    @pytest.mark.parametrize("n, k, expected", [(4, 3, 4.0), (5, 5, 12.0), (5, 4, 15.0)])
    def test_complete_graph(self, n: int, k: int, expected: float) -> None:
        """Test p = 1 recovers the cycle count of K_n."""
        assert expected_cycles_closed_form(n, 1.0, k) == pytest.approx(expected)

    def test_scales_with_p_to_the_k(self) -> None:
        """Test E Z = C(n, k) (k-1)!/2 p^k."""
        assert expected_cycles_closed_form(10, 0.5, 3) == pytest.approx(120 * 0.125)

    def test_length_checked(self) -> None:
        """Test 3 <= k <= n."""
        with pytest.raises(ValidationError):
            expected_cycles_closed_form(4, 0.5, 5)


class TestShiftHelpers:
    """Unit tests for the shift level and the bound shapes."""

    def test_shift(self) -> None:
        """Test a = M - sqrt(C eps ((np)^k M + (np)^{2k}))."""
        assert theorem3_shift(10.0, 2.0, 3, 0.5, 1.0) == pytest.approx(10.0 - math.sqrt(0.5 * (80.0 + 64.0)))

    def test_shift_needs_nonnegative_inputs(self) -> None:
        """Test negative medians are refused."""
        with pytest.raises(ValidationError):
            theorem3_shift(-1.0, 2.0, 3, 0.1, 1.0)

    def test_no_mismatch_when_width_vanishes(self) -> None:
        """Test C = 0 reduces the shifted event to Z >= M."""
        assert shifted_event_mismatches([1, 5, 9, 12], 9.0, 3.0, 3, 0.1, 0.0) == 0

    def test_dev_bound(self) -> None:
        """Test exp(-(np)^2 / (C loglog np)) and its undefined region."""
        assert dev_bound(2.0) is None
        assert dev_bound(20.0, 2.0) == pytest.approx(math.exp(-400.0 / (2.0 * math.log(math.log(20.0)))))

    def test_baseline_bound(self) -> None:
        """Test exp(-(np)^2 / C)."""
        assert baseline_bound(2.0, 4.0) == pytest.approx(math.exp(-1.0))
        assert baseline_bound(2.0, 0.0) == 0.0


class TestRunTrials:
    """Unit tests for run_trials."""

    def test_complete_graph_trials(self, service: ExperimentService) -> None:
        """Test p = 1 gives K_n in every trial."""
        config = ExperimentConfig(n=4, p=1.0, k=3, trials=3, seed=7)

        records = service.run_trials(config)

        assert [r.trial for r in records] == [0, 1, 2]
        assert all((r.Z, r.V, r.W) == (4, 24, 6) for r in records)
        assert all(r.event_E is None for r in records)
        assert all(r.runtime_ms is None for r in records)

    def test_seeds_are_derived(self, service: ExperimentService) -> None:
        """Test trial i uses derive_seed(master, i) and seeds differ."""
        config = ExperimentConfig(n=10, p=0.3, trials=4, seed=123)

        records = service.run_trials(config)

        assert [r.seed for r in records] == [service.trial_seed(config, i) for i in range(4)]
        assert len({r.seed for r in records}) == 4

    def test_worker_count_does_not_change_records(self, service: ExperimentService) -> None:
        """Test one and two workers give identical records."""
        config = ExperimentConfig(n=20, np_value=6.0, k=4, trials=6, seed=42)

        one = service.run_trials(config, workers=1)
        two = service.run_trials(config, workers=2)

        assert [r.model_dump() for r in one] == [r.model_dump() for r in two]

    def test_event_e_evaluated_above_e_to_the_e(self, service: ExperimentService) -> None:
        """Test np > e^e fills event_E."""
        config = ExperimentConfig(n=40, p=0.5, trials=2, seed=1)

        records = service.run_trials(config)

        assert all(r.event_E is True for r in records)

    def test_guard_exclusions(self) -> None:
        """Test trials refused by the enumeration guard are excluded, not fatal."""
        service = ExperimentService(LabConfig(cycle_guards={4: 5}))
        config = ExperimentConfig(n=6, p=0.5, k=4, trials=2)

        records = service.run_trials(config)

        assert all(r.excluded for r in records)

    def test_timings_recorded_on_request(self, service: ExperimentService) -> None:
        """Test record_timings fills runtime_ms."""
        config = ExperimentConfig(n=5, p=0.5, trials=2, record_timings=True)

        assert all(r.runtime_ms is not None for r in service.run_trials(config))


class TestSummarize:
    """Unit tests for summarize and run."""

    def test_complete_graph_summary(self, service: ExperimentService) -> None:
        """Test constant Z = E Z at p = 1."""
        config = ExperimentConfig(n=5, p=1.0, k=5, trials=4)

        report = service.run(config)
        summary = report.summary

        assert summary.mean_z == 12.0
        assert summary.median_z == 12.0
        assert summary.expected_z_closed_form == pytest.approx(12.0)
        assert summary.mean_z_interval == (12.0, 12.0)
        assert summary.tail_frequency == 0.0
        assert summary.theorem3.median_within_bound
        assert summary.theorem3.envelope_violations == 0
        assert set(summary.t2_ratio_quantiles) == {"0.5", "0.9", "0.99", "max"}

    def test_exclusions_counted(self, service: ExperimentService) -> None:
        """Test excluded records are left out of the aggregates."""
        config = ExperimentConfig(n=4, p=1.0, trials=2)
        records = [
            TrialRecord(trial=0, seed=1, Z=4, V=24, W=6, t2_ratio=0.1),
            TrialRecord(trial=1, seed=2, error="guard"),
        ]

        summary = service.summarize(records, config)

        assert summary.trials == 2
        assert summary.excluded == 1
        assert summary.mean_z == 4.0

    def test_nothing_to_summarize(self, service: ExperimentService) -> None:
        """Test all-excluded input is refused."""
        config = ExperimentConfig(n=4, p=1.0, trials=1)

        with pytest.raises(ReportError):
            service.summarize([TrialRecord(trial=0, seed=1, error="guard")], config)
