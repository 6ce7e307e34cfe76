"""
Integration test: Monte Carlo reports do not depend on the worker count.
"""

from pathlib import Path

from src.cli.main import main


class TestThreadDeterminism:
    """Integration tests for reproducible reports."""

    def test_csv_identical_for_one_and_eight_workers(self, tmp_path: Path, capsys) -> None:
        """
        Test byte identity of the CSV report.

        GIVEN a fixed seed and experiment
        WHEN running mc with --threads 1 and --threads 8
        THEN the two CSV files are byte-identical
        """
        args = ["mc", "--n", "30", "--np", "6", "--k", "4", "--trials", "16", "--seed", "11", "--quiet"]
        one, eight = tmp_path / "one.csv", tmp_path / "eight.csv"

        assert main(args + ["--format", "csv", "--out", str(one), "--threads", "1"]) == 0
        assert main(args + ["--format", "csv", "--out", str(eight), "--threads", "8"]) == 0

        assert one.read_bytes() == eight.read_bytes()
        assert one.read_text(encoding="utf-8").count("\n") == 4 + 1 + 16
