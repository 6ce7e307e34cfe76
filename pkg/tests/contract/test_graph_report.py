"""
Contract tests for the `concentra graph` outputs.
"""

import json
from pathlib import Path

from src.cli.main import main
from src.services.graph_io import read_edge_list


class TestGraphReportContract:
    """Contract tests for graph statistics and edge-list files."""

    def test_json_report(self, tmp_path: Path) -> None:
        """
        Test the JSON statistics layout.

        GIVEN a sampled graph with np > e^e
        WHEN writing the report as JSON
        THEN it carries graph, statistics, degrees and event_E sections
        """
        out = tmp_path / "g.json"
        assert main(["graph", "--n", "40", "--p", "0.5", "--seed", "2", "--out", str(out), "--quiet"]) == 0

        payload = json.loads(out.read_text())

        assert payload["graph"]["n"] == 40
        assert set(payload["statistics"]) == {"k", "Z", "V", "W", "per_edge_histogram"}
        assert payload["degrees"]["np"] == 20.0
        assert set(payload["event_E"]) == {
            "holds",
            "degree_clause",
            "bucket_clause",
            "thresholds",
            "violating_buckets",
        }

    def test_edge_list_round_trip(self, tmp_path: Path) -> None:
        """
        Test --write-edges output is readable by --edge-list.

        GIVEN a sampled graph written with --write-edges
        WHEN reading it back through the graph command
        THEN the statistics are unchanged
        """
        edges = tmp_path / "g.txt"
        first, second = tmp_path / "a.json", tmp_path / "b.json"
        assert main(["graph", "--n", "12", "--p", "0.5", "--seed", "4", "--write-edges", str(edges),
                     "--out", str(first), "--quiet"]) == 0
        assert main(["graph", "--edge-list", str(edges), "--out", str(second), "--quiet"]) == 0

        assert json.loads(first.read_text())["statistics"] == json.loads(second.read_text())["statistics"]
        assert read_edge_list(edges).n == 12
