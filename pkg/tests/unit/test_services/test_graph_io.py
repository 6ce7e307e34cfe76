"""
Unit tests for edge-list import and export.
"""

import pytest

from src.models.cycles import CycleSet
from src.models.graph import Graph
from src.services.graph_io import format_edge_list, parse_edge_list, read_edge_list, write_cycles, write_edge_list
from src.utils.exceptions import ReportError, ValidationError


class TestEdgeList:
    """Unit tests for the edge-list format."""

    def test_parse(self) -> None:
        """Test header, comments and blank lines."""
        graph = parse_edge_list('{"n": 4}\n# triangle\n0 1\n\n1 2\n2 0\n')

        assert graph.n == 4
        assert graph.edge_count == 3
        assert graph.degree(3) == 0

    def test_header_only(self) -> None:
        """Test an edge list with no edges."""
        assert parse_edge_list('{"n": 5}\n') == Graph.empty(5)

    def test_format(self) -> None:
        """Test edges are written in colex order."""
        text = format_edge_list(Graph.from_edges(3, [(1, 2), (0, 1)]))

        assert text == '{"n": 3}\n0 1\n1 2\n'

    @pytest.mark.parametrize(
        "text",
        ["", "0 1\n", '{"m": 3}\n', '{"n": 3}\n0 1 2\n', '{"n": 3}\n0 x\n', '{"n": 3}\n0 3\n'],
    )
    def test_malformed(self, text: str) -> None:
        """Test malformed documents are rejected."""
        with pytest.raises(ValidationError):
            parse_edge_list(text)

    def test_file_round_trip(self, tmp_path) -> None:
        """Test write_edge_list then read_edge_list."""
        graph = Graph.from_edges(6, [(0, 5), (2, 3), (1, 4)])
        path = tmp_path / "nested" / "g.txt"

        write_edge_list(graph, path)

        assert read_edge_list(path) == graph

    def test_missing_file(self, tmp_path) -> None:
        """Test an unreadable file is a report error."""
        with pytest.raises(ReportError):
            read_edge_list(tmp_path / "absent.txt")

    def test_write_cycles(self, tmp_path) -> None:
        """Test one cycle per line."""
        path = tmp_path / "cycles.txt"

        write_cycles(CycleSet(k=3, n=4, cycles=((0, 1, 2), (1, 2, 3))), path)

        assert path.read_text() == "0 1 2\n1 2 3\n"
