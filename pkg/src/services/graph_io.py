"""
Edge-list import/export.

Format: a JSON header line {"n": <int>} followed by one "u v" pair per
line, 0-based. Blank lines and lines starting with '#' are skipped.
"""

from pathlib import Path
from typing import List, Tuple, Union
import json
import logging

from src.models.cycles import CycleSet
from src.models.graph import Graph
from src.utils.exceptions import ReportError, ValidationError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def parse_edge_list(text: str) -> Graph:
    """Parse edge-list text into a Graph."""
    lines = [line.strip() for line in text.splitlines()]
    lines = [line for line in lines if line and not line.startswith("#")]
    if not lines:
        raise ValidationError("Edge list is missing its JSON header", "header")
    try:
        header = json.loads(lines[0])
        n = int(header["n"])
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise ValidationError(f"Invalid edge-list header: {e}", "header", lines[0])

    edges: List[Tuple[int, int]] = []
    for number, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if len(parts) != 2:
            raise ValidationError(f"Line {number}: expected 'u v'", "edge", line)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValidationError(f"Line {number}: endpoints must be integers", "edge", line)
        edges.append((u, v))
    return Graph.from_edges(n, edges)


def format_edge_list(graph: Graph) -> str:
    lines = [json.dumps({"n": graph.n})]
    lines.extend(f"{u} {v}" for u, v in graph.edges())
    return "\n".join(lines) + "\n"


def read_edge_list(path: PathLike) -> Graph:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ReportError(f"Cannot read edge list: {e}", str(path))
    graph = parse_edge_list(text)
    logger.info("Loaded edge list", extra={"path": str(path), "n": graph.n, "edges": graph.edge_count})
    return graph


def _write_text(path: PathLike, text: str) -> None:
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8")
    except OSError as e:
        raise ReportError(f"Cannot write {target}: {e}", str(target))


def write_edge_list(graph: Graph, path: PathLike) -> None:
    _write_text(path, format_edge_list(graph))


def write_cycles(cycles: CycleSet, path: PathLike) -> None:
    """One canonical cycle per line, vertices separated by spaces."""
    _write_text(path, "".join(f"{line}\n" for line in cycles.to_lines()))
