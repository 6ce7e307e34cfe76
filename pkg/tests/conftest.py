"""
Pytest configuration and fixtures for concentra tests.
"""

import json
import os
import sys
from pathlib import Path

# Add the project root to the Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

import pytest

from src.models.cube import MultilinearFunction
from src.models.graph import Graph
from src.services.cube_service import CubeService
from src.services.cycle_service import CycleService
from src.services.distance_service import DistanceService
from src.services.graph_service import GraphService
from src.utils.config import ENV_PREFIX, LabConfig


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch: pytest.MonkeyPatch) -> None:
    """Keep CONCENTRA_* settings of the calling shell out of the tests."""
    for key in list(os.environ):
        if key.startswith(ENV_PREFIX):
            monkeypatch.delenv(key, raising=False)


@pytest.fixture
def lab_config() -> LabConfig:
    """Default lab configuration."""
    return LabConfig()


@pytest.fixture
def cube_service(lab_config: LabConfig) -> CubeService:
    return CubeService(lab_config)


@pytest.fixture
def distance_service(lab_config: LabConfig, cube_service: CubeService) -> DistanceService:
    return DistanceService(lab_config, cube_service)


@pytest.fixture
def graph_service(lab_config: LabConfig) -> GraphService:
    return GraphService(lab_config)


@pytest.fixture
def cycle_service(lab_config: LabConfig, graph_service: GraphService) -> CycleService:
    return CycleService(lab_config, graph_service)


@pytest.fixture
def k4() -> Graph:
    """The complete graph on four vertices."""
    return Graph.complete(4)


@pytest.fixture
def majority3() -> MultilinearFunction:
    """x1 x2 + x1 x3 + x2 x3, a monotone function on the 3-cube."""
    return MultilinearFunction.from_terms(3, [([1, 2], 1), ([1, 3], 1), ([2, 3], 1)])


@pytest.fixture
def write_json(tmp_path: Path):
    """Write a JSON document under tmp_path and return its path as a string."""

    def _write(name: str, payload: object) -> str:
        path = tmp_path / name
        path.write_text(json.dumps(payload), encoding="utf-8")
        return str(path)

    return _write
