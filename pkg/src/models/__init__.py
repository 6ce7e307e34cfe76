"""
Data models for concentra.

Cube points, multilinear functions and product measures; vertex sets
and convex-distance results; graphs, cycles and partitions; report and
experiment schemas.
"""

from src.models.cube import CubePoint, FunctionTable, MultilinearFunction, ProductMeasure
from src.models.distance import DistanceResult, GeneratorSet, VertexSet
from src.models.graph import Graph

__all__ = [
    "CubePoint",
    "DistanceResult",
    "FunctionTable",
    "GeneratorSet",
    "Graph",
    "MultilinearFunction",
    "ProductMeasure",
    "VertexSet",
]
