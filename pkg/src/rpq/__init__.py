"""In-memory regular path query engine over property graphs."""

from .engine import ResultSet, SessionConfig, run
from .graph import Graph, build_graph, default_graph, load_graph
from .parser import QueryError, parse
from .path import Path, PathSet, Semantic

__all__ = [
    "Graph",
    "Path",
    "PathSet",
    "QueryError",
    "ResultSet",
    "Semantic",
    "SessionConfig",
    "build_graph",
    "default_graph",
    "load_graph",
    "parse",
    "run",
]

__version__ = "0.1.0"
