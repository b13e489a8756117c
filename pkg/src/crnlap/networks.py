"""Small reference networks used by tests, scripts and the CLI."""

from __future__ import annotations

from importlib import resources

import numpy as np

from .graph import DiGraph
from .model import CrnSystem
from .parse import load

# 1-based edge list of the seven-vertex graph whose unit-weight out-degree
# Laplacian has kernel span{gamma, 1 - gamma}, gamma = (0,0,1,1,1,1/3,2/3).
FIGURE_GRAPH_EDGES = ((2, 1), (6, 1), (6, 7), (7, 6), (7, 3), (4, 3), (5, 4), (3, 5))

EXAMPLE2_S = np.array(
    [
        [0, 0, 3, 3, 3, 1, 2],
        [1, 1, 0, 0, 0, 0, 0],
        [0, 2, 0, 3, 0, 0, 0],
        [0, 0, 3, 0, 0, 0, 2],
        [0, 0, 3, 0, 0, 1, 0],
        [0, 0, 0, 0, 3, 0, 0],
    ]
)


def data_path(name: str):
    return resources.files("crnlap") / "data" / name


def figure_graph(weights=None) -> DiGraph:
    weights = [1.0] * len(FIGURE_GRAPH_EDGES) if weights is None else list(weights)
    return DiGraph.from_edges(7, [(a - 1, b - 1, w) for (a, b), w in zip(FIGURE_GRAPH_EDGES, weights)])


def example1(k=(1.0, 2.0, 3.0, 4.0)) -> CrnSystem:
    """``X1 -> 2X1 -> X1``, ``X2 -> 2X2 -> X2`` with rates ``k1..k4``."""
    S = np.array([[1, 2, 0, 0], [0, 0, 1, 2]])
    g = DiGraph.from_edges(4, [(0, 1, k[0]), (1, 0, k[1]), (2, 3, k[2]), (3, 2, k[3])])
    return CrnSystem(("X1", "X2"), S, g)


def example2(weights=None) -> CrnSystem:
    species = tuple(f"X{i}" for i in range(1, 7))
    return CrnSystem(species, EXAMPLE2_S, figure_graph(weights))


def star(k: int, weights=None) -> CrnSystem:
    """Star graph: centre ``2A`` with ``k`` edges to leaves ``A`` (repeated complex)."""
    if k < 1:
        raise ValueError("star graph needs at least one leaf")
    weights = [1.0] * k if weights is None else list(weights)
    S = np.array([[2.0] + [1.0] * k])
    g = DiGraph.from_edges(k + 1, [(0, j + 1, w) for j, w in enumerate(weights)])
    labels = ("2 A",) + tuple("A" + "'" * j for j in range(k))
    return CrnSystem(("A",), S, g, labels, distinct_complexes=False)


def two_state(k1: float = 1.0, k2: float = 1.0) -> CrnSystem:
    """``A <-> B`` with forward rate ``k1`` and reverse rate ``k2``."""
    g = DiGraph.from_edges(2, [(0, 1, k1), (1, 0, k2)])
    return CrnSystem(("A", "B"), np.eye(2), g)


def shipped(name: str) -> CrnSystem:
    """Load one of the bundled network files by name, e.g. ``"ex1.crn"``."""
    with resources.as_file(data_path(name)) as p:
        return load(p)
