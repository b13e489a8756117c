"""Weighted directed multigraphs and their Laplacian matrices.

Conventions: edge ``l`` runs from ``tail`` to ``head`` with weight ``k_l > 0``.
The begin matrix ``B`` marks tails, the end matrix ``E`` marks heads, and the
incidence (boundary) matrix is ``E - B``.  With ``W = diag(k)``::

    L_in  =  E W (E - B)^T
    L_out = -B W (E - B)^T

so row ``i`` of ``L_out`` holds the out-degree of ``i`` on the diagonal and
``-k`` at the head of every edge leaving ``i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class GraphError(ValueError):
    """Raised for malformed graphs (bad indices, self-loops, nonpositive weights)."""


@dataclass(frozen=True)
class Edge:
    tail: int
    head: int
    weight: float = 1.0


@dataclass(frozen=True)
class DiGraph:
    """Weighted directed multigraph on vertices ``0 .. vertex_count - 1``.

    Parallel edges are kept as separate edges; their contributions add up in
    the Laplacians.  Self-loops are rejected because they contribute nothing
    to the incidence matrix or either Laplacian.
    """

    vertex_count: int
    edges: tuple[Edge, ...] = ()

    def __post_init__(self):
        if int(self.vertex_count) != self.vertex_count or self.vertex_count < 1:
            raise GraphError(f"vertex_count must be a positive integer, got {self.vertex_count!r}")
        edges = tuple(e if isinstance(e, Edge) else Edge(*e) for e in self.edges)
        for idx, e in enumerate(edges):
            for end in (e.tail, e.head):
                if not (0 <= end < self.vertex_count):
                    raise GraphError(f"edge {idx}: vertex {end} out of range [0, {self.vertex_count})")
            if e.tail == e.head:
                raise GraphError(f"edge {idx}: self-loop at vertex {e.tail} is not allowed")
            if not (np.isfinite(e.weight) and e.weight > 0):
                raise GraphError(f"edge {idx}: weight must be strictly positive, got {e.weight!r}")
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_edges(cls, vertex_count: int, edges: Iterable[Sequence[float]]) -> "DiGraph":
        """Build from ``(tail, head)`` or ``(tail, head, weight)`` tuples."""
        out = []
        for e in edges:
            if len(e) == 2:
                out.append(Edge(int(e[0]), int(e[1])))
            else:
                out.append(Edge(int(e[0]), int(e[1]), float(e[2])))
        return cls(vertex_count, tuple(out))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def weights(self) -> np.ndarray:
        return np.array([e.weight for e in self.edges], dtype=float)

    def successors(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for e in self.edges:
            adj[e.tail].append(e.head)
        return adj

    def reverse(self) -> "DiGraph":
        return reverse(self)


def reverse(g: DiGraph) -> DiGraph:
    """Swap tail and head of every edge, keeping weights and edge order."""
    return DiGraph(g.vertex_count, tuple(Edge(e.head, e.tail, e.weight) for e in g.edges))


@dataclass(frozen=True, eq=False)
class LaplacianMatrices:
    begin: np.ndarray
    end: np.ndarray
    incidence: np.ndarray  # integer dtype, E - B
    weights: np.ndarray  # e x e diagonal
    lap_in: np.ndarray
    lap_out: np.ndarray

    @property
    def undirected(self) -> np.ndarray:
        """``incidence @ W @ incidence.T``, equal to ``lap_in + lap_out``."""
        d = self.incidence.astype(float)
        return d @ self.weights @ d.T


def build_matrices(g: DiGraph) -> LaplacianMatrices:
    v, e = g.vertex_count, g.edge_count
    B = np.zeros((v, e), dtype=np.int64)
    E = np.zeros((v, e), dtype=np.int64)
    for l, edge in enumerate(g.edges):
        B[edge.tail, l] = 1
        E[edge.head, l] = 1
    D = E - B
    W = np.diag(g.weights) if e else np.zeros((0, 0))
    Df = D.astype(float)
    lap_in = E.astype(float) @ W @ Df.T
    lap_out = -(B.astype(float) @ W @ Df.T)
    # -0.0 entries are cosmetic noise from the sign flip
    lap_out = lap_out + 0.0
    for M in (B, E, D, W, lap_in, lap_out):
        M.setflags(write=False)
    return LaplacianMatrices(B, E, D, W, lap_in, lap_out)


def lap_in(g: DiGraph) -> np.ndarray:
    return build_matrices(g).lap_in


def lap_out(g: DiGraph) -> np.ndarray:
    return build_matrices(g).lap_out
