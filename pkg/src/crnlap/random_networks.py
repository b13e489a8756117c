"""Random graphs and networks for property checks."""

from __future__ import annotations

import numpy as np

from .deficiency import laplacian_deficiency
from .graph import DiGraph
from .model import CrnSystem


def random_digraph(rng: np.random.Generator, max_vertices: int = 8, max_edges: int | None = None) -> DiGraph:
    v = int(rng.integers(1, max_vertices + 1))
    if v == 1:
        return DiGraph(1)
    max_edges = 2 * v if max_edges is None else max_edges
    e = int(rng.integers(0, max_edges + 1))
    edges = []
    for _ in range(e):
        a, b = rng.choice(v, size=2, replace=False)
        edges.append((int(a), int(b), float(rng.uniform(0.1, 5.0))))
    return DiGraph.from_edges(v, edges)


def random_stoich(rng: np.random.Generator, c: int, v: int, max_coef: int = 3, max_tries: int = 200) -> np.ndarray:
    """Nonnegative integer ``c x v`` matrix with no zero rows and distinct columns."""
    for _ in range(max_tries):
        S = rng.integers(0, max_coef + 1, size=(c, v))
        for j in range(c):
            if not S[j].any():
                S[j, rng.integers(v)] = int(rng.integers(1, max_coef + 1))
        if len({S[:, i].tobytes() for i in range(v)}) == v:
            return S
    raise RuntimeError("could not draw distinct complexes; increase max_coef or c")


def random_system(rng: np.random.Generator, max_vertices: int = 7, max_species: int = 5) -> CrnSystem:
    g = random_digraph(rng, max_vertices)
    v = g.vertex_count
    c = int(rng.integers(1, max_species + 1))
    # distinct columns need enough room: (max_coef+1)^c > v
    while 4**c <= v:
        c += 1
    S = random_stoich(rng, c, v)
    return CrnSystem(tuple(f"X{i + 1}" for i in range(c)), S, g)


def random_csc_graph(rng: np.random.Generator, max_components: int = 3, max_size: int = 4) -> DiGraph:
    """Disjoint union of strongly connected pieces (a random cycle plus chords each)."""
    edges = []
    offset = 0
    for _ in range(int(rng.integers(1, max_components + 1))):
        n = int(rng.integers(2, max_size + 1))
        order = rng.permutation(n) + offset
        for i in range(n):
            edges.append((int(order[i]), int(order[(i + 1) % n]), float(rng.uniform(0.2, 5.0))))
        for _ in range(int(rng.integers(0, n + 1))):
            a, b = rng.choice(n, size=2, replace=False) + offset
            edges.append((int(a), int(b), float(rng.uniform(0.2, 5.0))))
        offset += n
    return DiGraph.from_edges(offset, edges)


def random_csc_zero_deficiency(
    rng: np.random.Generator,
    max_components: int = 3,
    max_size: int = 4,
    max_species: int = 6,
    max_tries: int = 500,
    max_coef: int = 3,
) -> CrnSystem:
    """CSC network with integer ``S`` and zero Laplacian deficiency (rejection sampling)."""
    for _ in range(max_tries):
        g = random_csc_graph(rng, max_components, max_size)
        v = g.vertex_count
        c = int(rng.integers(1, max_species + 1))
        while (max_coef + 1) ** c <= v:
            c += 1
        try:
            S = random_stoich(rng, c, v, max_coef=max_coef)
        except RuntimeError:
            continue
        sys = CrnSystem(tuple(f"X{i + 1}" for i in range(c)), S, g)
        if laplacian_deficiency(sys) == 0:
            return sys
    raise RuntimeError("no zero-deficiency network found")
