"""Strong/weak components, reaches, cabals, and the CSC test.

A reach is a maximal reachable set; its cabal is the set of vertices from
which the whole reach is reachable.  Reaches are exactly the sets reachable
from the source components of the condensation, and those source components
are the cabals.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .graph import DiGraph, reverse

VertexSet = frozenset


def _sorted_sets(sets) -> list[frozenset]:
    return sorted((frozenset(s) for s in sets), key=min)


def strong_components(g: DiGraph) -> list[frozenset]:
    """Tarjan's algorithm (iterative), components ordered by smallest member."""
    adj = g.successors()
    n = g.vertex_count
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[frozenset] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            node, pos = work.pop()
            if pos == 0:
                index[node] = low[node] = counter
                counter += 1
                stack.append(node)
                on_stack[node] = True
            recurse = False
            nbrs = adj[node]
            while pos < len(nbrs):
                w = nbrs[pos]
                pos += 1
                if index[w] == -1:
                    work.append((node, pos))
                    work.append((w, 0))
                    recurse = True
                    break
                if on_stack[w]:
                    low[node] = min(low[node], index[w])
            if recurse:
                continue
            if low[node] == index[node]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.add(w)
                    if w == node:
                        break
                comps.append(frozenset(comp))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
    return _sorted_sets(comps)


def weak_components(g: DiGraph) -> list[frozenset]:
    parent = list(range(g.vertex_count))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for e in g.edges:
        ra, rb = find(e.tail), find(e.head)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, set] = {}
    for vtx in range(g.vertex_count):
        groups.setdefault(find(vtx), set()).add(vtx)
    return _sorted_sets(groups.values())


def reachable_from(g: DiGraph, sources) -> frozenset:
    adj = g.successors()
    seen = set(sources)
    queue = deque(seen)
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return frozenset(seen)


@dataclass(frozen=True)
class ReachStructure:
    """Reaches ``R_m`` with exclusive part ``H_m``, common part ``C_m`` and cabal ``B_m``.

    ``for_reversed`` is True when the structure was computed on the
    edge-reversed graph, i.e. it lists co-reaches and co-cabals.
    """

    reaches: tuple[frozenset, ...]
    exclusive: tuple[frozenset, ...]
    common: tuple[frozenset, ...]
    cabals: tuple[frozenset, ...]
    for_reversed: bool = False

    @property
    def count(self) -> int:
        return len(self.reaches)

    def indicator(self, m: int, n: int) -> np.ndarray:
        """0/1 vector of reach ``m`` in R^n."""
        out = np.zeros(n)
        out[sorted(self.reaches[m])] = 1.0
        return out


def reaches(g: DiGraph, for_reversed: bool = False) -> ReachStructure:
    """Reach structure of ``g``; pass ``for_reversed=True`` only as a label.

    Reaches are ordered lexicographically by their sorted vertex lists.
    """
    comps = strong_components(g)
    comp_of = {}
    for ci, c in enumerate(comps):
        for vtx in c:
            comp_of[vtx] = ci
    has_incoming = [False] * len(comps)
    for e in g.edges:
        a, b = comp_of[e.tail], comp_of[e.head]
        if a != b:
            has_incoming[b] = True
    cabals = [c for ci, c in enumerate(comps) if not has_incoming[ci]]
    reach_sets = [reachable_from(g, cab) for cab in cabals]
    order = sorted(range(len(cabals)), key=lambda i: sorted(reach_sets[i]))
    cabals = [cabals[i] for i in order]
    reach_sets = [reach_sets[i] for i in order]

    membership = [0] * g.vertex_count
    for r in reach_sets:
        for vtx in r:
            membership[vtx] += 1
    exclusive = [frozenset(x for x in r if membership[x] == 1) for r in reach_sets]
    common = [r - h for r, h in zip(reach_sets, exclusive)]
    return ReachStructure(tuple(reach_sets), tuple(exclusive), tuple(common), tuple(cabals), for_reversed)


def coreaches(g: DiGraph) -> ReachStructure:
    """Reaches and cabals of the edge-reversed graph."""
    return reaches(reverse(g), for_reversed=True)


def is_csc(g: DiGraph) -> bool:
    """True iff every weak component is strongly connected."""
    return len(weak_components(g)) == len(strong_components(g))


def dim_image_incidence(g: DiGraph) -> int:
    """Rank of the incidence matrix: vertices minus weak components."""
    return g.vertex_count - len(weak_components(g))
