import numpy as np
from hypothesis import given, settings

from crnlap.graph import DiGraph, build_matrices, reverse
from crnlap.linalg import nullspace, numeric_rank
from crnlap.reach import (
    coreaches,
    dim_image_incidence,
    is_csc,
    reaches,
    strong_components,
    weak_components,
)
from crnlap import networks

from oracles import brute_reaches, brute_strong_components
from test_graph import digraphs


def fs(*sets):
    return [frozenset(s) for s in sets]


def one_based(sets):
    return [frozenset(v + 1 for v in s) for s in sets]


def test_strong_components_examples(fig_graph):
    assert strong_components(DiGraph.from_edges(2, [(0, 1)])) == fs({0}, {1})
    assert strong_components(DiGraph.from_edges(3, [(0, 1), (1, 2), (2, 0)])) == fs({0, 1, 2})
    edges = [(e.tail, e.head) for e in fig_graph.edges]
    assert strong_components(fig_graph) == brute_strong_components(7, edges)
    assert one_based(strong_components(fig_graph)) == fs({1}, {2}, {3, 4, 5}, {6, 7})


def test_weak_components(ex1, fig_graph):
    assert weak_components(ex1.graph) == fs({0, 1}, {2, 3})
    assert weak_components(fig_graph) == fs(range(7))
    assert weak_components(DiGraph(3)) == fs({0}, {1}, {2})


def test_figure_reaches(fig_graph):
    rs = reaches(fig_graph)
    assert one_based(rs.reaches) == fs({1, 2}, {1, 3, 4, 5, 6, 7})
    assert one_based(rs.cabals) == fs({2}, {6, 7})
    assert one_based(rs.exclusive) == fs({2}, {3, 4, 5, 6, 7})
    assert one_based(rs.common) == fs({1}, {1})


def test_figure_coreaches(fig_graph):
    rs = coreaches(fig_graph)
    assert rs.for_reversed
    assert one_based(rs.reaches) == fs({1, 2, 6, 7}, {3, 4, 5, 6, 7})
    assert one_based(rs.cabals) == fs({1}, {3, 4, 5})


def test_two_cycle_reach():
    rs = reaches(DiGraph.from_edges(2, [(0, 1), (1, 0)]))
    assert rs.reaches == (frozenset({0, 1}),) and rs.cabals == (frozenset({0, 1}),)


def test_csc_examples(ex1, fig_graph):
    assert is_csc(ex1.graph)
    assert not is_csc(fig_graph)
    assert is_csc(DiGraph(1))


def test_dim_image_incidence(ex1, fig_graph):
    assert dim_image_incidence(ex1.graph) == 2
    assert dim_image_incidence(fig_graph) == 6
    assert dim_image_incidence(DiGraph(3)) == 0


@settings(max_examples=300, deadline=None)
@given(digraphs())
def test_reach_structure_matches_definition(g):
    edges = [(e.tail, e.head) for e in g.edges]
    rs = reaches(g)
    maximal, cabals, exclusive = brute_reaches(g.vertex_count, edges)
    assert list(rs.reaches) == maximal
    assert list(rs.cabals) == cabals
    assert list(rs.exclusive) == exclusive
    assert strong_components(g) == brute_strong_components(g.vertex_count, edges)
    for R, H, C in zip(rs.reaches, rs.exclusive, rs.common):
        assert H | C == R and not (H & C)
    assert set().union(*rs.reaches) == set(range(g.vertex_count))
    hs = [v for H in rs.exclusive for v in H]
    assert len(hs) == len(set(hs))


@settings(max_examples=300, deadline=None)
@given(digraphs())
def test_csc_properties(g):
    assert is_csc(g) == is_csc(reverse(g))
    rs = reaches(g)
    assert (set().union(*rs.cabals) == set(range(g.vertex_count))) == is_csc(g)
    m = build_matrices(g)
    assert nullspace(m.lap_in).dim == rs.count
    rank = numeric_rank(m.incidence) if g.edge_count else 0
    assert rank == dim_image_incidence(g)
