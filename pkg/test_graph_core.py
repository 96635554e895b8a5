"""Tests for graph constructors, cliques, morphisms and ranks."""

from itertools import combinations, product

import numpy as np
import pytest
from hypothesis import given, settings as hsettings, strategies as st

from graph_thresholds.core.enums import CYCLE
from graph_thresholds.core.errors import DomainError
from graph_thresholds.core.models import DirectedGraph
from graph_thresholds.graph_core import (
    all_cliques,
    binary_tree,
    chromatic_number,
    clique_number,
    complete_graph,
    directed_cycle,
    edgeless_graph,
    forward_ranks,
    has_path_of_length,
    hom_exists,
    is_antisymmetric,
    is_clique,
    is_homomorphism,
    is_irreflexive,
    is_symmetric,
    longest_path_length,
    loop_graph,
    max_clique,
    maximal_cliques,
    rank_vector,
    symmetric_closure,
    symmetric_cycle,
    transitive_tournament,
    tree_depth,
)


@st.composite
def graphs(draw, max_vertices=5, loops=True):
    n = draw(st.integers(1, max_vertices))
    pairs = [(a, b) for a in range(n) for b in range(n) if loops or a != b]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return DirectedGraph.from_edges(n, chosen)


def _brute_longest_path(graph: DirectedGraph) -> int:
    """Longest simple path by DFS; only valid on acyclic graphs."""
    out = graph.out_neighbors()

    def depth(v):
        return max((1 + depth(w) for w in out[v]), default=0)

    return max((depth(v) for v in range(graph.vertex_count)), default=0)


# Constructors and predicates

def test_constructors():
    assert complete_graph(3).edge_count == 6
    assert transitive_tournament(5).edge_count == 10
    assert directed_cycle(4).sorted_edges() == [(0, 1), (1, 2), (2, 3), (3, 0)]
    assert loop_graph().loops() == [0]
    tree = binary_tree(2)
    assert tree.vertex_count == 7 and tree.edge_count == 6
    assert [tree_depth(v) for v in range(7)] == [0, 1, 1, 2, 2, 2, 2]
    with pytest.raises(DomainError):
        binary_tree(-1)


def test_edge_outside_vertex_range_is_rejected():
    with pytest.raises(DomainError):
        DirectedGraph.from_edges(2, [(0, 2)])


def test_set_predicates():
    assert symmetric_closure(DirectedGraph.from_edges(2, [(0, 1)])).edges == {(0, 1), (1, 0)}
    assert is_symmetric(complete_graph(4)) and is_irreflexive(complete_graph(4))
    assert is_antisymmetric(transitive_tournament(5))
    assert not is_antisymmetric(loop_graph())
    assert is_symmetric(edgeless_graph(3)) and is_antisymmetric(edgeless_graph(3))


# Cliques

def test_clique_numbers():
    assert clique_number(complete_graph(3)) == 3
    assert clique_number(transitive_tournament(5)) == 5
    assert clique_number(symmetric_cycle(5)) == 2
    assert clique_number(directed_cycle(3)) == 3
    assert clique_number(edgeless_graph(4)) == 1
    assert max_clique(symmetric_cycle(4)) == (0, 1)


def test_empty_graph_has_no_clique_number():
    with pytest.raises(DomainError):
        clique_number(DirectedGraph(0))


def test_maximal_and_all_cliques():
    assert maximal_cliques(symmetric_cycle(4)) == [(0, 1), (0, 3), (1, 2), (2, 3)]
    assert len(all_cliques(complete_graph(3))) == 7
    assert maximal_cliques(complete_graph(4), vertices=[1, 3]) == [(1, 3)]


@given(graphs(max_vertices=8))
def test_max_clique_is_the_first_maximum_clique(graph):
    size = max(
        r for r in range(1, graph.vertex_count + 1)
        if any(is_clique(graph, c) for c in combinations(range(graph.vertex_count), r))
    )
    expected = next(c for c in combinations(range(graph.vertex_count), size) if is_clique(graph, c))
    assert max_clique(graph) == expected


def test_max_clique_on_dense_graph_with_coloring_cuts():
    # K4 plus a 5-cycle on the remaining vertices
    edges = [(a, b) for a in range(4) for b in range(4) if a != b]
    edges += [(4 + i, 4 + (i + 1) % 5) for i in range(5)]
    graph = DirectedGraph.from_edges(9, edges)
    assert max_clique(graph) == (0, 1, 2, 3)
    assert max_clique(complete_graph(12)) == tuple(range(12))


@given(graphs())
def test_clique_number_ignores_direction(graph):
    assert clique_number(graph) == clique_number(symmetric_closure(graph))


# Morphisms

def test_hom_examples():
    assert hom_exists(symmetric_cycle(5), complete_graph(2)) is None
    witness = hom_exists(symmetric_cycle(5), complete_graph(3))
    assert witness is not None
    assert is_homomorphism(symmetric_cycle(5), complete_graph(3), witness.assignment)
    assert hom_exists(complete_graph(4), loop_graph()).assignment == (0, 0, 0, 0)


def test_hom_from_empty_source():
    assert hom_exists(DirectedGraph(0), complete_graph(2)).assignment == ()
    assert hom_exists(complete_graph(1), DirectedGraph(0)) is None


@given(graphs(max_vertices=5), graphs(max_vertices=3))
def test_hom_witness_is_valid_and_search_is_exact(source, target):
    witness = hom_exists(source, target)
    if witness is not None:
        assert is_homomorphism(source, target, witness.assignment)
    else:
        assignments = product(range(target.vertex_count), repeat=source.vertex_count)
        assert not any(is_homomorphism(source, target, a) for a in assignments)


@hsettings(max_examples=60)
@given(graphs(max_vertices=6), st.integers(1, 5))
def test_no_map_into_tournament_iff_long_path(graph, p):
    """G avoids T_p exactly when it has a path of p edges (cycles count as arbitrarily long)."""
    assert (hom_exists(graph, transitive_tournament(p)) is None) == has_path_of_length(graph, p)


def test_chromatic_numbers():
    assert chromatic_number(complete_graph(4)) == 4
    assert chromatic_number(edgeless_graph(7)) == 1
    assert chromatic_number(symmetric_cycle(5)) == 3
    assert chromatic_number(symmetric_cycle(4)) == 2


def test_chromatic_number_domain():
    with pytest.raises(DomainError):
        chromatic_number(loop_graph())
    with pytest.raises(DomainError):
        chromatic_number(DirectedGraph(0))


@given(graphs(max_vertices=6, loops=False))
def test_chromatic_number_matches_complete_targets(graph):
    chi = chromatic_number(graph)
    assert hom_exists(graph, complete_graph(chi)) is not None
    if chi > 1:
        assert hom_exists(graph, complete_graph(chi - 1)) is None
    assert clique_number(symmetric_closure(graph)) <= chi


# Ranks

def test_rank_examples():
    assert rank_vector(transitive_tournament(5)).ranks == (4, 3, 2, 1, 0)
    assert rank_vector(DirectedGraph.from_edges(2, [(0, 1), (1, 0)])).ranks == (CYCLE, CYCLE)
    assert rank_vector(edgeless_graph(3)).ranks == (0, 0, 0)


def test_rank_reaching_a_cycle():
    graph = DirectedGraph.from_edges(4, [(0, 1), (1, 2), (2, 1)])
    assert rank_vector(graph).ranks == (CYCLE, CYCLE, CYCLE, 0)
    assert longest_path_length(graph) is CYCLE
    assert has_path_of_length(graph, 100)


def test_longest_path_examples():
    assert longest_path_length(transitive_tournament(5)) == 4
    assert longest_path_length(edgeless_graph(3)) == 0
    decreasing = DirectedGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    assert longest_path_length(decreasing) == 2
    assert rank_vector(loop_graph()).ranks == (CYCLE,)


@given(graphs(max_vertices=7, loops=False))
def test_rank_matches_path_enumeration_on_forward_graphs(graph):
    forward = DirectedGraph.from_edges(graph.vertex_count, [(min(a, b), max(a, b)) for a, b in graph.edges])
    ranks = rank_vector(forward)
    assert ranks.is_finite
    assert longest_path_length(forward) == _brute_longest_path(forward)
    out = forward.out_neighbors()
    for v in range(forward.vertex_count):
        assert ranks[v] == max((ranks[w] + 1 for w in out[v]), default=0)


@given(st.integers(1, 8), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_forward_ranks_agree_with_rank_vector(n, batch, seed):
    generator = np.random.default_rng(seed)
    tables = (generator.random((batch, n, n)) < 0.4) & np.triu(np.ones((n, n), dtype=bool), 1)
    ranks = forward_ranks(tables)
    for table, row in zip(tables, ranks):
        assert tuple(row.tolist()) == rank_vector(DirectedGraph.from_adjacency(table)).ranks
