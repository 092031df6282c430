"""Tests for multigraphs, minors and canonical labeling."""

from collections import Counter

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphforms.errors import InvalidGraphError, UsageError
from graphforms.graphs import (
    FIXTURE_NAMES,
    Graph,
    automorphisms,
    banana,
    bridges,
    canonical_certificate,
    canonical_key,
    complete_graph,
    contract,
    contract_subgraph,
    cycle,
    delete,
    fixture,
    from_dict,
    has_odd_automorphism,
    is_core,
    is_isomorphic,
    is_one_vertex_irreducible,
    is_two_vertex_reducible,
    one_vertex_join,
    permutation_sign,
    planar_dual,
    relabel,
    spanning_trees,
    t5,
    to_dict,
    to_dot,
    wheel,
    x5,
    zigzag5,
)

from .strategies import connected_graphs


@pytest.mark.parametrize(
    ("name", "v", "e", "h", "degree"),
    [
        ("W3", 4, 6, 3, 0),
        ("W5", 6, 10, 5, 0),
        ("Z5", 6, 10, 5, 0),
        ("T5", 6, 10, 5, 0),
        ("X5", 7, 11, 5, 1),
        ("K6", 6, 15, 10, -5),
        ("K4sub", 5, 7, 3, 1),
        ("banana3", 2, 3, 2, -1),
    ],
)
def test_fixture_invariants(name, v, e, h, degree):
    """Test vertex, edge and loop counts of the named graphs."""
    g = fixture(name)
    assert (g.vertex_count, g.edge_count, g.loop_number, g.degree) == (v, e, h, degree)


def test_every_fixture_name_resolves():
    """Test that every advertised fixture name builds a graph."""
    for name in FIXTURE_NAMES:
        assert fixture(name).edge_count > 0


def test_fixture_family_syntax():
    """Test the parametrized family names."""
    assert fixture("W(7)") == wheel(7)
    assert fixture("C4") == cycle(4)


def test_unknown_fixture():
    """Test that unknown or invalid fixture names are usage errors."""
    with pytest.raises(UsageError):
        fixture("nope")
    with pytest.raises(UsageError):
        fixture("W2")


def test_invalid_endpoint():
    """Test that edges must stay inside the vertex range."""
    with pytest.raises(InvalidGraphError):
        Graph(2, ((0, 2),))


@pytest.mark.parametrize(
    ("v", "edges"),
    [(2.5, ((0, 1),)), (3, ((0, 1.9),)), (2, ((0, True),)), (True, ())],
)
def test_non_integer_vertices(v, edges):
    """Test that vertex counts and endpoints must be integers."""
    with pytest.raises(InvalidGraphError):
        Graph(v, edges)
    with pytest.raises(InvalidGraphError):
        from_dict({"v": v, "edges": [list(e) for e in edges]})


def test_wheel_edge_order(w3):
    """Test that wheels list spokes first."""
    assert w3.edges[:3] == ((0, 1), (0, 2), (0, 3))
    assert w3.edges[3:] == ((1, 2), (2, 3), (3, 1))


def test_contract_and_delete(w3):
    """Test edge contraction and deletion."""
    quotient = contract(w3, 0)
    assert quotient.vertex_count == 3
    assert quotient.edge_count == 5
    assert quotient.loop_number == 3
    assert quotient.label == "W3/e1"

    minor = delete(w3, 0)
    assert minor.loop_number == 2
    assert minor.label == "W3\\e1"


def test_contract_tadpole_removes_it():
    """Test that contracting a tadpole only removes the edge."""
    g = Graph(2, ((0, 0), (0, 1)))
    assert contract(g, 0) == Graph(2, ((0, 1),))


def test_contract_edge_out_of_range(w3):
    """Test that a bad edge index is rejected."""
    with pytest.raises(InvalidGraphError):
        contract(w3, 6)


def test_contract_subgraph():
    """Test quotienting a triangle of K4."""
    k4 = complete_graph(4)
    triangle = [0, 1, 3]  # (0,1), (0,2), (1,2)
    quotient = contract_subgraph(k4, triangle)
    assert quotient.vertex_count == 2
    assert quotient.edge_count == 3
    assert is_isomorphic(quotient, banana(3))


def test_bridges_simple():
    """Test bridge detection on a triangle with a pendant edge."""
    g = Graph(4, ((0, 1), (1, 2), (2, 0), (2, 3)))
    assert bridges(g) == [3]
    assert not is_core(g)
    assert is_core(cycle(3))


@settings(max_examples=60, deadline=None)
@given(connected_graphs())
def test_bridges_match_networkx(graph):
    """Test bridges against networkx on the underlying simple graph."""
    simple = nx.Graph()
    simple.add_nodes_from(range(graph.vertex_count))
    simple.add_edges_from((t, h) for t, h in graph.edges if t != h)
    nx_bridges = {frozenset(b) for b in nx.bridges(simple)}
    multiplicity = Counter(frozenset(e) for e in graph.edges)
    expected = [
        e
        for e, (t, h) in enumerate(graph.edges)
        if t != h and multiplicity[frozenset((t, h))] == 1 and frozenset((t, h)) in nx_bridges
    ]
    assert bridges(graph) == expected


def test_spanning_trees_of_k4():
    """Test that K4 has 16 spanning trees."""
    trees = spanning_trees(complete_graph(4))
    assert len(trees) == 16
    assert trees == sorted(trees)


def test_spanning_trees_disconnected():
    """Test that spanning trees need a connected graph."""
    with pytest.raises(InvalidGraphError):
        spanning_trees(Graph(3, ((0, 1),)))


def test_canonical_key_invariant_under_relabeling(w3):
    """Test that relabeled graphs share a canonical key."""
    relabeled = relabel(w3, [2, 0, 3, 1], [4, 1, 0, 5, 3, 2])
    assert canonical_key(relabeled) == canonical_key(w3)
    assert canonical_key(wheel(4)) != canonical_key(zigzag5())


def test_canonical_sign_tracks_edge_permutation(w3):
    """Test the orientation sign of a relabeling on a graph without odd automorphisms."""
    edge_perm = [1, 0, 2, 3, 4, 5]
    relabeled = relabel(w3, [0, 1, 2, 3], edge_perm)
    original = canonical_certificate(w3)
    moved = canonical_certificate(relabeled)
    assert original.edge_sign == moved.edge_sign * permutation_sign(edge_perm)


@settings(max_examples=100, deadline=None)
@given(connected_graphs(), st.randoms(use_true_random=False))
def test_canonical_certificate_under_random_relabeling(graph, rnd):
    """Test the key and orientation sign of a random relabeling."""
    vertex_perm = list(range(graph.vertex_count))
    edge_perm = list(range(graph.edge_count))
    rnd.shuffle(vertex_perm)
    rnd.shuffle(edge_perm)
    relabeled = relabel(graph, vertex_perm, edge_perm)
    original = canonical_certificate(graph)
    moved = canonical_certificate(relabeled)
    assert moved.canonical_key == original.canonical_key
    if not has_odd_automorphism(graph):
        assert original.edge_sign == moved.edge_sign * permutation_sign(edge_perm)


def test_automorphism_counts():
    """Test automorphism group sizes and odd automorphisms."""
    assert len(automorphisms(wheel(3))) == 24
    assert len(automorphisms(wheel(5))) == 10
    assert not has_odd_automorphism(wheel(3))
    assert not has_odd_automorphism(wheel(5))
    assert has_odd_automorphism(wheel(4))
    assert has_odd_automorphism(banana(2))


def test_zigzag_and_t5_are_distinct():
    """Test that the loop order five fixtures are pairwise non-isomorphic."""
    keys = {canonical_key(g) for g in (wheel(5), zigzag5(), t5())}
    assert len(keys) == 3


def test_reducibility():
    """Test one-vertex and two-vertex reducibility."""
    bowtie = one_vertex_join(cycle(3), cycle(3), 0, 0)
    assert not is_one_vertex_irreducible(bowtie)
    assert is_one_vertex_irreducible(wheel(3))
    assert is_two_vertex_reducible(t5())
    assert not is_two_vertex_reducible(wheel(3))


def test_planar_dual_of_wheel_is_wheel():
    """Test that wheels are self-dual."""
    for n in (3, 4, 5):
        dual = planar_dual(wheel(n))
        assert dual.edge_count == 2 * n
        assert is_isomorphic(dual, wheel(n))


def test_planar_dual_rejects_nonplanar():
    """Test that K5 has no planar dual."""
    with pytest.raises(InvalidGraphError):
        planar_dual(complete_graph(5))


def test_dict_round_trip():
    """Test Graph JSON records."""
    g = x5()
    data = to_dict(g)
    assert data["label"] == "X5"
    assert from_dict(data) == g


def test_from_dict_malformed():
    """Test that malformed records are rejected."""
    with pytest.raises(InvalidGraphError):
        from_dict({"v": 2})


def test_to_dot(w3):
    """Test DOT output names edges from 1."""
    dot = to_dot(w3)
    assert dot.startswith('graph "W3" {')
    assert '0 -- 1 [label="e1"];' in dot
