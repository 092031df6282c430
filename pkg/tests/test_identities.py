"""Tests for exact point checks of graph and matrix identities."""

import random

import pytest

from graphforms.errors import InvalidGraphError
from graphforms.forms import CanonicalFormSpec, generic_matrix, generic_symmetric_matrix
from graphforms.graphs import Graph, banana, complete_graph, cycle, delete, wheel, zigzag5
from graphforms.identities import (
    automorphism_check,
    beta5_dihedral_check,
    deletion_check,
    direct_sum_rule_holds,
    duality_check,
    identity_checks,
    inverse_rule_holds,
    one_vertex_join_check,
    parallel_check,
    point_certify,
    predicts_vanishing,
    projective_rule_holds,
    random_graph,
    random_points,
    restriction_check,
    route_check,
    run_property_suite,
    series_check,
    transpose_rule_holds,
    two_vertex_twist_check,
    vanishing_check,
    wheel_congruence_check,
)

OMEGA5 = CanonicalFormSpec((1,))


def test_random_points_positive(rng):
    """Test that random points are positive integers in range."""
    points = random_points(rng, 4, 10, high=50)
    assert len(points) == 10
    assert all(len(p) == 4 and all(1 <= x <= 50 for x in p) for p in points)


def test_point_certify_counts_mismatches():
    """Test the point certificate bookkeeping."""
    points = [(1,), (2,), (3,)]
    cert = point_certify(lambda p: p[0] ** 2, lambda p: p[0] * 2, points, degree_bound=2)
    assert not cert.passed
    assert cert.mismatches == 2
    assert cert.first_mismatch == (1,)
    assert cert.failure_bound is not None

    ok = point_certify(lambda p: p[0] + 1, lambda p: 1 + p[0], points)
    assert ok.passed
    assert ok.failure_bound is None


def test_duality(rng, w3):
    """Test the planar duality identity on W3."""
    for point in random_points(rng, 6, 2):
        assert duality_check(w3, 1, point)


def test_series_and_parallel(rng, w3):
    """Test subdivision and edge doubling."""
    for point in random_points(rng, 7, 2):
        assert series_check(w3, 2, 1, point)
        assert parallel_check(w3, 4, 1, point)


def test_one_vertex_join(rng, w3):
    """Test that omega is additive under one-vertex joins."""
    point = random_points(rng, 9, 1)[0]
    assert one_vertex_join_check(w3, cycle(3), 1, point, 2, 0)


def test_two_vertex_twist(rng):
    """Test the twist invariance of two-vertex joins."""
    half = delete(complete_graph(4), 0)
    point = random_points(rng, 10, 1)[0]
    assert two_vertex_twist_check(half, half, (0, 1), (0, 1), 1, point)


def test_restriction_and_deletion(rng, w3):
    """Test the face identities for x_e = 0 and x_e -> infinity."""
    point = random_points(rng, 6, 1)[0]
    assert restriction_check(w3, 3, 1, point)
    assert deletion_check(w3, 3, 1, point)


def test_restriction_rejects_tadpoles():
    """Test that tadpoles have no x_e = 0 face."""
    g = Graph(2, ((0, 0), (0, 1), (0, 1)))
    with pytest.raises(InvalidGraphError):
        restriction_check(g, 0, 1, [1, 2, 3])


def test_deletion_rejects_bridges():
    """Test that bridges cannot be deleted."""
    g = Graph(3, ((0, 1), (0, 1), (1, 2)))
    with pytest.raises(InvalidGraphError):
        deletion_check(g, 2, 1, [1, 2, 3])


def test_automorphisms_and_routes(rng, w3):
    """Test automorphism invariance and agreement of every route."""
    point = random_points(rng, 6, 1)[0]
    assert automorphism_check(w3, 1, point)
    assert route_check(w3, 1, point)
    assert beta5_dihedral_check(w3, point)


def test_wheel_congruence(rng):
    """Test the spoke face of W3 and W5."""
    assert wheel_congruence_check(1, random_points(rng, 6, 1)[0])
    assert wheel_congruence_check(2, random_points(rng, 10, 1)[0], spoke=3)


@pytest.mark.parametrize(
    ("graph", "reason"),
    [
        (Graph(3, ((0, 0), (0, 1), (1, 2), (2, 0), (0, 1), (1, 2))), "tadpole"),
        (Graph(4, ((0, 1), (0, 1), (1, 2), (2, 3), (3, 0), (0, 2))), "multiple edge"),
        (Graph(4, ((0, 1), (1, 2), (2, 0), (0, 3), (3, 1), (1, 2))), "multiple edge"),
        (banana(6), "multiple edge"),
    ],
)
def test_predicts_vanishing(graph, reason):
    """Test the predicted vanishing reasons for six-edge graphs."""
    assert predicts_vanishing(graph, OMEGA5) == reason


def test_predicts_no_vanishing_for_wheel(w3):
    """Test that omega^5 on W3 is not predicted to vanish."""
    assert predicts_vanishing(w3, OMEGA5) is None
    assert predicts_vanishing(wheel(4), OMEGA5) is None


def test_predicts_vanishing_by_degree(w3):
    """Test vanishing by degree alone."""
    assert predicts_vanishing(w3, CanonicalFormSpec((2,))) == "degree exceeds edge count"
    five = Graph(3, ((0, 1), (1, 2), (2, 0), (0, 1), (1, 2)))
    assert predicts_vanishing(five, OMEGA5) == "projective form of top degree"


def test_vanishing_holds_at_points(rng):
    """Test that predicted vanishing is exact at points."""
    g = Graph(4, ((0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)))
    assert vanishing_check(g, OMEGA5, random_points(rng, 6, 1)[0])
    degenerate = Graph(4, ((0, 1), (0, 1), (1, 2), (2, 3), (3, 0), (0, 2)))
    assert vanishing_check(degenerate, OMEGA5, random_points(rng, 6, 1)[0])


@pytest.mark.parametrize("n", [1, 2, 3])
def test_matrix_rules(rng, n):
    """Test transpose, inverse and projective rules on a generic 2x2 matrix."""
    x = generic_matrix(2)
    point = random_points(rng, 4, 1, high=1000)[0]
    assert transpose_rule_holds(x, n, point)
    assert inverse_rule_holds(x, n, point)
    if n % 2:
        assert projective_rule_holds(x, n, random_points(rng, 5, 1, high=1000)[0])


def test_direct_sum_rule(rng):
    """Test additivity of the traces over block sums."""
    point = random_points(rng, 10, 1, high=1000)[0]
    assert direct_sum_rule_holds(generic_matrix(2), generic_symmetric_matrix(3), 3, point)


def test_random_graph_is_connected():
    """Test the random connected multigraph generator."""
    rng = random.Random(3)
    for _ in range(10):
        g = random_graph(rng, 4, 7)
        assert g.vertex_count == 4
        assert g.edge_count == 7
        assert g.loop_number == 4
    with pytest.raises(ValueError):
        random_graph(rng, 5, 2)


def test_identity_checks_on_w3(w3):
    """Test the full identity battery on W3."""
    results = identity_checks(w3, seed=1, points=1)
    names = {r.name for r in results}
    assert {"duality", "series", "restriction", "deletion", "routes"} <= names
    assert all(r.passed for r in results)


def test_identity_checks_disconnected():
    """Test that the battery needs a connected graph."""
    with pytest.raises(InvalidGraphError):
        identity_checks(Graph(4, ((0, 1), (0, 1), (2, 3), (2, 3))))


@pytest.mark.slow
def test_identity_checks_on_zigzag():
    """Test the identity battery on a loop order five graph."""
    assert all(r.passed for r in identity_checks(zigzag5(), seed=2, points=1))


@pytest.mark.slow
def test_property_suite_passes():
    """Test that the randomized property suite passes."""
    results = run_property_suite(seed=0, instances=3)
    failed = [r.name for r in results if not r.passed]
    assert failed == []
    assert any(r.informational for r in results)
