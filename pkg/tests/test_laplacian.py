"""Tests for Laplacians, Kirchhoff and Dodgson polynomials."""

import pytest
from hypothesis import given, settings

from graphforms.errors import InvalidGraphError, UsageError
from graphforms.graphs import (
    W3_RIM_BASIS,
    Graph,
    banana,
    cycle,
    reduced_incidence,
    spanning_trees,
)
from graphforms.laplacian import (
    dodgson,
    dodgson_matrix,
    dodgson_matrix_at,
    dual_laplacian,
    graph_matrix,
    graph_polynomial,
    laplacian,
    reciprocal_clear,
    tree_polynomial,
)
from graphforms.polyring import mat_det, mat_mul

from .strategies import connected_graphs


def test_banana_polynomial():
    """Test the Kirchhoff polynomial of the three-edge banana."""
    assert graph_polynomial(banana(3)).to_text() == "x1*x2 + x1*x3 + x2*x3"


def test_cycle_polynomial():
    """Test that a cycle has Psi = sum of its edge variables."""
    assert graph_polynomial(cycle(4)).to_text() == "x1 + x2 + x3 + x4"


def test_wheel_polynomial(w3):
    """Test degree and term count of Psi for the three-spoke wheel."""
    psi = graph_polynomial(w3)
    assert len(psi) == 16
    assert psi.is_homogeneous()
    assert psi.total_degree() == 3
    assert all(c == 1 for c in psi.terms.values())


def test_laplacian_determinant_is_psi(w3):
    """Test det(Lambda) = Psi in the default cycle basis."""
    bundle = laplacian(w3)
    assert bundle.size == 3
    assert bundle.lambda_matrix.is_symmetric()
    assert bundle.lambda_matrix.det() == graph_polynomial(w3)
    assert bundle.deleted_vertex == 3
    assert len(bundle.epsilon) == 3


def test_worked_laplacian(w3_worked):
    """Test the Laplacian of the rim-first wheel in its worked basis."""
    bundle = laplacian(w3_worked, W3_RIM_BASIS)
    lam = bundle.lambda_matrix
    assert lam[0, 0].to_text() == "x1 + x5 + x6"
    assert lam[0, 1].to_text() == "-x6"
    assert lam.det() == graph_polynomial(w3_worked)


def test_laplacian_rejects_non_cycles(w3_worked):
    """Test that a basis column must be a cycle."""
    bad = [list(row) for row in W3_RIM_BASIS]
    bad[0][0] = 2
    with pytest.raises(InvalidGraphError):
        laplacian(w3_worked, bad)


def test_laplacian_rejects_trees_and_disconnected():
    """Test the preconditions of the Laplacian."""
    with pytest.raises(InvalidGraphError):
        laplacian(Graph(2, ((0, 1),)))
    with pytest.raises(InvalidGraphError):
        laplacian(Graph(4, ((0, 1), (0, 1), (2, 3))))


def test_graph_matrix_determinant(w3):
    """Test det(M) = Psi for the graph matrix."""
    m = graph_matrix(w3)
    assert m.shape == (9, 9)
    assert m.det() == graph_polynomial(w3)


def test_dual_laplacian_matches_tree_polynomial(w3):
    """Test det(L) = Psi(1/x) prod(x) through the tree polynomial."""
    tree = tree_polynomial(w3)
    assert dual_laplacian(w3).det() == tree
    assert reciprocal_clear(tree) == graph_polynomial(w3)


def test_dodgson_diagonal_is_derivative(w3):
    """Test Psi^{i,i} = dPsi/dx_i."""
    psi = graph_polynomial(w3)
    for i in range(w3.edge_count):
        assert dodgson(w3, [i], [i]) == psi.derivative(i)


def test_dodgson_symmetric(w3):
    """Test Psi^{I,J} = Psi^{J,I}."""
    assert dodgson(w3, [0], [4]) == dodgson(w3, [4], [0])
    assert dodgson(w3, [0, 1], [2, 3]) == dodgson(w3, [2, 3], [0, 1])


def test_dodgson_identity(w3):
    """Test Psi^{1,1} Psi^{2,2} - (Psi^{1,2})^2 = Psi Psi^{12,12}."""
    psi = graph_polynomial(w3)
    lhs = dodgson(w3, [0], [0]) * dodgson(w3, [1], [1]) - dodgson(w3, [0], [1]) ** 2
    assert lhs == psi * dodgson(w3, [0, 1], [0, 1])


def test_dodgson_bad_indices(w3):
    """Test that mismatched or out-of-range indices are usage errors."""
    with pytest.raises(UsageError):
        dodgson(w3, [0, 1], [2])
    with pytest.raises(UsageError):
        dodgson(w3, [6], [0])


def test_dodgson_matrix_entries(w3):
    """Test that the Dodgson matrix holds signed Dodgson polynomials."""
    p = dodgson_matrix(w3)
    assert p[0, 0] == dodgson(w3, [0], [0])
    assert p[0, 1] == -dodgson(w3, [1], [0])


def test_dodgson_matrix_at_point(w3):
    """Test the integer Dodgson matrix against the symbolic one."""
    point = [2, 3, 5, 7, 11, 13]
    numeric, psi = dodgson_matrix_at(w3, point)
    assert psi == graph_polynomial(w3).eval_rational(point)
    assert numeric == dodgson_matrix(w3).eval_at(point)


@settings(max_examples=30, deadline=None)
@given(connected_graphs(max_vertices=5, max_extra_edges=3))
def test_psi_counts_spanning_trees(graph):
    """Test Psi(1, ..., 1) = number of spanning trees = det of the reduced vertex Laplacian."""
    trees = len(spanning_trees(graph))
    assert graph_polynomial(graph).eval_rational([1] * graph.edge_count) == trees
    if graph.vertex_count > 1:
        eps = reduced_incidence(graph)
        eps_t = [list(col) for col in zip(*eps, strict=True)]
        assert mat_det(mat_mul(eps, eps_t)) == trees
