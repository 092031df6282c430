"""Matrix avatars of a graph and the polynomials they define.

Three matrices represent the same graph polynomial:

- the graph Laplacian Lambda = H^T D H (h x h) built from a cycle basis H,
- the dual Laplacian L = eps D^{-1} eps^T ((v-1) x (v-1)) with the reduced
  incidence matrix eps, written in variables y_e standing for 1/x_e,
- the graph matrix M = [[D, -eps^T], [eps, 0]] of size e + v - 1.

The reduced incidence always deletes the highest-index vertex. Dodgson
polynomials are plain minors of M with rows and columns kept in ascending
order, without any extra sign.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidGraphError, UsageError
from .graphs import (
    Graph,
    cycle_basis,
    incidence_matrix,
    is_connected,
    reduced_incidence,
    spanning_trees,
)
from .polyring import MultiPoly, PolyMatrix, Scalar, mat_adjugate_int, mat_inverse, mat_mul

DODGSON_CONVENTION = "minor of M with rows I and columns J removed, ascending order"


@dataclass(frozen=True)
class LaplacianBundle:
    """A graph with its cycle basis, Laplacian and reduced incidence."""

    graph: Graph
    basis: tuple[tuple[int, ...], ...]
    lambda_matrix: PolyMatrix
    epsilon: tuple[tuple[int, ...], ...]
    deleted_vertex: int
    dodgson_convention: str = DODGSON_CONVENTION

    @property
    def size(self) -> int:
        return self.lambda_matrix.rows


def _require_connected(graph: Graph) -> None:
    if graph.vertex_count == 0 or not is_connected(graph):
        raise InvalidGraphError(f"{graph.name()} is not connected")


def _check_basis(graph: Graph, basis: Sequence[Sequence[int]]) -> None:
    h = graph.loop_number
    if len(basis) != graph.edge_count or any(len(row) != h for row in basis):
        raise InvalidGraphError(f"cycle basis must be {graph.edge_count} x {h}")
    for row in incidence_matrix(graph):
        for j in range(h):
            if sum(row[e] * basis[e][j] for e in range(graph.edge_count)):
                raise InvalidGraphError(f"basis column {j + 1} is not a cycle")


def laplacian_from_basis(graph: Graph, basis: Sequence[Sequence[int]]) -> PolyMatrix:
    """Lambda = H^T diag(x) H for an e x h integer matrix H."""
    e = graph.edge_count
    h = len(basis[0]) if basis else 0
    entries: list[list[MultiPoly]] = []
    for i in range(h):
        row = []
        for j in range(h):
            terms = {}
            for edge in range(e):
                c = basis[edge][i] * basis[edge][j]
                if c:
                    exp = [0] * e
                    exp[edge] = 1
                    terms[tuple(exp)] = c
            row.append(MultiPoly(e, terms))
        entries.append(row)
    return PolyMatrix(entries, e)


def laplacian(graph: Graph, basis: Sequence[Sequence[int]] | None = None) -> LaplacianBundle:
    """Build the Laplacian bundle of a connected graph with at least one loop.

    Args:
        graph: The graph.
        basis: Optional e x h cycle basis; defaults to the fundamental cycles
            of the greedy spanning tree.

    Raises:
        InvalidGraphError: For disconnected graphs, trees, or a basis that is not one.
    """
    _require_connected(graph)
    if graph.loop_number < 1:
        raise InvalidGraphError(f"{graph.name()} is a tree; its Laplacian is empty")
    if basis is None:
        basis = cycle_basis(graph)
    else:
        _check_basis(graph, basis)
    return LaplacianBundle(
        graph=graph,
        basis=tuple(tuple(row) for row in basis),
        lambda_matrix=laplacian_from_basis(graph, basis),
        epsilon=tuple(tuple(row) for row in reduced_incidence(graph)),
        deleted_vertex=graph.vertex_count - 1,
    )


def graph_polynomial(graph: Graph) -> MultiPoly:
    """Kirchhoff polynomial: sum over spanning trees of the product of the other edges."""
    _require_connected(graph)
    e = graph.edge_count
    terms: dict[tuple[int, ...], int] = {}
    for tree in spanning_trees(graph):
        exp = [1] * e
        for edge in tree:
            exp[edge] = 0
        key = tuple(exp)
        terms[key] = terms.get(key, 0) + 1
    return MultiPoly(e, terms)


def tree_polynomial(graph: Graph) -> MultiPoly:
    """Sum over spanning trees of the product of their own edge variables."""
    _require_connected(graph)
    e = graph.edge_count
    terms: dict[tuple[int, ...], int] = {}
    for tree in spanning_trees(graph):
        exp = [0] * e
        for edge in tree:
            exp[edge] = 1
        key = tuple(exp)
        terms[key] = terms.get(key, 0) + 1
    return MultiPoly(e, terms)


def reciprocal_clear(poly: MultiPoly) -> MultiPoly:
    """Map p(y) to p(1/x) * prod(x) for a polynomial of degree at most one in each variable."""
    terms = {}
    for exp, coeff in poly.terms.items():
        if any(k > 1 for k in exp):
            raise ValueError("reciprocal_clear needs a multilinear polynomial")
        terms[tuple(1 - k for k in exp)] = coeff
    return MultiPoly(poly.nvars, terms)


def dual_laplacian(graph: Graph) -> PolyMatrix:
    """L = eps diag(y) eps^T where y_e stands for 1/x_e."""
    _require_connected(graph)
    eps = reduced_incidence(graph)
    e = graph.edge_count
    size = len(eps)
    entries = []
    for a in range(size):
        row = []
        for b in range(size):
            terms = {}
            for edge in range(e):
                c = eps[a][edge] * eps[b][edge]
                if c:
                    exp = [0] * e
                    exp[edge] = 1
                    terms[tuple(exp)] = c
            row.append(MultiPoly(e, terms))
        entries.append(row)
    return PolyMatrix(entries, e)


def graph_matrix(graph: Graph) -> PolyMatrix:
    """M = [[D, -eps^T], [eps, 0]], edges first, then the kept vertices."""
    _require_connected(graph)
    eps = reduced_incidence(graph)
    e = graph.edge_count
    size = e + len(eps)
    entries: list[list[MultiPoly | int]] = [[0] * size for _ in range(size)]
    for edge in range(e):
        entries[edge][edge] = MultiPoly.variable(e, edge)
    for a, row in enumerate(eps):
        for edge, c in enumerate(row):
            if c:
                entries[e + a][edge] = c
                entries[edge][e + a] = -c
    return PolyMatrix(entries, e)


def dodgson(graph: Graph, rows: Iterable[int], cols: Iterable[int]) -> MultiPoly:
    """Dodgson polynomial: determinant of M with edge rows I and edge columns J removed.

    Raises:
        UsageError: If |I| != |J| or an index is not an edge.
    """
    rows, cols = sorted(set(rows)), sorted(set(cols))
    if len(rows) != len(cols):
        raise UsageError(f"Dodgson index sets differ in size: {len(rows)} vs {len(cols)}")
    for index in rows + cols:
        if not 0 <= index < graph.edge_count:
            raise UsageError(f"edge index {index} out of range")
    return graph_matrix(graph).minor(rows, cols).det()


def dodgson_matrix(graph: Graph) -> PolyMatrix:
    """The e x e matrix P = H adj(Lambda) H^T.

    Its entries are (-1)^(i+j) Psi^{j,i}, so P / Psi is the edge block of M^{-1}.
    """
    bundle = laplacian(graph)
    h_matrix = PolyMatrix.from_integers(bundle.basis, graph.edge_count)
    return h_matrix @ bundle.lambda_matrix.adjugate() @ h_matrix.transpose()


def dodgson_matrix_at(graph: Graph, point: Sequence[int]) -> tuple[list[list[int]], int]:
    """Integer P = H adj(Lambda(p)) H^T and Psi(p) at a positive integer point."""
    bundle = laplacian(graph)
    lam = [[int(x) for x in row] for row in bundle.lambda_matrix.eval_at(point)]
    adj, psi = mat_adjugate_int(lam)
    basis = [list(row) for row in bundle.basis]
    basis_t = [list(col) for col in zip(*basis, strict=True)]
    return mat_mul(mat_mul(basis, adj), basis_t), psi


def lbu_at(graph: Graph, point: Sequence[Scalar]) -> tuple[list[list[Fraction]], ...]:
    """Block factors L, B, U with M = L B U at a point with all x_e nonzero."""
    if any(not x for x in point):
        raise InvalidGraphError("lbu_at needs nonzero edge variables")
    eps = reduced_incidence(graph)
    e = graph.edge_count
    k = len(eps)
    size = e + k
    d_inv = [Fraction(1) / Fraction(x) for x in point]

    def zeros() -> list[list[Fraction]]:
        return [[Fraction(0)] * size for _ in range(size)]

    lower, block, upper = zeros(), zeros(), zeros()
    for i in range(size):
        lower[i][i] = Fraction(1)
        upper[i][i] = Fraction(1)
    for a in range(k):
        for edge in range(e):
            if eps[a][edge]:
                lower[e + a][edge] = eps[a][edge] * d_inv[edge]
                upper[edge][e + a] = -d_inv[edge] * eps[a][edge]
    for edge in range(e):
        block[edge][edge] = Fraction(point[edge])
    for a in range(k):
        for b in range(k):
            block[e + a][e + b] = sum(
                (eps[a][edge] * eps[b][edge] * d_inv[edge] for edge in range(e)), Fraction(0)
            )
    return lower, block, upper


def graph_matrix_inverse_at(graph: Graph, point: Sequence[Scalar]) -> list[list[Fraction]]:
    return mat_inverse(graph_matrix(graph).eval_at(point))
