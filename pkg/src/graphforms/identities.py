"""Point checks for the structural identities of canonical forms.

Every check evaluates both sides exactly at positive integer (or rational)
points and compares the resulting component tensors. Agreement at random
points from a large range certifies a rational-function identity with
failure probability at most (degree bound) / (range size) per point.
"""

from __future__ import annotations

import logging
import random
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .errors import InvalidGraphError, InvariantViolation
from .forms import (
    ROUTES,
    CanonicalFormSpec,
    DiffForm,
    FormValue,
    beta5_dihedral_at,
    beta_at,
    beta_of_matrix_at,
    canonical_form,
    canonical_form_at,
    coproduct,
    cyclic_trace,
    generic_matrix,
    generic_symmetric_matrix,
    matrix_trace_power,
    maurer_cartan_trace,
    omega,
    omega_at,
    reduced_coproduct,
    top_coefficient_at,
)
from .graphs import (
    Graph,
    automorphisms,
    bridges,
    contract,
    degrees,
    delete,
    duplicate_edge,
    has_multi_edge,
    has_tadpole,
    induced_edge_permutation,
    is_connected,
    is_one_vertex_irreducible,
    one_vertex_join,
    planar_dual,
    subdivide,
    two_vertex_join,
    wheel,
)
from .laplacian import graph_polynomial, laplacian
from .models import CheckResult
from .polyring import MultiPoly, PolyMatrix, mat_inverse, mat_mul

logger = logging.getLogger(__name__)

POINT_RANGE = 10**6

Point = tuple[int, ...]


@dataclass(frozen=True)
class PointCertificate:
    """Result of comparing two sides at a batch of exact points."""

    points: int
    degree_bound: int | None
    mismatches: int
    first_mismatch: Point | None = None

    @property
    def passed(self) -> bool:
        return self.mismatches == 0

    @property
    def failure_bound(self) -> Fraction | None:
        """Schwartz-Zippel bound on a false pass, per point."""
        if self.degree_bound is None:
            return None
        return Fraction(self.degree_bound, POINT_RANGE)


def random_points(
    rng: random.Random, nvars: int, count: int, low: int = 1, high: int = POINT_RANGE
) -> list[Point]:
    """Positive integer points, one coordinate per variable."""
    return [tuple(rng.randint(low, high) for _ in range(nvars)) for _ in range(count)]


def point_certify(
    lhs: Callable[[Point], Any],
    rhs: Callable[[Point], Any],
    points: Sequence[Point],
    degree_bound: int | None = None,
) -> PointCertificate:
    """Compare two exact evaluators at every point."""
    mismatches = 0
    first = None
    for point in points:
        if lhs(point) != rhs(point):
            mismatches += 1
            if first is None:
                first = tuple(point)
                logger.debug("mismatch at %s", first)
    return PointCertificate(len(points), degree_bound, mismatches, first)


# -- graph identities -------------------------------------------------------


def duality_check(graph: Graph, k: int, point: Sequence[int]) -> bool:
    """omega of the planar dual equals the pullback of omega_G along x -> 1/x."""
    dual = planar_dual(graph)
    e = graph.edge_count
    inverted = [Fraction(1, x) for x in point]
    jacobian = [
        [Fraction(-1, point[i] ** 2) if i == j else 0 for j in range(e)] for i in range(e)
    ]
    lhs = omega_at(dual, k, point)
    rhs = omega_at(graph, k, inverted).pullback(jacobian, e)
    return lhs == rhs


def series_check(graph: Graph, edge: int, k: int, point: Sequence[int]) -> bool:
    """Subdividing an edge pulls back along x_e = y_e + y_new."""
    split = subdivide(graph, edge)
    e = graph.edge_count
    image = list(point[:e])
    image[edge] = point[edge] + point[e]
    jacobian = [[int(i == j) for j in range(e + 1)] for i in range(e)]
    jacobian[edge][e] = 1
    lhs = omega_at(split, k, point)
    rhs = omega_at(graph, k, image).pullback(jacobian, e + 1)
    return lhs == rhs


def parallel_check(graph: Graph, edge: int, k: int, point: Sequence[int]) -> bool:
    """Doubling an edge pulls back along x_e = y_e y_new / (y_e + y_new)."""
    doubled = duplicate_edge(graph, edge)
    e = graph.edge_count
    a, b = Fraction(point[edge]), Fraction(point[e])
    total = a + b
    image: list[Fraction | int] = list(point[:e])
    image[edge] = a * b / total
    jacobian: list[list[Fraction | int]] = [[int(i == j) for j in range(e + 1)] for i in range(e)]
    jacobian[edge][edge] = b * b / (total * total)
    jacobian[edge][e] = a * a / (total * total)
    lhs = omega_at(doubled, k, point)
    rhs = omega_at(graph, k, image).pullback(jacobian, e + 1)
    return lhs == rhs


def one_vertex_join_check(
    first: Graph, second: Graph, k: int, point: Sequence[int], v1: int = 0, v2: int = 0
) -> bool:
    """omega of a one-vertex join is the sum over the two pieces."""
    joined = one_vertex_join(first, second, v1, v2)
    e1, e = first.edge_count, joined.edge_count
    lhs = omega_at(joined, k, point)
    rhs = omega_at(first, k, point[:e1]).embed(range(e1), e) + omega_at(
        second, k, point[e1:]
    ).embed(range(e1, e), e)
    return lhs == rhs


def two_vertex_twist_check(
    first: Graph,
    second: Graph,
    pair1: tuple[int, int],
    pair2: tuple[int, int],
    k: int,
    point: Sequence[int],
) -> bool:
    """The two ways of gluing along a vertex pair give the same form."""
    straight = two_vertex_join(first, second, pair1, pair2)
    twisted = two_vertex_join(first, second, pair1, (pair2[1], pair2[0]))
    return omega_at(straight, k, point) == omega_at(twisted, k, point)


def _drop_index(value: FormValue, edge: int) -> FormValue:
    index_map = [i if i < edge else i - 1 for i in range(value.nvars)]
    return value.embed(index_map, value.nvars - 1)


def restriction_check(graph: Graph, edge: int, k: int, point: Sequence[int]) -> bool:
    """Setting x_e = 0 and dx_e = 0 gives the form of G/e."""
    if graph.edges[edge][0] == graph.edges[edge][1]:
        raise InvalidGraphError("restriction to x_e = 0 needs a non-tadpole edge")
    e = graph.edge_count
    on_face = list(point)
    on_face[edge] = 0
    keep = [i for i in range(e) if i != edge]
    lhs = _drop_index(omega_at(graph, k, on_face, edges=keep), edge)
    rhs = omega_at(contract(graph, edge), k, [point[i] for i in keep])
    return lhs == rhs


def deletion_value(graph: Graph, edge: int, k: int, point: Sequence[int]) -> FormValue:
    """Limit x_e -> infinity of the components of omega_G without dx_e.

    Works with x_e as the only symbolic variable, so every entry of the
    Dodgson matrix is a univariate polynomial.
    """
    n = 4 * k + 1
    e = graph.edge_count
    if edge in bridges(graph):
        raise InvalidGraphError(f"edge {edge} is a bridge; deleting it disconnects the graph")
    bundle = laplacian(graph)
    images: list[MultiPoly | Fraction] = [Fraction(x) for x in point]
    images[edge] = MultiPoly.variable(1, 0)
    lam = bundle.lambda_matrix.map(lambda p: p.compose(images, 1), nvars=1)
    basis = PolyMatrix.from_integers(bundle.basis, 1)
    dodgson = basis @ lam.adjugate() @ basis.transpose()
    psi = lam.det()
    slope = psi.coefficient_in(0, 1).constant_value()
    keys = [i for i in range(e) if i != edge]
    comps = cyclic_trace(lambda i, j: dodgson[i, j], keys, n)
    limits = {}
    for subset, numerator in comps.items():
        if numerator.degree_in(0) > n:
            raise InvariantViolation("component grows faster than the denominator")
        limits[subset] = Fraction(numerator.coefficient_in(0, n).constant_value()) / slope**n
    return _drop_index(FormValue(e, n, limits), edge)


def deletion_check(graph: Graph, edge: int, k: int, point: Sequence[int]) -> bool:
    """omega of G minus e is the leading behaviour of omega_G as x_e grows."""
    keep = [point[i] for i in range(graph.edge_count) if i != edge]
    return deletion_value(graph, edge, k, point) == omega_at(delete(graph, edge), k, keep)


def automorphism_check(graph: Graph, k: int, point: Sequence[int]) -> bool:
    """omega_G is invariant under every automorphism."""
    base = omega_at(graph, k, point)
    for sigma, _ in automorphisms(graph):
        perm = induced_edge_permutation(graph, sigma)
        moved = [0] * graph.edge_count
        for i, target in enumerate(perm):
            moved[target] = point[i]
        if omega_at(graph, k, moved) != base.permute(perm):
            return False
    return True


def route_check(graph: Graph, k: int, point: Sequence[int]) -> bool:
    """All evaluation routes agree."""
    values = [omega_at(graph, k, point, route=route) for route in ROUTES]
    return all(v == values[0] for v in values[1:])


def beta5_dihedral_check(graph: Graph, point: Sequence[int]) -> bool:
    return beta5_dihedral_at(graph, point) == omega_at(graph, 1, point, route="dodgson")


def wheel_congruence_check(n: int, point: Sequence[int], spoke: int = 0) -> bool:
    """With one spoke variable at 0, the top coefficient is (8n+2) / Psi^2."""
    graph = wheel(2 * n + 1)
    on_face = list(point)
    on_face[spoke] = 0
    psi = Fraction(graph_polynomial(graph).eval_rational(on_face))
    f = top_coefficient_at(graph, CanonicalFormSpec((n,)), on_face)
    return f == (8 * n + 2) / psi**2


# -- vanishing predictions --------------------------------------------------


def predicts_vanishing(graph: Graph, spec: CanonicalFormSpec) -> str | None:
    """Reason why omega_spec of a connected graph is zero, or None."""
    e = graph.edge_count
    if spec.degree > e:
        return "degree exceeds edge count"
    if spec.degree == e:
        return "projective form of top degree"
    if e != spec.degree + 1:
        return None
    if has_tadpole(graph):
        return "tadpole"
    if has_multi_edge(graph):
        return "multiple edge"
    if min(degrees(graph), default=0) <= 2:
        return "vertex of degree at most 2"
    if not is_one_vertex_irreducible(graph):
        return "one-vertex reducible"
    h = graph.loop_number
    three_regular = all(d == 3 for d in degrees(graph))
    if 3 * h < e + 3 or (3 * h == e + 3 and not three_regular):
        return "too few loops for the edge count"
    return None


def vanishing_check(graph: Graph, spec: CanonicalFormSpec, point: Sequence[int]) -> bool:
    """A predicted vanishing holds at the point; unpredicted graphs pass trivially."""
    if predicts_vanishing(graph, spec) is None:
        return True
    e = graph.edge_count
    if spec.degree > e:
        return True
    return canonical_form_at(graph, spec, point).is_zero()


# -- matrix identities ------------------------------------------------------


def _shifted(matrix: PolyMatrix, offset: int, nvars: int) -> PolyMatrix:
    index_map = [i + offset for i in range(matrix.nvars)]
    return matrix.map(lambda p: p.remap(index_map, nvars), nvars)


def _scaled_by_new_variable(matrix: PolyMatrix) -> PolyMatrix:
    nvars = matrix.nvars + 1
    scale = MultiPoly.variable(nvars, matrix.nvars)
    return _shifted(matrix, 0, nvars).scale(scale)


def transpose_rule_holds(matrix: PolyMatrix, n: int, point: Sequence[int]) -> bool:
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return beta_of_matrix_at(matrix.transpose(), n, point) == beta_of_matrix_at(
        matrix, n, point
    ).scale(sign)


def inverse_rule_holds(matrix: PolyMatrix, n: int, point: Sequence[int]) -> bool:
    value = matrix.eval_at(point)
    inverse = mat_inverse(value)
    derivatives = {}
    for v in range(matrix.nvars):
        d = matrix.derivative(v).eval_at(point)
        if any(x for row in d for x in row):
            derivatives[v] = [[-x for x in row] for row in mat_mul(mat_mul(inverse, d), inverse)]
    lhs = beta_at(inverse, derivatives, n, matrix.nvars)
    rhs = beta_of_matrix_at(matrix, n, point).scale((-1) ** n)
    return lhs == rhs


def direct_sum_rule_holds(first: PolyMatrix, second: PolyMatrix, n: int, point: Sequence[int]) -> bool:
    nvars = first.nvars + second.nvars
    a = _shifted(first, 0, nvars)
    b = _shifted(second, first.nvars, nvars)
    size = a.rows + b.rows
    entries: list[list[Any]] = [[0] * size for _ in range(size)]
    for i in range(a.rows):
        for j in range(a.cols):
            entries[i][j] = a[i, j]
    for i in range(b.rows):
        for j in range(b.cols):
            entries[a.rows + i][a.cols + j] = b[i, j]
    block = PolyMatrix(entries, nvars)
    total = beta_of_matrix_at(a, n, point) + beta_of_matrix_at(b, n, point)
    return beta_of_matrix_at(block, n, point) == total


def projective_rule_holds(matrix: PolyMatrix, n: int, point: Sequence[int]) -> bool:
    """beta^n of lambda X against beta^n of X, with the rank correction for n = 1."""
    scaled = _scaled_by_new_variable(matrix)
    nvars = scaled.nvars
    plain = _shifted(matrix, 0, nvars)
    expected = beta_of_matrix_at(plain, n, point)
    if n == 1:
        expected = expected + FormValue(nvars, 1, {(nvars - 1,): Fraction(matrix.rows, point[-1])})
    return beta_of_matrix_at(scaled, n, point) == expected


class _UntracedMatrices:
    """Matrix algebra whose 'trace' keeps the whole product."""

    @staticmethod
    def mul(a, b):
        return mat_mul(a, b)

    @staticmethod
    def add(a, b):
        return [[x + y for x, y in zip(ra, rb, strict=True)] for ra, rb in zip(a, b, strict=True)]

    @staticmethod
    def neg(a):
        return [[-x for x in row] for row in a]

    @staticmethod
    def trace(a):
        return a if any(x for row in a for x in row) else 0


def mu_power_vanishes(matrix: PolyMatrix, n: int, point: Sequence[int]) -> bool:
    """Whether the matrix-valued form (X^-1 dX)^n vanishes at the point; n even."""
    if n % 2:
        raise ValueError("mu_power_vanishes reports on even powers")
    inverse = mat_inverse(matrix.eval_at(point))
    factors = {}
    for v in range(matrix.nvars):
        d = matrix.derivative(v).eval_at(point)
        if any(x for row in d for x in row):
            factors[v] = mat_mul(inverse, d)
    if len(factors) < n:
        return True
    return not matrix_trace_power(factors, n, _UntracedMatrices())


# -- reports ----------------------------------------------------------------


def _result(name: str, outcomes: Sequence[bool], detail: str = "") -> CheckResult:
    failures = sum(1 for ok in outcomes if not ok)
    if failures:
        logger.warning("%s failed on %d of %d instances", name, failures, len(outcomes))
    return CheckResult(name=name, instances=len(outcomes), failures=failures, detail=detail)


def identity_checks(graph: Graph, k: int = 1, seed: int = 0, points: int = 2) -> list[CheckResult]:
    """Run the graph identities on one connected graph at a few random points."""
    if not is_connected(graph):
        raise InvalidGraphError(f"{graph.name()} is not connected")
    rng = random.Random(seed)
    e = graph.edge_count
    results = []

    def sample(nvars: int) -> list[Point]:
        return random_points(rng, nvars, points)

    loops = [i for i, (t, h) in enumerate(graph.edges) if t == h]
    if not loops:
        try:
            planar_dual(graph)
        except InvalidGraphError:
            pass
        else:
            results.append(
                _result("duality", [duality_check(graph, k, p) for p in sample(e)])
            )
    results.append(_result("series", [series_check(graph, 0, k, p) for p in sample(e + 1)]))
    results.append(_result("parallel", [parallel_check(graph, 0, k, p) for p in sample(e + 1)]))
    results.append(
        _result(
            "one-vertex join",
            [one_vertex_join_check(graph, graph, k, p) for p in sample(2 * e)],
        )
    )
    if graph.vertex_count >= 2:
        results.append(
            _result(
                "two-vertex twist",
                [two_vertex_twist_check(graph, graph, (0, 1), (0, 1), k, p) for p in sample(2 * e)],
            )
        )
    proper = [i for i in range(e) if i not in loops]
    if proper:
        results.append(
            _result("restriction", [restriction_check(graph, proper[0], k, p) for p in sample(e)])
        )
    cut = set(bridges(graph))
    deletable = [i for i in proper if i not in cut]
    if deletable:
        results.append(
            _result("deletion", [deletion_check(graph, deletable[0], k, p) for p in sample(e)])
        )
    results.append(_result("automorphisms", [automorphism_check(graph, k, p) for p in sample(e)]))
    results.append(_result("routes", [route_check(graph, k, p) for p in sample(e)]))
    if k == 1:
        results.append(_result("dihedral beta5", [beta5_dihedral_check(graph, p) for p in sample(e)]))
    return results


def random_graph(
    rng: random.Random, vertices: int, edges: int, tadpoles: bool = False
) -> Graph:
    """Connected multigraph: a random spanning tree plus random extra edges."""
    if edges < vertices - 1:
        raise ValueError("not enough edges to connect the vertices")
    order = list(range(vertices))
    rng.shuffle(order)
    chosen = [(order[rng.randrange(i)], order[i]) for i in range(1, vertices)]
    while len(chosen) < edges:
        t, h = rng.randrange(vertices), rng.randrange(vertices)
        if t == h and not tadpoles:
            continue
        chosen.append((t, h))
    rng.shuffle(chosen)
    return Graph(vertices, tuple(chosen))


def _random_cyclic_graph(rng: random.Random, edges: int, tadpoles: bool = False) -> Graph:
    while True:
        vertices = rng.randint(2, min(5, edges))
        graph = random_graph(rng, vertices, edges, tadpoles)
        if graph.loop_number >= 2:
            return graph


def _matrix_suite(rng: random.Random, instances: int) -> list[CheckResult]:
    results = []
    generic2 = generic_matrix(2)
    generic3 = generic_matrix(3)
    symmetric3 = generic_symmetric_matrix(3)

    def points(matrix: PolyMatrix, extra: int = 0) -> list[Point]:
        return random_points(rng, matrix.nvars + extra, instances, high=1000)

    results.append(
        _result(
            "even traces vanish",
            [beta_of_matrix_at(generic3, 2, p).is_zero() for p in points(generic3)],
        )
    )
    results.append(
        _result(
            "symmetric beta^3 vanishes",
            [beta_of_matrix_at(symmetric3, 3, p).is_zero() for p in points(symmetric3)],
        )
    )
    results.append(
        _result(
            "vanishing above twice the rank",
            [beta_of_matrix_at(generic2, 4, p).is_zero() for p in points(generic2)]
            + [beta_of_matrix_at(generic3, 7, p).is_zero() for p in points(generic3)[:2]],
        )
    )
    results.append(
        _result(
            "projective invariance",
            [projective_rule_holds(generic2, n, p) for n in (1, 3) for p in points(generic2, 1)],
        )
    )
    results.append(
        _result(
            "transpose rule",
            [transpose_rule_holds(generic2, n, p) for n in (1, 2, 3) for p in points(generic2)],
        )
    )
    results.append(
        _result(
            "inverse rule",
            [inverse_rule_holds(generic2, n, p) for n in (1, 2, 3) for p in points(generic2)],
        )
    )
    results.append(
        _result(
            "direct sum rule",
            [
                direct_sum_rule_holds(generic2, symmetric3, n, p)
                for n in (1, 3)
                for p in random_points(rng, 10, instances, high=1000)
            ],
        )
    )
    beta3 = maurer_cartan_trace(generic2, 3)
    beta1 = maurer_cartan_trace(symmetric3, 1)
    results.append(
        _result(
            "closedness and dlog",
            [
                beta3.exterior_derivative().is_zero(),
                beta1 == DiffForm.dlog(symmetric3.det()),
                maurer_cartan_trace(symmetric3, 5).exponent <= 2,
            ],
        )
    )
    vanished = [mu_power_vanishes(generic2, 4, p) for p in points(generic2)]
    results.append(
        CheckResult(
            name="mu^(2n) vanishing (report only)",
            instances=len(vanished),
            failures=0,
            detail=f"(X^-1 dX)^4 vanished on {sum(vanished)} of {len(vanished)} generic 2x2 points",
            informational=True,
        )
    )
    return results


def _graph_suite(rng: random.Random, instances: int) -> list[CheckResult]:
    spec = CanonicalFormSpec((1,))
    outcomes: dict[str, list[bool]] = {
        name: []
        for name in (
            "duality",
            "series",
            "parallel",
            "one-vertex join",
            "two-vertex twist",
            "restriction",
            "deletion",
            "routes",
            "vanishing conditions",
        )
    }
    for _ in range(instances):
        graph = _random_cyclic_graph(rng, rng.randint(6, 7))
        e = graph.edge_count
        point = random_points(rng, e, 1)[0]
        wide = random_points(rng, e + 1, 1)[0]
        outcomes["duality"].append(duality_check(graph, 1, point))
        outcomes["series"].append(series_check(graph, rng.randrange(e), 1, wide))
        outcomes["parallel"].append(parallel_check(graph, rng.randrange(e), 1, wide))
        outcomes["routes"].append(route_check(graph, 1, point))
        outcomes["restriction"].append(restriction_check(graph, rng.randrange(e), 1, point))
        deletable = [i for i in range(e) if i not in set(bridges(graph))]
        if deletable:
            outcomes["deletion"].append(deletion_check(graph, rng.choice(deletable), 1, point))
        small = _random_cyclic_graph(rng, 3)
        joined_point = random_points(rng, e + small.edge_count, 1)[0]
        outcomes["one-vertex join"].append(
            one_vertex_join_check(
                graph,
                small,
                1,
                joined_point,
                rng.randrange(graph.vertex_count),
                rng.randrange(small.vertex_count),
            )
        )
        outcomes["two-vertex twist"].append(
            two_vertex_twist_check(graph, small, (0, 1), (0, 1), 1, joined_point)
        )
        candidate = _random_cyclic_graph(rng, 6, tadpoles=True)
        outcomes["vanishing conditions"].append(
            vanishing_check(candidate, spec, random_points(rng, 6, 1)[0])
        )
    results = [_result(name, values) for name, values in outcomes.items()]
    fixtures = [wheel(3), wheel(4)]
    results.append(
        _result(
            "automorphism invariance",
            [automorphism_check(g, 1, random_points(rng, g.edge_count, 1)[0]) for g in fixtures],
        )
    )
    w3_form = omega(wheel(3), 1)
    results.append(
        _result(
            "pole order and projectivity",
            [
                w3_form.exponent <= 2,
                w3_form.euler_contraction().is_zero(),
                w3_form.exterior_derivative().is_zero(),
                canonical_form(wheel(3), CanonicalFormSpec((2,))).is_zero(),
            ],
        )
    )
    results.append(
        _result(
            "wheel congruence",
            [wheel_congruence_check(n, random_points(rng, 4 * n + 2, 1)[0]) for n in (1, 2)],
        )
    )
    results.append(
        _result(
            "coproduct",
            [
                len(coproduct(CanonicalFormSpec((1, 2)))) == 4,
                not reduced_coproduct(CanonicalFormSpec((1,))),
                [t.sign for t in reduced_coproduct(CanonicalFormSpec((1, 2)))] == [1, -1],
            ],
        )
    )
    return results


def run_property_suite(seed: int = 0, instances: int = 20) -> list[CheckResult]:
    """Every matrix and graph property on randomized instances."""
    rng = random.Random(seed)
    logger.info("property suite: seed=%d instances=%d", seed, instances)
    return _matrix_suite(rng, instances) + _graph_suite(rng, instances)
