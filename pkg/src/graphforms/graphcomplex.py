"""The graph complex: strata of generators, the two differentials, homology ranks.

A generator is a connected graph with no tadpoles and all vertices of degree
at least 3, oriented by its edge order. Chains store one canonical
representative per isomorphism class; a graph with an odd automorphism is
zero. Contracting or deleting edge i (counted from 1) carries the sign
(-1)^i, and canonicalizing multiplies by the sign of the edge relabeling.
"""

from __future__ import annotations

import functools
import logging
import time
from collections.abc import Iterable, Iterator, Mapping
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from pathlib import Path
from typing import TYPE_CHECKING

from .errors import BudgetExceededError, InvariantViolation, UsageError
from .graphs import (
    EMPTY,
    Graph,
    canonical_certificate,
    canonical_graph,
    contract_kill_loops,
    contract_subgraph,
    degrees,
    delete,
    edge_subgraph,
    has_odd_automorphism,
    has_tadpole,
    is_connected,
    is_core,
    permutation_sign,
    rose,
)
from .models import H_FLAGGED, H_REQUIRED, HomologyReport

if TYPE_CHECKING:
    from .storage import Cache

logger = logging.getLogger(__name__)

PRIME = 2**61 - 1
CHECK_PRIME = 2**31 - 1
EXACT_LIMIT = 2000

# dim H_n at loop order h, keyed by (h, n); every other entry up to h = 7 is zero.
KNOWN_DIMENSIONS: dict[tuple[int, int], int] = {
    (3, 0): 1,
    (5, 0): 1,
    (6, 3): 1,
    (7, 0): 1,
    (7, 3): 1,
}


def is_admissible(graph: Graph) -> bool:
    """Connected, tadpole-free, all degrees >= 3."""
    if graph.vertex_count == 0 or has_tadpole(graph) or not is_connected(graph):
        return False
    return min(degrees(graph)) >= 3


class GraphChain:
    """Finite rational combination of oriented graphs."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[bytes, tuple[Graph, Fraction]] | None = None):
        self.terms: dict[bytes, tuple[Graph, Fraction]] = {
            key: (g, Fraction(c)) for key, (g, c) in (terms or {}).items() if c
        }

    @classmethod
    def zero(cls) -> GraphChain:
        return cls()

    @classmethod
    def from_graph(cls, graph: Graph, coeff: int | Fraction = 1) -> GraphChain:
        """The chain coeff * [graph]; zero for non-generators and odd symmetry."""
        if graph is EMPTY or not coeff or not is_admissible(graph):
            return cls()
        if has_odd_automorphism(graph):
            return cls()
        cert = canonical_certificate(graph)
        canonical, sign = canonical_graph(graph)
        return cls({cert.canonical_key: (canonical, Fraction(coeff) * sign)})

    def is_zero(self) -> bool:
        return not self.terms

    def items(self) -> Iterator[tuple[Graph, Fraction]]:
        for key in sorted(self.terms):
            yield self.terms[key]

    def keys(self) -> list[bytes]:
        return sorted(self.terms)

    def coefficient(self, graph: Graph) -> Fraction:
        """Coefficient of [graph] in its own orientation."""
        if not is_admissible(graph) or has_odd_automorphism(graph):
            return Fraction(0)
        cert = canonical_certificate(graph)
        if cert.canonical_key not in self.terms:
            return Fraction(0)
        return self.terms[cert.canonical_key][1] * cert.edge_sign

    def __add__(self, other: GraphChain) -> GraphChain:
        terms = dict(self.terms)
        for key, (g, c) in other.terms.items():
            if key in terms:
                terms[key] = (terms[key][0], terms[key][1] + c)
            else:
                terms[key] = (g, c)
        return GraphChain(terms)

    def __neg__(self) -> GraphChain:
        return self * -1

    def __sub__(self, other: GraphChain) -> GraphChain:
        return self + (-other)

    def __mul__(self, scalar: int | Fraction) -> GraphChain:
        return GraphChain({k: (g, c * scalar) for k, (g, c) in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GraphChain):
            return NotImplemented
        return {k: c for k, (_, c) in self.terms.items()} == {
            k: c for k, (_, c) in other.terms.items()
        }

    def __hash__(self) -> int:
        return hash(frozenset((k, c) for k, (_, c) in self.terms.items()))

    def __len__(self) -> int:
        return len(self.terms)

    def __repr__(self) -> str:
        parts = [f"{c}*{g.name()}" for g, c in self.items()]
        return "GraphChain(" + " + ".join(parts) + ")" if parts else "GraphChain(0)"


def _apply(chain: GraphChain, operation) -> GraphChain:
    total = GraphChain()
    for graph, coeff in chain.items():
        for i in range(graph.edge_count):
            sign = -1 if (i + 1) % 2 else 1
            total = total + GraphChain.from_graph(operation(graph, i), coeff * sign)
    return total


def differential_d(chain: GraphChain) -> GraphChain:
    """Sum over edges of (-1)^i [G // e_i]."""
    return _apply(chain, contract_kill_loops)


def differential_delta(chain: GraphChain) -> GraphChain:
    """Sum over edges of (-1)^i [G \\ e_i]."""
    return _apply(chain, delete)


@dataclass(frozen=True)
class CoproductPair:
    """A core subgraph gamma of G with the quotient G / gamma."""

    edges: tuple[int, ...]
    subgraph: Graph
    quotient: Graph
    sign: int


def coproduct_ck(graph: Graph) -> list[CoproductPair]:
    """Proper nonempty core subgraphs with the shuffle sign of (E_gamma, E \\ E_gamma)."""
    e = graph.edge_count
    pairs = []
    for size in range(1, e):
        for subset in combinations(range(e), size):
            sub = edge_subgraph(graph, subset)
            if sub.loop_number < 1 or not is_core(sub):
                continue
            rest = [i for i in range(e) if i not in subset]
            pairs.append(
                CoproductPair(
                    edges=subset,
                    subgraph=sub,
                    quotient=contract_subgraph(graph, subset),
                    sign=permutation_sign(list(subset) + rest),
                )
            )
    return pairs


# -- strata -----------------------------------------------------------------


@dataclass(frozen=True)
class StratumBasis:
    """Generators of loop order h with e edges, sorted by canonical key."""

    h: int
    e: int
    graphs: tuple[Graph, ...] = ()
    keys: tuple[bytes, ...] = ()

    def __len__(self) -> int:
        return len(self.graphs)

    def index(self) -> dict[bytes, int]:
        return {key: i for i, key in enumerate(self.keys)}


def _half_edges(graph: Graph, w: int) -> list[tuple[int, int]]:
    halves = []
    for idx, (t, h) in enumerate(graph.edges):
        if t == w and h == w:
            halves += [(idx, 0), (idx, 1)]
        elif t == w:
            halves.append((idx, 0))
        elif h == w:
            halves.append((idx, 1))
    return halves


def vertex_splits(graph: Graph) -> Iterator[Graph]:
    """Every way of splitting a vertex into two joined by a new edge, both of degree >= 3."""
    u = graph.vertex_count
    for w in range(graph.vertex_count):
        halves = _half_edges(graph, w)
        d = len(halves)
        if d < 4:
            continue
        for mask in range(1 << (d - 1)):
            moved = [halves[i + 1] for i in range(d - 1) if mask >> i & 1]
            if not 2 <= len(moved) <= d - 2:
                continue
            edges = [list(edge) for edge in graph.edges]
            for idx, end in moved:
                edges[idx][end] = u
            edges.append([w, u])
            yield Graph(u + 1, tuple((t, h) for t, h in edges))


@functools.cache
def generate_loop_order(h: int) -> dict[int, StratumBasis]:
    """All strata of loop order h, keyed by edge count."""
    if h < 1:
        return {}
    start = time.perf_counter()
    level = {canonical_certificate(rose(h)).canonical_key: rose(h)}
    strata: dict[int, StratumBasis] = {}
    while level:
        e = next(iter(level.values())).edge_count
        found = sorted(
            (key, g)
            for key, g in level.items()
            if not has_tadpole(g) and not has_odd_automorphism(g)
        )
        strata[e] = StratumBasis(
            h=h,
            e=e,
            graphs=tuple(canonical_graph(g)[0] for _, g in found),
            keys=tuple(key for key, _ in found),
        )
        logger.debug("h=%d e=%d: %d graphs, %d generators", h, e, len(level), len(found))
        following: dict[bytes, Graph] = {}
        for graph in level.values():
            for split in vertex_splits(graph):
                key = canonical_certificate(split).canonical_key
                if key not in following:
                    following[key] = split
        level = following
    logger.info(
        "loop order %d: strata %s in %.2fs",
        h,
        {e: len(b) for e, b in sorted(strata.items()) if len(b)},
        time.perf_counter() - start,
    )
    return strata


def generate_stratum(h: int, e: int, cache: Cache | None = None) -> StratumBasis:
    """Generators with loop order h and e edges."""
    if h < 2 or e > 3 * (h - 1) or e <= h:
        return StratumBasis(h, e)
    if cache is not None:
        stored = cache.load_stratum(h, e)
        if stored is not None:
            return stored
    strata = generate_loop_order(h)
    if cache is not None:
        for basis in strata.values():
            cache.save_stratum(basis.h, basis.e, basis)
    return strata.get(e, StratumBasis(h, e))


# -- boundary matrices and ranks --------------------------------------------

SparseMatrix = dict[tuple[int, int], int]


def boundary_matrix(
    h: int, e: int, operator: str = "d", cache: Cache | None = None
) -> SparseMatrix:
    """Matrix of d from stratum (h, e) to (h, e-1), or of delta to (h-1, e-1)."""
    if operator not in ("d", "delta"):
        raise UsageError(f"unknown operator {operator!r}; expected d or delta")
    drop = 0 if operator == "d" else 1
    source = generate_stratum(h, e, cache)
    target = generate_stratum(h - drop, e - 1, cache)
    return _boundary(source, target, operator)


def _boundary(source: StratumBasis, target: StratumBasis, operator: str) -> SparseMatrix:
    apply = {"d": differential_d, "delta": differential_delta}[operator]
    index = target.index()
    matrix: SparseMatrix = {}
    for j, graph in enumerate(source.graphs):
        image = apply(GraphChain.from_graph(graph))
        for key, (_, coeff) in image.terms.items():
            if key not in index:
                raise InvariantViolation(
                    f"{operator} of a ({source.h}, {source.e}) generator left the target stratum"
                )
            if coeff.denominator != 1:
                raise InvariantViolation("boundary coefficient is not an integer")
            matrix[(index[key], j)] = int(coeff)
    return matrix


def _rows(matrix: Mapping[tuple[int, int], int]) -> dict[int, dict[int, int]]:
    rows: dict[int, dict[int, int]] = {}
    for (r, c), v in matrix.items():
        if v:
            rows.setdefault(r, {})[c] = v
    return rows


def rank_mod_p(matrix: Mapping[tuple[int, int], int], p: int = PRIME) -> int:
    pivots: dict[int, dict[int, int]] = {}
    for row in _rows(matrix).values():
        row = {c: v % p for c, v in row.items() if v % p}
        while row:
            c = min(row)
            pivot = pivots.get(c)
            if pivot is None:
                inverse = pow(row[c], -1, p)
                pivots[c] = {cc: vv * inverse % p for cc, vv in row.items()}
                break
            factor = row[c]
            for cc, vv in pivot.items():
                value = (row.get(cc, 0) - factor * vv) % p
                if value:
                    row[cc] = value
                else:
                    row.pop(cc, None)
    return len(pivots)


def rank_exact(matrix: Mapping[tuple[int, int], int]) -> int:
    pivots: dict[int, dict[int, Fraction]] = {}
    for raw in _rows(matrix).values():
        row = {c: Fraction(v) for c, v in raw.items()}
        while row:
            c = min(row)
            pivot = pivots.get(c)
            if pivot is None:
                lead = row[c]
                pivots[c] = {cc: vv / lead for cc, vv in row.items()}
                break
            factor = row[c]
            for cc, vv in pivot.items():
                value = row.get(cc, 0) - factor * vv
                if value:
                    row[cc] = value
                else:
                    row.pop(cc, None)
    return len(pivots)


def certified_rank(matrix: Mapping[tuple[int, int], int], shape: tuple[int, int]) -> int:
    """Rank over the large prime, confirmed by a second prime or exactly.

    Raises:
        InvariantViolation: If the two computations disagree.
    """
    rank = rank_mod_p(matrix, PRIME)
    if max(shape) <= EXACT_LIMIT:
        check, how = rank_exact(matrix), "exact"
    else:
        check, how = rank_mod_p(matrix, CHECK_PRIME), f"mod {CHECK_PRIME}"
    if check != rank:
        logger.error("rank mismatch on %s matrix: %d mod p vs %d %s", shape, rank, check, how)
        raise InvariantViolation(f"rank mismatch: {rank} mod {PRIME} vs {check} {how}")
    return rank


def compose_is_zero(first: SparseMatrix, second: SparseMatrix) -> bool:
    """True iff first @ second == 0."""
    by_row: dict[int, dict[int, int]] = {}
    for (r, c), v in second.items():
        by_row.setdefault(r, {})[c] = v
    product: dict[tuple[int, int], int] = {}
    for (i, k), a in first.items():
        for j, b in by_row.get(k, {}).items():
            product[(i, j)] = product.get((i, j), 0) + a * b
    return not any(product.values())


def check_square_zero(h: int, operator: str = "d", cache: Cache | None = None) -> bool:
    """d o d (or delta o delta) vanishes on every stratum of loop order h."""
    drop = 0 if operator == "d" else 1
    for e in range(h + 1, 3 * (h - 1) + 1):
        top = generate_stratum(h, e, cache)
        middle = generate_stratum(h - drop, e - 1, cache)
        bottom = generate_stratum(h - 2 * drop, e - 2, cache)
        if not len(top) or not len(middle) or not len(bottom):
            continue
        first = _boundary(middle, bottom, operator)
        second = _boundary(top, middle, operator)
        if not compose_is_zero(first, second):
            logger.error("%s squared is nonzero at h=%d e=%d", operator, h, e)
            return False
    return True


# -- homology ---------------------------------------------------------------


def _check_budget(h_max: int, allow_h7: bool) -> None:
    if h_max > H_FLAGGED or (h_max > H_REQUIRED and not allow_h7):
        raise BudgetExceededError(
            f"loop order {h_max} is beyond the budget (max {H_REQUIRED}, {H_FLAGGED} with allow_h7)"
        )


@dataclass
class LoopOrderHomology:
    h: int
    sizes: dict[int, int] = field(default_factory=dict)
    ranks: dict[int, int] = field(default_factory=dict)
    dimensions: dict[int, int] = field(default_factory=dict)


def loop_order_homology(h: int, cache: Cache | None = None) -> LoopOrderHomology:
    """dim H at every degree n = e - 2h for one loop order."""
    edge_range = range(h + 1, 3 * (h - 1) + 1)
    strata = {e: generate_stratum(h, e, cache) for e in edge_range}
    result = LoopOrderHomology(h)
    for e, basis in strata.items():
        result.sizes[e] = len(basis)
        below = strata.get(e - 1)
        if len(basis) and below is not None and len(below):
            matrix = _boundary(basis, below, "d")
            result.ranks[e] = certified_rank(matrix, (len(below), len(basis)))
        else:
            result.ranks[e] = 0
    for e in edge_range:
        dim = result.sizes[e] - result.ranks[e] - result.ranks.get(e + 1, 0)
        if dim < 0:
            raise InvariantViolation(f"negative homology dimension at h={h} e={e}")
        result.dimensions[e - 2 * h] = dim
    logger.info("loop order %d: homology %s", h, {n: d for n, d in result.dimensions.items() if d})
    return result


def homology_dimensions(
    h: int, degrees: Iterable[int] | None = None, cache: Cache | None = None
) -> dict[int, int]:
    """dim H_n at loop order h for the requested degrees (all by default)."""
    _check_budget(h, allow_h7=True)
    dims = loop_order_homology(h, cache).dimensions if h >= 2 else {}
    if degrees is None:
        return dims
    return {n: dims.get(n, 0) for n in degrees}


def euler_check(h: int, cache: Cache | None = None) -> bool:
    """Alternating sums of stratum sizes and of homology dimensions agree."""
    result = loop_order_homology(h, cache)
    chains = sum((-1) ** e * size for e, size in result.sizes.items())
    homology = sum((-1) ** (n + 2 * h) * d for n, d in result.dimensions.items())
    return chains == homology


def _loop_order_worker(h: int, cache_path: Path | None) -> LoopOrderHomology:
    from .storage import Cache

    return loop_order_homology(h, Cache(cache_path) if cache_path is not None else None)


def homology_report(
    h_max: int,
    allow_h7: bool = False,
    workers: int = 1,
    cache: Cache | None = None,
    e_max: int | None = None,
) -> HomologyReport:
    """Homology dimensions for loop orders 1..h_max.

    Raises:
        BudgetExceededError: If h_max is beyond the budget.
    """
    _check_budget(h_max, allow_h7)
    orders = list(range(2, h_max + 1))
    if workers > 1:
        cache_path = cache.base_path if cache is not None else None
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_loop_order_worker, orders, [cache_path] * len(orders)))
    else:
        results = [loop_order_homology(h, cache) for h in orders]
    report = HomologyReport(h_max=h_max)
    for result in results:
        for e, size in result.sizes.items():
            if e_max is None or e <= e_max:
                report.stratum_sizes[(result.h, e)] = size
        for n, d in result.dimensions.items():
            if d and (e_max is None or n + 2 * result.h <= e_max):
                report.dimensions[(n, result.h)] = d
    return report
