"""Multigraphs with ordered edges.

The position of an edge in `Graph.edges` is its index, and the edge order is
the orientation used by the graph complex. Tadpoles (tail == head) and
parallel edges are allowed because contraction produces them.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from itertools import combinations

import networkx as nx

from .errors import InvalidGraphError, UsageError

Edge = tuple[int, int]


def _require_int(value: object, what: str) -> None:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InvalidGraphError(f"{what} must be an integer, got {value!r}")


@dataclass(frozen=True)
class Graph:
    """Finite multigraph with an ordered edge list."""

    vertex_count: int
    edges: tuple[Edge, ...] = ()
    label: str | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        _require_int(self.vertex_count, "vertex_count")
        edges = tuple((t, h) for t, h in self.edges)
        for index, (t, h) in enumerate(edges):
            _require_int(t, f"edge {index} tail")
            _require_int(h, f"edge {index} head")
        object.__setattr__(self, "edges", edges)
        if self.vertex_count < 0:
            raise InvalidGraphError("vertex_count must be nonnegative")
        for index, (t, h) in enumerate(edges):
            if not (0 <= t < self.vertex_count and 0 <= h < self.vertex_count):
                raise InvalidGraphError(
                    f"edge {index} = ({t}, {h}) has an endpoint outside 0..{self.vertex_count - 1}"
                )

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def is_empty(self) -> bool:
        return self.vertex_count == 0 and not self.edges

    @property
    def loop_number(self) -> int:
        return self.edge_count - self.vertex_count + len(components(self))

    @property
    def degree(self) -> int:
        """Graph degree e - 2h."""
        return self.edge_count - 2 * self.loop_number

    def name(self) -> str:
        return self.label or f"G(v={self.vertex_count}, e={self.edge_count})"

    def __repr__(self) -> str:
        return f"Graph({self.vertex_count}, {list(self.edges)}, label={self.label!r})"


EMPTY = Graph(0, (), label="empty")


class _UnionFind:
    __slots__ = ("parent",)

    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if ra < rb:
            self.parent[rb] = ra
        else:
            self.parent[ra] = rb
        return True

    def copy(self) -> _UnionFind:
        clone = _UnionFind.__new__(_UnionFind)
        clone.parent = list(self.parent)
        return clone


def _check_edge(graph: Graph, e: int) -> None:
    if not 0 <= e < graph.edge_count:
        raise InvalidGraphError(f"edge index {e} out of range for {graph.edge_count} edges")


# -- predicates and invariants ----------------------------------------------


def components(graph: Graph) -> list[list[int]]:
    """Vertex sets of connected components, ordered by smallest vertex."""
    uf = _UnionFind(graph.vertex_count)
    for t, h in graph.edges:
        uf.union(t, h)
    groups: dict[int, list[int]] = {}
    for v in range(graph.vertex_count):
        groups.setdefault(uf.find(v), []).append(v)
    return sorted(groups.values(), key=lambda vs: vs[0])


def is_connected(graph: Graph) -> bool:
    return len(components(graph)) == 1


def loop_number(graph: Graph) -> int:
    return graph.loop_number


def graph_degree(graph: Graph) -> int:
    return graph.degree


def degrees(graph: Graph) -> list[int]:
    """Vertex valences; a tadpole counts twice at its vertex."""
    out = [0] * graph.vertex_count
    for t, h in graph.edges:
        out[t] += 1
        out[h] += 1
    return out


def has_tadpole(graph: Graph) -> bool:
    return any(t == h for t, h in graph.edges)


def has_multi_edge(graph: Graph) -> bool:
    seen: set[Edge] = set()
    for t, h in graph.edges:
        if t == h:
            continue
        key = (min(t, h), max(t, h))
        if key in seen:
            return True
        seen.add(key)
    return False


def bridges(graph: Graph) -> list[int]:
    """Indices of edges whose removal disconnects their endpoints."""
    out = []
    for e, (t, h) in enumerate(graph.edges):
        if t == h:
            continue
        uf = _UnionFind(graph.vertex_count)
        for f, (a, b) in enumerate(graph.edges):
            if f != e:
                uf.union(a, b)
        if uf.find(t) != uf.find(h):
            out.append(e)
    return out


def is_core(graph: Graph) -> bool:
    """True iff the graph has no bridge."""
    return not bridges(graph)


def _edge_groups_without(graph: Graph, removed: set[int]) -> list[int]:
    """Sizes of the edge groups that meet only in the `removed` vertices."""
    uf = _UnionFind(graph.vertex_count)
    for t, h in graph.edges:
        if t not in removed and h not in removed:
            uf.union(t, h)
    groups: dict[int, int] = {}
    singles = 0
    for t, h in graph.edges:
        inner = [x for x in (t, h) if x not in removed]
        if inner:
            root = uf.find(inner[0])
            groups[root] = groups.get(root, 0) + 1
        else:
            singles += 1
    return list(groups.values()) + [1] * singles


def is_one_vertex_irreducible(graph: Graph) -> bool:
    """Connected and not a one-vertex join of two graphs with edges."""
    if not is_connected(graph):
        return False
    for v in range(graph.vertex_count):
        if len(_edge_groups_without(graph, {v})) >= 2:
            return False
    return True


def _splits(sizes: list[int], minimum: int) -> bool:
    total = sum(sizes)
    reachable = {0}
    for s in sizes:
        reachable |= {r + s for r in reachable}
    return any(minimum <= r <= total - minimum for r in reachable)


def is_two_vertex_reducible(graph: Graph) -> bool:
    """A two-vertex join of two pieces with at least two edges each."""
    if not is_connected(graph):
        return False
    for a, b in combinations(range(graph.vertex_count), 2):
        groups = _edge_groups_without(graph, {a, b})
        if len(groups) >= 2 and _splits(groups, 2):
            return True
    return False


# -- edge operations --------------------------------------------------------


def contract(graph: Graph, e: int) -> Graph:
    """Identify the endpoints of edge e and remove it; a tadpole is simply removed."""
    _check_edge(graph, e)
    t, h = graph.edges[e]
    rest = graph.edges[:e] + graph.edges[e + 1 :]
    if t == h:
        return Graph(graph.vertex_count, rest, graph.label and f"{graph.label}/e{e + 1}")
    keep, drop = min(t, h), max(t, h)

    def move(u: int) -> int:
        if u == drop:
            return keep
        return u - 1 if u > drop else u

    return Graph(
        graph.vertex_count - 1,
        tuple((move(a), move(b)) for a, b in rest),
        graph.label and f"{graph.label}/e{e + 1}",
    )


def contract_kill_loops(graph: Graph, e: int) -> Graph:
    """Like `contract`, but contracting a tadpole gives EMPTY."""
    _check_edge(graph, e)
    t, h = graph.edges[e]
    if t == h:
        return EMPTY
    return contract(graph, e)


def delete(graph: Graph, e: int) -> Graph:
    _check_edge(graph, e)
    return Graph(
        graph.vertex_count,
        graph.edges[:e] + graph.edges[e + 1 :],
        graph.label and f"{graph.label}\\e{e + 1}",
    )


def subdivide(graph: Graph, e: int) -> Graph:
    """Put a new vertex on edge e; e keeps its slot as (t, w) and (w, h) is appended."""
    _check_edge(graph, e)
    t, h = graph.edges[e]
    w = graph.vertex_count
    edges = list(graph.edges)
    edges[e] = (t, w)
    edges.append((w, h))
    return Graph(graph.vertex_count + 1, tuple(edges), graph.label and f"{graph.label}+s{e + 1}")


def duplicate_edge(graph: Graph, e: int) -> Graph:
    """Append a parallel copy of edge e."""
    _check_edge(graph, e)
    return Graph(
        graph.vertex_count,
        graph.edges + (graph.edges[e],),
        graph.label and f"{graph.label}+p{e + 1}",
    )


def edge_subgraph(graph: Graph, subset: Iterable[int]) -> Graph:
    """Subgraph spanned by the given edges, vertices renumbered in increasing order."""
    chosen = sorted(set(subset))
    used = sorted({v for e in chosen for v in graph.edges[e]})
    index = {v: i for i, v in enumerate(used)}
    return Graph(len(used), tuple((index[graph.edges[e][0]], index[graph.edges[e][1]]) for e in chosen))


def contract_subgraph(graph: Graph, subset: Iterable[int]) -> Graph:
    """Quotient G/gamma: collapse each component of the edge subset to a vertex."""
    chosen = set(subset)
    uf = _UnionFind(graph.vertex_count)
    for e in chosen:
        uf.union(*graph.edges[e])
    roots = sorted({uf.find(v) for v in range(graph.vertex_count)})
    index = {r: i for i, r in enumerate(roots)}
    edges = tuple(
        (index[uf.find(t)], index[uf.find(h)])
        for e, (t, h) in enumerate(graph.edges)
        if e not in chosen
    )
    return Graph(len(roots), edges)


def relabel(graph: Graph, vertex_perm: Sequence[int], edge_perm: Sequence[int]) -> Graph:
    """Send vertex v to vertex_perm[v] and edge i to position edge_perm[i]."""
    edges: list[Edge | None] = [None] * graph.edge_count
    for i, (t, h) in enumerate(graph.edges):
        edges[edge_perm[i]] = (vertex_perm[t], vertex_perm[h])
    return Graph(graph.vertex_count, tuple(edges), graph.label)  # type: ignore[arg-type]


def disjoint_union(first: Graph, second: Graph) -> Graph:
    offset = first.vertex_count
    return Graph(
        first.vertex_count + second.vertex_count,
        first.edges + tuple((t + offset, h + offset) for t, h in second.edges),
    )


def _glue(first: Graph, second: Graph, identify: dict[int, int]) -> Graph:
    mapping: dict[int, int] = {}
    nxt = first.vertex_count
    for v in range(second.vertex_count):
        if v in identify:
            mapping[v] = identify[v]
        else:
            mapping[v] = nxt
            nxt += 1
    return Graph(nxt, first.edges + tuple((mapping[t], mapping[h]) for t, h in second.edges))


def one_vertex_join(first: Graph, second: Graph, v1: int, v2: int) -> Graph:
    """Identify vertex v2 of `second` with vertex v1 of `first`; edges of `first` come first."""
    return _glue(first, second, {v2: v1})


def two_vertex_join(
    first: Graph, second: Graph, pair1: tuple[int, int], pair2: tuple[int, int]
) -> Graph:
    """Identify pair2 of `second` with pair1 of `first`."""
    if pair1[0] == pair1[1] or pair2[0] == pair2[1]:
        raise InvalidGraphError("a two-vertex join needs two distinct vertices on each side")
    return _glue(first, second, {pair2[0]: pair1[0], pair2[1]: pair1[1]})


# -- spanning trees and cycles ----------------------------------------------


def _require_connected(graph: Graph) -> None:
    if graph.vertex_count == 0 or not is_connected(graph):
        raise InvalidGraphError(f"{graph.name()} is not connected")


def spanning_trees(graph: Graph) -> list[tuple[int, ...]]:
    """All spanning trees as sorted tuples of edge indices, in lexicographic order."""
    _require_connected(graph)
    need = graph.vertex_count - 1
    edges = graph.edges
    out: list[tuple[int, ...]] = []

    def extend(i: int, chosen: list[int], uf: _UnionFind) -> None:
        if len(chosen) == need:
            out.append(tuple(chosen))
            return
        if len(edges) - i < need - len(chosen):
            return
        t, h = edges[i]
        if t != h and uf.find(t) != uf.find(h):
            grown = uf.copy()
            grown.union(t, h)
            chosen.append(i)
            extend(i + 1, chosen, grown)
            chosen.pop()
        extend(i + 1, chosen, uf)

    extend(0, [], _UnionFind(graph.vertex_count))
    return out


def spanning_tree(graph: Graph, order: Sequence[int] | None = None) -> list[int]:
    """Greedy spanning tree taking edges in `order` (default: index order)."""
    _require_connected(graph)
    uf = _UnionFind(graph.vertex_count)
    tree = []
    for e in order if order is not None else range(graph.edge_count):
        t, h = graph.edges[e]
        if uf.union(t, h):
            tree.append(e)
    return sorted(tree)


def incidence_matrix(graph: Graph) -> list[list[int]]:
    """Signed vertex-edge incidence: -1 at the tail, +1 at the head, 0 for tadpoles."""
    matrix = [[0] * graph.edge_count for _ in range(graph.vertex_count)]
    for e, (t, h) in enumerate(graph.edges):
        if t != h:
            matrix[t][e] -= 1
            matrix[h][e] += 1
    return matrix


def reduced_incidence(graph: Graph) -> list[list[int]]:
    """Incidence matrix with the row of the highest-index vertex removed."""
    return incidence_matrix(graph)[:-1]


def cycle_basis(graph: Graph, order: Sequence[int] | None = None) -> list[list[int]]:
    """Fundamental cycles of the greedy spanning tree, as an e x h integer matrix.

    Column j belongs to the j-th non-tree edge (in index order), carries +1 on
    that edge, and follows the tree path back from its head to its tail.
    """
    tree = spanning_tree(graph, order)
    in_tree = set(tree)
    adjacency: dict[int, list[tuple[int, int]]] = {v: [] for v in range(graph.vertex_count)}
    for e in tree:
        t, h = graph.edges[e]
        adjacency[t].append((h, e))
        adjacency[h].append((t, e))

    columns: list[list[int]] = []
    for f, (t, h) in enumerate(graph.edges):
        if f in in_tree:
            continue
        column = [0] * graph.edge_count
        column[f] = 1
        if t != h:
            # walk the tree from h to t
            previous: dict[int, tuple[int, int]] = {h: (-1, -1)}
            frontier = [h]
            while t not in previous:
                nxt = []
                for u in frontier:
                    for w, e in adjacency[u]:
                        if w not in previous:
                            previous[w] = (u, e)
                            nxt.append(w)
                frontier = nxt
            node = t
            while node != h:
                parent, e = previous[node]
                column[e] += 1 if graph.edges[e] == (parent, node) else -1
                node = parent
        columns.append(column)
    return [[col[e] for col in columns] for e in range(graph.edge_count)]


# -- canonical labeling -----------------------------------------------------


@dataclass(frozen=True)
class IsoCertificate:
    """Canonical form of a graph and the relabeling that reaches it."""

    canonical_key: bytes
    vertex_map: tuple[int, ...]
    edge_map: tuple[int, ...]
    edge_sign: int


def permutation_sign(perm: Sequence[int]) -> int:
    seen = [False] * len(perm)
    sign = 1
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        x = start
        while not seen[x]:
            seen[x] = True
            x = perm[x]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _multiplicities(graph: Graph) -> list[list[int]]:
    n = graph.vertex_count
    a = [[0] * n for _ in range(n)]
    for t, h in graph.edges:
        if t == h:
            a[t][t] += 1
        else:
            a[t][h] += 1
            a[h][t] += 1
    return a


def _refine(a: list[list[int]], colors: list[int]) -> list[int]:
    n = len(colors)
    count = len(set(colors))
    while True:
        signatures = [
            (
                colors[v],
                tuple(sorted((colors[u], a[v][u]) for u in range(n) if u != v and a[v][u])),
            )
            for v in range(n)
        ]
        ranking = {sig: rank for rank, sig in enumerate(sorted(set(signatures)))}
        colors = [ranking[sig] for sig in signatures]
        if len(ranking) == count:
            return colors
        count = len(ranking)


def _leaves(a: list[list[int]], colors: list[int]) -> Iterator[list[int]]:
    colors = _refine(a, colors)
    n = len(colors)
    if len(set(colors)) == n:
        yield colors
        return
    cells: dict[int, list[int]] = {}
    for v, c in enumerate(colors):
        cells.setdefault(c, []).append(v)
    target = min((c for c, vs in cells.items() if len(vs) > 1), key=lambda c: (len(cells[c]), c))
    for v in cells[target]:
        split = [2 * c + (1 if c == target and u != v else 0) for u, c in enumerate(colors)]
        yield from _leaves(a, split)


def _encode(a: list[list[int]], position: list[int]) -> tuple[int, ...]:
    n = len(position)
    inverse = [0] * n
    for v, p in enumerate(position):
        inverse[p] = v
    return tuple(a[inverse[i]][inverse[j]] for i in range(n) for j in range(i, n))


def _search(graph: Graph) -> tuple[tuple[int, ...], list[list[int]]]:
    """Minimal encoding and every leaf labeling that attains it."""
    a = _multiplicities(graph)
    n = graph.vertex_count
    if n == 0:
        return (), [[]]
    start = [(a[v][v], sum(a[v])) for v in range(n)]
    ranks = {c: i for i, c in enumerate(sorted(set(start)))}
    initial = [ranks[c] for c in start]
    best: tuple[int, ...] | None = None
    labelings: list[list[int]] = []
    for position in _leaves(a, initial):
        code = _encode(a, position)
        if best is None or code < best:
            best, labelings = code, [position]
        elif code == best:
            labelings.append(position)
    return best or (), labelings


def _edge_order(graph: Graph, position: Sequence[int]) -> list[int]:
    """Edge indices sorted by canonical endpoint pair, then by original index."""

    def key(e: int) -> tuple[int, int, int]:
        t, h = graph.edges[e]
        a, b = position[t], position[h]
        return (min(a, b), max(a, b), e)

    return sorted(range(graph.edge_count), key=key)


def canonical_certificate(graph: Graph) -> IsoCertificate:
    """Canonical key plus the vertex and edge relabeling into canonical order."""
    code, labelings = _search(graph)
    position = labelings[0]
    order = _edge_order(graph, position)
    edge_map = [0] * graph.edge_count
    for new, old in enumerate(order):
        edge_map[old] = new
    key = f"v{graph.vertex_count};" + ",".join(map(str, code))
    return IsoCertificate(
        canonical_key=key.encode(),
        vertex_map=tuple(position),
        edge_map=tuple(edge_map),
        edge_sign=permutation_sign(edge_map),
    )


def canonical_key(graph: Graph) -> bytes:
    return canonical_certificate(graph).canonical_key


def canonical_graph(graph: Graph) -> tuple[Graph, int]:
    """Relabel into canonical form; returns the graph and the orientation sign."""
    cert = canonical_certificate(graph)
    return relabel(graph, cert.vertex_map, cert.edge_map), cert.edge_sign


def induced_edge_permutation(graph: Graph, vertex_perm: Sequence[int]) -> list[int]:
    bundles: dict[Edge, list[int]] = {}
    for e, (t, h) in enumerate(graph.edges):
        bundles.setdefault((min(t, h), max(t, h)), []).append(e)
    perm = [0] * graph.edge_count
    for (t, h), members in bundles.items():
        a, b = vertex_perm[t], vertex_perm[h]
        images = bundles[(min(a, b), max(a, b))]
        for source, image in zip(members, images, strict=True):
            perm[source] = image
    return perm


def automorphisms(graph: Graph) -> list[tuple[tuple[int, ...], int]]:
    """Vertex automorphisms with the sign of their induced edge permutation.

    Parallel edges are matched in index order, so swaps inside a bundle are not
    listed separately.
    """
    _, labelings = _search(graph)
    base = labelings[0]
    out = []
    for position in labelings:
        inverse = [0] * len(position)
        for v, p in enumerate(position):
            inverse[p] = v
        sigma = tuple(inverse[base[v]] for v in range(len(base)))
        out.append((sigma, permutation_sign(induced_edge_permutation(graph, sigma))))
    return sorted(out)


def has_odd_automorphism(graph: Graph) -> bool:
    """True iff some automorphism permutes the edges oddly.

    Any parallel bundle of size two or more gives an odd swap.
    """
    seen: set[Edge] = set()
    for t, h in graph.edges:
        key = (min(t, h), max(t, h))
        if key in seen:
            return True
        seen.add(key)
    return any(sign < 0 for _, sign in automorphisms(graph))


def is_isomorphic(first: Graph, second: Graph) -> bool:
    return canonical_key(first) == canonical_key(second)


# -- planar duality ---------------------------------------------------------


def planar_dual(graph: Graph) -> Graph:
    """Planar dual for a chosen embedding; dual edge i crosses edge i.

    Raises:
        InvalidGraphError: For disconnected, tadpole-carrying or non-planar graphs.
    """
    _require_connected(graph)
    if has_tadpole(graph):
        raise InvalidGraphError("planar_dual does not accept tadpoles")
    simple = nx.Graph()
    simple.add_nodes_from(range(graph.vertex_count))
    anchor: list[Edge] = []
    extra = graph.vertex_count
    used: set[Edge] = set()
    for t, h in graph.edges:
        key = (min(t, h), max(t, h))
        if key in used:
            simple.add_edge(t, extra)
            simple.add_edge(extra, h)
            anchor.append((t, extra))
            extra += 1
        else:
            used.add(key)
            simple.add_edge(t, h)
            anchor.append((t, h))
    planar, embedding = nx.check_planarity(simple)
    if not planar:
        raise InvalidGraphError(f"{graph.name()} is not planar")
    face_of: dict[Edge, int] = {}
    faces = 0
    for u, w in sorted(embedding.edges()):
        if (u, w) in face_of:
            continue
        visited: set[Edge] = set()
        embedding.traverse_face(u, w, mark_half_edges=visited)
        for half in visited:
            face_of[half] = faces
        faces += 1
    dual_edges = tuple((face_of[(t, x)], face_of[(x, t)]) for t, x in anchor)
    return Graph(faces, dual_edges, graph.label and f"{graph.label}*")


# -- constructors and fixtures ----------------------------------------------


def wheel(n: int) -> Graph:
    """Hub 0 and rim 1..n; spokes (0, i) first, then rim edges (i, i+1)."""
    if n < 3:
        raise InvalidGraphError(f"a wheel needs at least 3 spokes, got {n}")
    spokes = tuple((0, i + 1) for i in range(n))
    rim = tuple((i + 1, (i + 1) % n + 1) for i in range(n))
    return Graph(n + 1, spokes + rim, f"W{n}")


def complete_graph(n: int) -> Graph:
    if n < 2:
        raise InvalidGraphError(f"complete_graph needs n >= 2, got {n}")
    return Graph(n, tuple(combinations(range(n), 2)), f"K{n}")


def cycle(n: int) -> Graph:
    if n < 1:
        raise InvalidGraphError(f"cycle needs n >= 1, got {n}")
    return Graph(n, tuple((i, (i + 1) % n) for i in range(n)), f"C{n}")


def banana(n: int) -> Graph:
    if n < 1:
        raise InvalidGraphError(f"banana needs n >= 1, got {n}")
    return Graph(2, ((0, 1),) * n, f"banana{n}")


def rose(h: int) -> Graph:
    return Graph(1, ((0, 0),) * h, f"R{h}")


def zigzag5() -> Graph:
    path = tuple((i, i + 1) for i in range(5))
    chords = tuple((i, i + 2) for i in range(4))
    return Graph(6, path + chords + ((5, 0),), "Z5")


def t5() -> Graph:
    half = delete(complete_graph(4), 0)
    joined = two_vertex_join(half, half, (0, 1), (0, 1))
    return Graph(joined.vertex_count, joined.edges, "T5")


def x5() -> Graph:
    # a = 0, b = 1, rim r0..r4 = 2..6
    edges = ((0, 1), (0, 2), (0, 3), (1, 4), (1, 5), (1, 6), (2, 3), (3, 4), (4, 5), (5, 6), (6, 2))
    return Graph(7, edges, "X5")


def w3_rim() -> Graph:
    """Three-spoke wheel with hub 0, rim edges first and spokes last."""
    return Graph(4, ((2, 3), (3, 1), (1, 2), (0, 1), (0, 2), (0, 3)), "W3rim")


# Cycle basis that reproduces the worked Laplacian of `w3_rim`.
W3_RIM_BASIS: tuple[tuple[int, ...], ...] = (
    (1, 0, 0),
    (0, 1, 0),
    (0, 0, 1),
    (0, -1, 1),
    (1, 0, -1),
    (-1, 1, 0),
)


def k4_subdivided() -> Graph:
    g = subdivide(complete_graph(4), 0)
    return Graph(g.vertex_count, g.edges, "K4sub")


FIXTURE_NAMES = (
    "W3", "W4", "W5", "W7", "Z5", "T5", "X5", "K4", "K6", "K4sub", "W3rim", "banana3",
)  # fmt: skip

_NAMED = {
    "Z5": zigzag5,
    "T5": t5,
    "X5": x5,
    "K4sub": k4_subdivided,
    "W3rim": w3_rim,
}

_PATTERN = re.compile(r"^(W|K|C|banana|R)\(?(\d+)\)?$")


def fixture(name: str) -> Graph:
    """Look up a named graph: Z5, T5, X5, K4sub, W3rim, Wn, Kn, Cn, Rn, bananaN.

    Raises:
        UsageError: If the name is unknown.
    """
    if name in _NAMED:
        return _NAMED[name]()
    match = _PATTERN.match(name)
    if match:
        family, size = match.group(1), int(match.group(2))
        builder = {"W": wheel, "K": complete_graph, "C": cycle, "banana": banana, "R": rose}
        try:
            return builder[family](size)
        except InvalidGraphError as exc:
            raise UsageError(str(exc)) from exc
    raise UsageError(f"unknown fixture {name!r}; known: {', '.join(FIXTURE_NAMES)}")


# -- serialization ----------------------------------------------------------


def to_dict(graph: Graph) -> dict:
    data: dict = {"v": graph.vertex_count, "edges": [list(e) for e in graph.edges]}
    if graph.label:
        data["label"] = graph.label
    return data


def from_dict(data: dict) -> Graph:
    try:
        return Graph(data["v"], tuple(tuple(e) for e in data["edges"]), data.get("label"))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InvalidGraphError):
            raise
        raise InvalidGraphError(f"malformed graph record: {exc}") from exc


def to_dot(graph: Graph) -> str:
    lines = [f'graph "{graph.name()}" {{']
    lines += [f"  {v};" for v in range(graph.vertex_count)]
    lines += [f'  {t} -- {h} [label="e{e + 1}"];' for e, (t, h) in enumerate(graph.edges)]
    lines.append("}")
    return "\n".join(lines)
