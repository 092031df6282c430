"""Hypothesis strategies for matrices and multigraphs."""

from hypothesis import strategies as st

from graphforms.graphs import Graph


@st.composite
def int_matrices(draw, min_size=1, max_size=4, bound=6):
    """Square integer matrices with small entries."""
    n = draw(st.integers(min_size, max_size))
    entry = st.integers(-bound, bound)
    return [[draw(entry) for _ in range(n)] for _ in range(n)]


@st.composite
def connected_graphs(draw, max_vertices=5, max_extra_edges=4, tadpoles=False):
    """Connected multigraphs: a random spanning tree plus extra edges."""
    v = draw(st.integers(1, max_vertices))
    edges = []
    for w in range(1, v):
        edges.append((draw(st.integers(0, w - 1)), w))
    extra = draw(st.integers(0, max_extra_edges))
    vertex = st.integers(0, v - 1)
    for _ in range(extra):
        t, h = draw(vertex), draw(vertex)
        if t == h and not tadpoles:
            continue
        edges.append((t, h))
    order = draw(st.permutations(range(len(edges))))
    return Graph(v, tuple(edges[i] for i in order))
