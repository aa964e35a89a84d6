"""Hypothesis strategies for small signed multigraphs."""
from __future__ import annotations

from hypothesis import strategies as st

from signedflow.core import SignedGraph


@st.composite
def signed_graphs(draw, max_n=4, max_m=6, min_m=0, ordinary=False):
    n = draw(st.integers(1, max_n))
    m = draw(st.integers(min_m, max_m))
    edges = []
    for _ in range(m):
        u = draw(st.integers(0, n - 1))
        v = draw(st.integers(0, n - 1))
        s = 1 if ordinary else draw(st.sampled_from((1, -1)))
        edges.append((u, v, s))
    return SignedGraph.from_edges(n, edges)
