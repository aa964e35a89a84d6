"""Graph families, the exhaustive desk corpus and a small named catalog."""
from __future__ import annotations

import random
from itertools import combinations_with_replacement, product
from typing import Iterator, Sequence

from .core import SignedGraph, graph_hash, is_connected
from .errors import PreconditionError

MAX_PARALLEL = 3
MAX_LOOPS = 2


def tree_with_leaf_loops(n: int, tree_edges: Sequence[tuple[int, int]]) -> SignedGraph:
    """A tree whose vertices all have degree 1 or 3, plus a negative loop at each leaf."""
    if len(tree_edges) != n - 1:
        raise PreconditionError("a tree on n vertices has n - 1 edges")
    deg = [0] * n
    for u, v in tree_edges:
        if u == v or not (0 <= u < n and 0 <= v < n):
            raise PreconditionError(f"invalid tree edge ({u}, {v})")
        deg[u] += 1
        deg[v] += 1
    if any(d not in (1, 3) for d in deg):
        raise PreconditionError("every tree vertex must have degree 1 or 3")
    g = SignedGraph.from_edges(n, [(u, v, 1) for u, v in tree_edges])
    if not is_connected(g):
        raise PreconditionError("edges do not form a tree")
    return g.with_edges_added([(v, v, -1) for v in range(n) if deg[v] == 1])


def caterpillar(internal: int) -> list[tuple[int, int]]:
    """Edges of the cubic caterpillar with ``internal`` spine vertices (0 gives a single edge)."""
    if internal < 0:
        raise PreconditionError("internal vertex count must be non-negative")
    if internal == 0:
        return [(0, 1)]
    edges = [(i, i + 1) for i in range(internal - 1)]
    nxt = internal
    for i in range(internal):
        legs = 2 if i in (0, internal - 1) else 1
        if internal == 1:
            legs = 3
        for _ in range(legs):
            edges.append((i, nxt))
            nxt += 1
    return edges


def fig1_family(shape: int | Sequence[tuple[int, int]]) -> SignedGraph:
    """Cubic tree with a negative loop on every leaf.

    ``shape`` is either the number of internal vertices (a caterpillar is
    used) or an explicit tree edge list.
    """
    if isinstance(shape, int):
        edges = caterpillar(shape)
    else:
        edges = [tuple(e) for e in shape]
    n = len(edges) + 1
    return tree_with_leaf_loops(n, edges)


def _slots(n: int) -> list[tuple[int, int]]:
    return [(u, v) for u in range(n) for v in range(u, n)]


def _cap(slot: tuple[int, int]) -> int:
    return MAX_LOOPS if slot[0] == slot[1] else MAX_PARALLEL


def underlying_graphs(max_vertices: int = 4, max_edges: int = 6) -> Iterator[tuple[int, tuple[tuple[int, int], ...]]]:
    """Connected labelled multigraphs ``(n, edge list)`` with ``1 <= m <= max_edges``.

    Edge lists are multisets of vertex pairs in sorted order, with at most
    three parallel edges per pair and two loops per vertex.
    """
    for n in range(1, max_vertices + 1):
        slots = _slots(n)
        for m in range(1, max_edges + 1):
            for combo in combinations_with_replacement(range(len(slots)), m):
                if any(combo.count(i) > _cap(slots[i]) for i in set(combo)):
                    continue
                edges = tuple(slots[i] for i in combo)
                if _connected(n, edges):
                    yield n, edges


def _connected(n: int, edges: Sequence[tuple[int, int]]) -> bool:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        parent[find(u)] = find(v)
    return len({find(v) for v in range(n)}) == 1


def corpus_enumerate(max_vertices: int = 4, max_edges: int = 6) -> Iterator[SignedGraph]:
    """Every corpus multigraph with each of its ``2^m`` signatures, deterministically."""
    for n, edges in underlying_graphs(max_vertices, max_edges):
        for signs in product((1, -1), repeat=len(edges)):
            yield SignedGraph.from_edges(n, [(u, v, s) for (u, v), s in zip(edges, signs)])


def random_signed(n: int, m: int, p_negative: float, seed: int) -> SignedGraph:
    """Connected random multigraph (same caps as the corpus) from a seeded RNG."""
    if n < 1 or m < 0:
        raise PreconditionError("need n >= 1 and m >= 0")
    if not 0.0 <= p_negative <= 1.0:
        raise PreconditionError("p_negative must lie in [0, 1]")
    slots = _slots(n)
    capacity = sum(_cap(s) for s in slots)
    if m < n - 1 or m > capacity:
        raise PreconditionError(f"{m} edges cannot form a connected graph on {n} vertices under the multiplicity caps")
    rng = random.Random(seed)
    order = list(range(n))
    rng.shuffle(order)
    pairs = []
    for i in range(1, n):
        a, b = order[i], order[rng.randrange(i)]
        pairs.append((min(a, b), max(a, b)))
    used = {s: pairs.count(s) for s in set(pairs)}
    while len(pairs) < m:
        s = slots[rng.randrange(len(slots))]
        if used.get(s, 0) < _cap(s):
            used[s] = used.get(s, 0) + 1
            pairs.append(s)
    rng.shuffle(pairs)
    return SignedGraph.from_edges(n, [(u, v, -1 if rng.random() < p_negative else 1) for u, v in pairs])


def _cycle(n: int, offset: int = 0) -> list[tuple[int, int]]:
    return [(offset + i, offset + (i + 1) % n) for i in range(n)]


def _petersen() -> SignedGraph:
    outer = _cycle(5)
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return SignedGraph.from_edges(10, outer + spokes + inner)


def _mobius_kantor() -> SignedGraph:
    # generalized Petersen graph GP(8, 3)
    outer = _cycle(8)
    spokes = [(i, i + 8) for i in range(8)]
    inner = [(8 + i, 8 + (i + 3) % 8) for i in range(8)]
    return SignedGraph.from_edges(16, outer + spokes + inner)


def _catalog() -> dict[str, SignedGraph]:
    f = SignedGraph.from_edges
    return {
        "triangle": f(3, [(0, 1), (1, 2), (0, 2)]),
        "negative_loop": f(1, [(0, 0, -1)]),
        "unbalanced_digon": f(2, [(0, 1, 1), (0, 1, -1)]),
        "barbell": f(2, [(0, 1, 1), (0, 0, -1), (1, 1, -1)]),
        "k13_loops": fig1_family(1),
        "two_triangles_bridge": f(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3)]),
        "theta": f(2, [(0, 1), (0, 1), (0, 1)]),
        # two branch vertices 0, 1; paths: direct positive, direct negative, through vertex 2
        "unbalanced_theta": f(3, [(0, 1, 1), (0, 1, -1), (0, 2, 1), (2, 1, 1)]),
        "k4": f(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]),
        "k5": f(5, [(u, v) for u in range(5) for v in range(u + 1, 5)]),
        "k33": f(6, [(u, v) for u in range(3) for v in range(3, 6)]),
        "prism": f(6, _cycle(3) + _cycle(3, 3) + [(i, i + 3) for i in range(3)]),
        "petersen": _petersen(),
        "mobius_kantor": _mobius_kantor(),
    }


NAMED = tuple(_catalog())
CUBIC_BRIDGELESS = ("k4", "k33", "prism", "petersen", "mobius_kantor")


def named(name: str) -> SignedGraph:
    cat = _catalog()
    if name not in cat:
        raise PreconditionError(f"unknown named graph {name!r}; choose from {', '.join(cat)}")
    return cat[name]


def corpus_manifest(max_vertices: int = 4, max_edges: int = 6) -> str:
    """Text manifest: generator parameters, multiplicity caps, then one hash per graph."""
    lines = [
        "# signed corpus manifest",
        f"max_vertices {max_vertices}",
        f"max_edges {max_edges}",
        f"max_parallel {MAX_PARALLEL}",
        f"max_loops {MAX_LOOPS}",
    ]
    count = 0
    for g in corpus_enumerate(max_vertices, max_edges):
        lines.append(graph_hash(g))
        count += 1
    lines.insert(5, f"count {count}")
    return "\n".join(lines) + "\n"
