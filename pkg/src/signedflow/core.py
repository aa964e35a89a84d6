"""Signed multigraphs and their structural predicates.

Vertices and edges are dense integer indices. Edge ``e = (u, v, sign)`` owns two
half-edges: ``(e, 0)`` sitting at ``u`` and ``(e, 1)`` sitting at ``v``. A loop has
both half-edges at the same vertex, so it contributes two to the degree.
"""
from __future__ import annotations

import hashlib
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple, Sequence

from .errors import FormatError, PreconditionError, SizeLimitError

NEGATIVENESS_LIMIT = 24

HalfEdge = tuple[int, int]


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    sign: int

    @property
    def is_loop(self) -> bool:
        return self.u == self.v

    def end(self, side: int) -> int:
        return self.u if side == 0 else self.v


@dataclass(frozen=True)
class SignedGraph:
    n: int
    edges: tuple[Edge, ...] = field(default=())

    def __post_init__(self):
        if self.n < 0:
            raise PreconditionError("vertex count must be non-negative")
        for i, e in enumerate(self.edges):
            if e.sign not in (-1, 1):
                raise PreconditionError(f"edge {i}: sign must be -1 or +1, got {e.sign!r}")
            if not (0 <= e.u < self.n and 0 <= e.v < self.n):
                raise PreconditionError(f"edge {i}: endpoint out of range for n={self.n}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "SignedGraph":
        """Build from ``(u, v)`` or ``(u, v, sign)`` tuples; sign defaults to +1."""
        out = []
        for t in edges:
            if len(t) == 2:
                out.append(Edge(int(t[0]), int(t[1]), 1))
            else:
                out.append(Edge(int(t[0]), int(t[1]), int(t[2])))
        return cls(n, tuple(out))

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def incidence(self) -> tuple[tuple[HalfEdge, ...], ...]:
        inc: list[list[HalfEdge]] = [[] for _ in range(self.n)]
        for i, e in enumerate(self.edges):
            inc[e.u].append((i, 0))
            inc[e.v].append((i, 1))
        return tuple(tuple(sorted(h)) for h in inc)

    def endpoint(self, e: int, side: int) -> int:
        return self.edges[e].end(side)

    def other_end(self, e: int, side: int) -> int:
        return self.edges[e].end(1 - side)

    def degree(self, v: int) -> int:
        return len(self.incidence[v])

    def degrees(self) -> list[int]:
        return [len(h) for h in self.incidence]

    def max_degree(self) -> int:
        return max(self.degrees(), default=0)

    def vertices_of_degree(self, d: int) -> frozenset[int]:
        return frozenset(v for v in range(self.n) if self.degree(v) == d)

    def incident_edges(self, v: int) -> list[int]:
        return sorted({e for e, _ in self.incidence[v]})

    def signs(self) -> tuple[int, ...]:
        return tuple(e.sign for e in self.edges)

    def negative_edges(self) -> frozenset[int]:
        return frozenset(i for i, e in enumerate(self.edges) if e.sign < 0)

    def with_signs(self, signs: Sequence[int]) -> "SignedGraph":
        if len(signs) != self.m:
            raise PreconditionError("one sign per edge required")
        return SignedGraph(self.n, tuple(Edge(e.u, e.v, s) for e, s in zip(self.edges, signs)))

    def with_edges_added(self, extra: Iterable[Sequence[int]], n: int | None = None) -> "SignedGraph":
        added = tuple(Edge(int(u), int(v), int(s)) for u, v, s in extra)
        return SignedGraph(self.n if n is None else n, self.edges + added)

    def ordinary(self) -> bool:
        return all(e.sign == 1 for e in self.edges)

    def __repr__(self) -> str:
        body = ", ".join(f"{e.u}{'+' if e.sign > 0 else '-'}{e.v}" for e in self.edges)
        return f"SignedGraph(n={self.n}, [{body}])"


@dataclass(frozen=True)
class SubgraphHandle:
    """An edge subset of a parent graph together with its vertex support."""

    edges: frozenset[int]
    vertices: frozenset[int]

    @classmethod
    def from_edges(cls, g: SignedGraph, edges: Iterable[int], vertices: Iterable[int] = ()) -> "SubgraphHandle":
        es = frozenset(edges)
        for e in es:
            if not 0 <= e < g.m:
                raise PreconditionError(f"unknown edge {e}")
        vs = set(vertices)
        for e in es:
            vs.add(g.edges[e].u)
            vs.add(g.edges[e].v)
        return cls(es, frozenset(vs))


def _edge_ids(c) -> frozenset[int]:
    if isinstance(c, SubgraphHandle):
        return c.edges
    return frozenset(c)


def _check_vertex(g: SignedGraph, v: int) -> None:
    if not (isinstance(v, int) and 0 <= v < g.n):
        raise PreconditionError(f"invalid vertex {v!r} for graph with {g.n} vertices")


# --- switching and balance -------------------------------------------------

def switch(g: SignedGraph, v: int) -> SignedGraph:
    """Negate every non-loop edge at ``v``. Loops are flipped twice, i.e. kept."""
    _check_vertex(g, v)
    return SignedGraph(g.n, tuple(
        Edge(e.u, e.v, -e.sign) if (not e.is_loop and v in (e.u, e.v)) else e
        for e in g.edges
    ))


def switch_set(g: SignedGraph, vertices: Iterable[int]) -> SignedGraph:
    U = set(vertices)
    for v in U:
        _check_vertex(g, v)
    return SignedGraph(g.n, tuple(
        Edge(e.u, e.v, -e.sign) if ((e.u in U) != (e.v in U)) else e
        for e in g.edges
    ))


def balancing_potential(g: SignedGraph, edges: Iterable[int] | None = None) -> list[int] | None:
    """Return ``s`` with ``sign(e) == s[u] * s[v]`` on every edge, or None if unbalanced.

    Unreached vertices get potential 0. With ``edges`` only that edge subset is used.
    """
    allowed = None if edges is None else set(edges)
    s = [0] * g.n
    for root in range(g.n):
        if s[root]:
            continue
        s[root] = 1
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for e, side in g.incidence[x]:
                if allowed is not None and e not in allowed:
                    continue
                edge = g.edges[e]
                y = edge.end(1 - side)
                if s[y] == 0:
                    s[y] = s[x] * edge.sign
                    queue.append(y)
                elif s[y] != s[x] * edge.sign:
                    return None
    return s


def is_balanced(g: SignedGraph, edges: Iterable[int] | None = None) -> bool:
    return balancing_potential(g, edges) is not None


def circuit_sign(g: SignedGraph, c) -> int:
    es = _edge_ids(c)
    if not is_circuit(g, es):
        raise PreconditionError("edge set is not a circuit")
    prod = 1
    for e in es:
        prod *= g.edges[e].sign
    return prod


def is_circuit(g: SignedGraph, edges: Iterable[int]) -> bool:
    es = set(edges)
    if not es:
        return False
    deg: dict[int, int] = {}
    for e in es:
        if not 0 <= e < g.m:
            return False
        edge = g.edges[e]
        deg[edge.u] = deg.get(edge.u, 0) + 1
        deg[edge.v] = deg.get(edge.v, 0) + 1
    if any(d != 2 for d in deg.values()):
        return False
    return len(components_of_edges(g, es)) == 1


def circuit_walk(g: SignedGraph, edges: Iterable[int], start: int | None = None) -> list[tuple[int, int, int]]:
    """Traverse a circuit as ``[(vertex, edge, side_at_vertex), ...]``.

    Each step leaves ``vertex`` along ``edge`` through half-edge ``(edge, side)``.
    """
    es = set(edges)
    if not is_circuit(g, es):
        raise PreconditionError("edge set is not a circuit")
    verts = {g.edges[e].u for e in es} | {g.edges[e].v for e in es}
    v0 = min(verts) if start is None else start
    if v0 not in verts:
        raise PreconditionError(f"vertex {start} is not on the circuit")
    walk = []
    used: set[int] = set()
    x = v0
    while len(used) < len(es):
        for e, side in g.incidence[x]:
            if e in es and e not in used:
                walk.append((x, e, side))
                used.add(e)
                x = g.other_end(e, side)
                break
    return walk


def negativeness(g: SignedGraph, limit: int = NEGATIVENESS_LIMIT) -> int:
    """Minimum number of negative edges over the switching class.

    Exhaustive over switching sets, one vertex fixed per component, walked in
    Gray-code order. Disconnected graphs sum their components.
    """
    if g.n > limit:
        raise SizeLimitError(f"negativeness is exhaustive; {g.n} vertices exceeds limit {limit}")
    total = 0
    for comp in components(g):
        total += _component_negativeness(g, comp)
    return total


def _component_negativeness(g: SignedGraph, comp: list[int]) -> int:
    loops_negative = 0
    negative_now: dict[int, bool] = {}
    in_comp = set(comp)
    for e, edge in enumerate(g.edges):
        if edge.u not in in_comp:
            continue
        if edge.is_loop:
            loops_negative += edge.sign < 0
        else:
            negative_now[e] = edge.sign < 0
    current = sum(negative_now.values())
    best = current
    free = comp[1:]
    for i in range(1, 1 << len(free)):
        x = free[(i & -i).bit_length() - 1]
        for e, _ in g.incidence[x]:
            if e in negative_now:
                current += -1 if negative_now[e] else 1
                negative_now[e] = not negative_now[e]
        if current < best:
            best = current
    return best + loops_negative


# --- connectivity ------------------------------------------------------------

def components(g: SignedGraph) -> list[list[int]]:
    """Connected components as sorted vertex lists, ordered by smallest vertex."""
    seen = [False] * g.n
    out = []
    for root in range(g.n):
        if seen[root]:
            continue
        seen[root] = True
        comp = [root]
        stack = [root]
        while stack:
            x = stack.pop()
            for e, side in g.incidence[x]:
                y = g.other_end(e, side)
                if not seen[y]:
                    seen[y] = True
                    comp.append(y)
                    stack.append(y)
        out.append(sorted(comp))
    return out


def components_of_edges(g: SignedGraph, edges: Iterable[int]) -> list[list[int]]:
    """Components (as vertex lists) of the subgraph formed by an edge set; isolated vertices dropped."""
    parent = list(range(g.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    touched = set()
    for e in edges:
        edge = g.edges[e]
        touched.add(edge.u)
        touched.add(edge.v)
        a, b = find(edge.u), find(edge.v)
        if a != b:
            parent[a] = b
    groups: dict[int, list[int]] = {}
    for v in sorted(touched):
        groups.setdefault(find(v), []).append(v)
    return sorted(groups.values())


def is_connected(g: SignedGraph) -> bool:
    return len(components(g)) <= 1


def count_components(g: SignedGraph, skip_edge: int | None = None) -> int:
    edges = [e for e in range(g.m) if e != skip_edge]
    comps = components_of_edges(g, edges)
    touched = {v for c in comps for v in c}
    return len(comps) + (g.n - len(touched))


def bridges(g: SignedGraph) -> frozenset[int]:
    """Cut-edges by iterative low-link DFS keyed on edge ids (parallel edges are never bridges)."""
    disc = [-1] * g.n
    low = [0] * g.n
    found: set[int] = set()
    clock = 0
    for root in range(g.n):
        if disc[root] != -1:
            continue
        disc[root] = low[root] = clock
        clock += 1
        stack: list[tuple[int, int, Iterator[HalfEdge]]] = [(root, -1, iter(g.incidence[root]))]
        while stack:
            v, parent_edge, it = stack[-1]
            descended = False
            for e, side in it:
                if e == parent_edge:
                    continue
                w = g.other_end(e, side)
                if w == v:
                    continue
                if disc[w] == -1:
                    disc[w] = low[w] = clock
                    clock += 1
                    stack.append((w, e, iter(g.incidence[w])))
                    descended = True
                    break
                low[v] = min(low[v], disc[w])
            if not descended:
                stack.pop()
                if stack:
                    p = stack[-1][0]
                    low[p] = min(low[p], low[v])
                    if low[v] > disc[p]:
                        found.add(parent_edge)
    return frozenset(found)


def is_bridgeless(g: SignedGraph) -> bool:
    return not bridges(g)


def blocks(g: SignedGraph) -> list[list[int]]:
    """Edge sets of the blocks (maximal 2-connected pieces); every loop is its own block."""
    disc = [-1] * g.n
    low = [0] * g.n
    out: list[list[int]] = []
    estack: list[int] = []
    clock = 0
    for root in range(g.n):
        if disc[root] != -1:
            continue
        disc[root] = low[root] = clock
        clock += 1
        stack: list[tuple[int, int, Iterator[HalfEdge]]] = [(root, -1, iter(g.incidence[root]))]
        while stack:
            v, parent_edge, it = stack[-1]
            descended = False
            for e, side in it:
                if e == parent_edge:
                    continue
                w = g.other_end(e, side)
                if w == v:
                    continue
                if disc[w] == -1:
                    estack.append(e)
                    disc[w] = low[w] = clock
                    clock += 1
                    stack.append((w, e, iter(g.incidence[w])))
                    descended = True
                    break
                if disc[w] < disc[v]:
                    estack.append(e)
                    low[v] = min(low[v], disc[w])
            if not descended:
                stack.pop()
                if stack:
                    p = stack[-1][0]
                    low[p] = min(low[p], low[v])
                    if low[v] >= disc[p]:
                        block = []
                        while True:
                            e = estack.pop()
                            block.append(e)
                            if e == parent_edge:
                                break
                        out.append(sorted(block))
    for e, edge in enumerate(g.edges):
        if edge.is_loop:
            out.append([e])
    return sorted(out)


def cut_vertices(g: SignedGraph) -> frozenset[int]:
    """Vertices lying in two or more loopless blocks."""
    count = [0] * g.n
    for block in blocks(g):
        if len(block) == 1 and g.edges[block[0]].is_loop:
            continue
        vs = {g.edges[e].u for e in block} | {g.edges[e].v for e in block}
        for v in vs:
            count[v] += 1
    return frozenset(v for v in range(g.n) if count[v] >= 2)


# --- subgraphs -----------------------------------------------------------------

class EdgeSubgraph(NamedTuple):
    graph: SignedGraph
    vertex_map: tuple[int, ...]   # new vertex -> parent vertex
    edge_map: tuple[int, ...]     # new edge -> parent edge


def edge_subgraph(g: SignedGraph, edges: Iterable[int], vertices: Iterable[int] = ()) -> EdgeSubgraph:
    """Materialise an edge subset as a standalone graph.

    Vertices are relabelled in increasing parent order; each edge keeps its
    ``(u, v)`` direction, so half-edge sides (and therefore orientations) carry over.
    """
    es = sorted(set(edges))
    vs = set(vertices)
    for e in es:
        vs.add(g.edges[e].u)
        vs.add(g.edges[e].v)
    vmap = tuple(sorted(vs))
    index = {v: i for i, v in enumerate(vmap)}
    sub = SignedGraph(len(vmap), tuple(
        Edge(index[g.edges[e].u], index[g.edges[e].v], g.edges[e].sign) for e in es
    ))
    return EdgeSubgraph(sub, vmap, tuple(es))


def delete_vertices(g: SignedGraph, vertices: Iterable[int]) -> EdgeSubgraph:
    """``g - X``: drop the vertices and every edge touching them."""
    X = set(vertices)
    keep_v = [v for v in range(g.n) if v not in X]
    keep_e = [e for e, edge in enumerate(g.edges) if edge.u not in X and edge.v not in X]
    return edge_subgraph(g, keep_e, keep_v)


# --- suppression ---------------------------------------------------------------

@dataclass(frozen=True)
class SuppressProvenance:
    # paths[new_edge] = ((orig_edge, side_at_start), ...) walked from new u to new v
    paths: tuple[tuple[HalfEdge, ...], ...]
    vertex_map: tuple[int, ...]

    def image_of_edge(self, e: int) -> int:
        for i, path in enumerate(self.paths):
            if any(pe == e for pe, _ in path):
                return i
        raise KeyError(e)


def _suppressible(g: SignedGraph, v: int) -> bool:
    inc = g.incidence[v]
    return len(inc) == 2 and inc[0][0] != inc[1][0]


def suppress(g: SignedGraph) -> tuple[SignedGraph, SuppressProvenance]:
    """Replace every maximal path through 2-vertices by one edge carrying the path's sign product.

    A component that is a circuit of 2-vertices collapses onto its smallest
    vertex as a single loop.
    """
    if g.m == 0:
        raise PreconditionError("cannot suppress a graph without edges")
    kept = {v for v in range(g.n) if not _suppressible(g, v)}
    used: set[int] = set()
    paths: list[tuple[HalfEdge, ...]] = []

    def walk(start: int, e: int, side: int) -> tuple[HalfEdge, ...]:
        steps = [(e, side)]
        used.add(e)
        x = g.other_end(e, side)
        while x not in kept:
            (e1, s1), (e2, s2) = g.incidence[x]
            nxt = (e2, s2) if e1 == steps[-1][0] else (e1, s1)
            steps.append(nxt)
            used.add(nxt[0])
            x = g.other_end(*nxt)
        return tuple(steps)

    def collect():
        for v in sorted(kept):
            for e, side in g.incidence[v]:
                if e not in used:
                    paths.append(walk(v, e, side))

    collect()
    while len(used) < g.m:
        # leftover edges form circuits of 2-vertices
        w0 = min(g.edges[e].u for e in range(g.m) if e not in used)
        kept.add(w0)
        collect()

    def canonical(p: tuple[HalfEdge, ...]) -> tuple[HalfEdge, ...]:
        if len(p) == 1 and p[0][1] == 1:
            return ((p[0][0], 0),)
        return p

    paths = sorted((canonical(p) for p in paths), key=lambda p: min(e for e, _ in p))
    vmap = tuple(sorted(kept))
    index = {v: i for i, v in enumerate(vmap)}
    new_edges = []
    for p in paths:
        sign = 1
        for e, _ in p:
            sign *= g.edges[e].sign
        a = g.endpoint(p[0][0], p[0][1])
        b = g.other_end(p[-1][0], p[-1][1])
        new_edges.append(Edge(index[a], index[b], sign))
    return SignedGraph(len(vmap), tuple(new_edges)), SuppressProvenance(tuple(paths), vmap)


# --- hashing and text format -------------------------------------------------------

def canonical_string(g: SignedGraph) -> str:
    triples = sorted((min(e.u, e.v), max(e.u, e.v), e.sign) for e in g.edges)
    body = ";".join(f"{a},{b},{'+' if s > 0 else '-'}" for a, b, s in triples)
    return f"v{g.n}|{body}"


def graph_hash(g: SignedGraph) -> str:
    return hashlib.sha256(canonical_string(g).encode()).hexdigest()


def parse_graph(text: str) -> SignedGraph:
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "v" and len(parts) == 2:
                if n is not None:
                    raise FormatError(f"line {lineno}: duplicate vertex count")
                n = int(parts[1])
            elif parts[0] == "e" and len(parts) == 4:
                if parts[3] not in ("+", "-"):
                    raise FormatError(f"line {lineno}: sign must be + or -")
                edges.append((int(parts[1]), int(parts[2]), 1 if parts[3] == "+" else -1))
            else:
                raise FormatError(f"line {lineno}: cannot parse {raw.strip()!r}")
        except ValueError as exc:
            if isinstance(exc, FormatError):
                raise
            raise FormatError(f"line {lineno}: {exc}") from None
    if n is None:
        raise FormatError("missing 'v <n>' line")
    try:
        return SignedGraph.from_edges(n, edges)
    except PreconditionError as exc:
        raise FormatError(str(exc)) from None


def format_graph(g: SignedGraph, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.append(f"v {g.n}")
    lines.extend(f"e {e.u} {e.v} {'+' if e.sign > 0 else '-'}" for e in g.edges)
    return "\n".join(lines) + "\n"


def read_graph(path) -> SignedGraph:
    return parse_graph(Path(path).read_text())
