"""Constructive flow algorithms.

The chain is: a Z3-NZF gives an orientation with ``dtau == 0 (mod 3)``;
splitting and suppression reduce to cubic graphs where two perfect matchings
yield 3-NZFs with a prescribed value; cut-edges are peeled one at a time to get
a 5-NZF avoiding 3; finally a balanced Z2 x Z3-NZF is turned into
``f = 3*f1 + f2``, a nowhere-zero 11-flow.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from .core import (
    Edge,
    SignedGraph,
    blocks,
    bridges,
    components,
    components_of_edges,
    cut_vertices,
    edge_subgraph,
    is_bridgeless,
    suppress,
)
from .errors import AuditFailure, InvariantViolation, NotFlowAdmissible, PreconditionError
from .flows import (
    FlowAssignment,
    GroupSpec,
    Orientation,
    default_orientation,
    edges_with_abs,
    is_balanced_z2z3,
    is_flow,
    is_k_flow,
    is_k_nzf,
    is_nzf,
    lift_through_suppression,
    support,
    suppressed_orientation,
    z2_part,
    z3_part,
)
from .search import Constraints, admissibility, find_nzf

Z3 = GroupSpec.modulo(3)
INT3 = GroupSpec.integer(3)
INT5 = GroupSpec.integer(5)
INT11 = GroupSpec.integer(11)


# --- splitting --------------------------------------------------------------------------

@dataclass(frozen=True)
class SplitResult:
    graph: SignedGraph
    new_vertex: int
    moved_edges: frozenset[int]
    # half-edges now sitting at the new vertex; ids and sides are unchanged
    moved_halves: tuple[tuple[int, int], ...]


def split_away(g: SignedGraph, v: int, F: Iterable[int]) -> SplitResult:
    """``G[v;F]``: move the ends at ``v`` of the edges in ``F`` onto a new vertex."""
    if not 0 <= v < g.n:
        raise PreconditionError(f"invalid vertex {v}")
    F = frozenset(F)
    at_v = set(g.incident_edges(v))
    for e in F:
        if e not in at_v:
            raise PreconditionError(f"edge {e} is not incident with vertex {v}")
        if g.edges[e].is_loop:
            raise PreconditionError(f"loop {e} cannot be split away")
    star = g.n
    edges = list(g.edges)
    halves = []
    for e in sorted(F):
        edge = edges[e]
        if edge.u == v:
            edges[e] = Edge(star, edge.v, edge.sign)
            halves.append((e, 0))
        else:
            edges[e] = Edge(edge.u, star, edge.sign)
            halves.append((e, 1))
    return SplitResult(SignedGraph(g.n + 1, tuple(edges)), star, F, tuple(halves))


def _block_of(g: SignedGraph) -> dict[int, int]:
    out = {}
    for i, blk in enumerate(blocks(g)):
        for e in blk:
            out[e] = i
    return out


def fleischner_split(g: SignedGraph, v: int, e0: int, e1: int, e2: int) -> SplitResult:
    """Split ``{e0, e1}`` or ``{e0, e2}`` away from ``v``, whichever keeps the graph bridgeless.

    Loops at ``v`` are never split and do not count toward the degree bound:
    a theta with a loop at one end has degree 5 there, yet every split of two
    parallel edges leaves a cut-edge.
    """
    if not is_bridgeless(g):
        raise PreconditionError("graph has a cut-edge")
    d = sum(1 for e, _ in g.incidence[v] if not g.edges[e].is_loop)
    if d < 4:
        raise PreconditionError(f"vertex {v} has {d} non-loop half-edges, need at least 4")
    if len({e0, e1, e2}) != 3:
        raise PreconditionError("e0, e1, e2 must be distinct")
    at_v = set(g.incident_edges(v))
    if not {e0, e1, e2} <= at_v:
        raise PreconditionError("e0, e1, e2 must all be incident with v")
    if any(g.edges[e].is_loop for e in (e0, e1, e2)):
        raise PreconditionError("loops cannot be split away")
    if v in cut_vertices(g):
        blk = _block_of(g)
        if blk[e0] == blk[e2]:
            raise PreconditionError("at a cut-vertex e0 and e2 must lie in different blocks")
        res = split_away(g, v, (e0, e2))
        if not is_bridgeless(res.graph):
            raise InvariantViolation("split of e0, e2 at a cut-vertex left a cut-edge")
        return res
    for pair in ((e0, e1), (e0, e2)):
        res = split_away(g, v, pair)
        if is_bridgeless(res.graph):
            return res
    raise InvariantViolation("both candidate splits have a cut-edge")


def choose_split_triple(g: SignedGraph, v: int) -> tuple[int, int, int]:
    """Deterministic admissible ``(e0, e1, e2)`` among the non-loop edges at ``v``."""
    inc = [e for e in g.incident_edges(v) if not g.edges[e].is_loop]
    if len(inc) < 3:
        raise PreconditionError(f"vertex {v} has fewer than three non-loop edges")
    e0 = inc[0]
    if v in cut_vertices(g):
        blk = _block_of(g)
        e2 = next(e for e in inc if blk[e] != blk[e0])
        e1 = next(e for e in inc if e not in (e0, e2))
        return e0, e1, e2
    return e0, inc[1], inc[2]


# --- matchings ------------------------------------------------------------------------

def _require_cubic_bridgeless(g: SignedGraph) -> None:
    if any(d != 3 for d in g.degrees()):
        raise PreconditionError("graph is not cubic")
    if not is_bridgeless(g):
        raise PreconditionError("graph has a cut-edge")


def perfect_matching(g: SignedGraph, include: int | None = None, exclude: int | None = None) -> frozenset[int] | None:
    """Backtracking search for a perfect matching with an optional forced or forbidden edge."""
    matched = [False] * g.n
    chosen: list[int] = []
    if include is not None:
        edge = g.edges[include]
        if edge.is_loop:
            return None
        matched[edge.u] = matched[edge.v] = True
        chosen.append(include)

    def rec() -> bool:
        try:
            x = matched.index(False)
        except ValueError:
            return True
        matched[x] = True
        for e in g.incident_edges(x):
            edge = g.edges[e]
            if edge.is_loop or e == exclude:
                continue
            y = edge.v if edge.u == x else edge.u
            if matched[y]:
                continue
            matched[y] = True
            chosen.append(e)
            if rec():
                return True
            chosen.pop()
            matched[y] = False
        matched[x] = False
        return False

    return frozenset(chosen) if rec() else None


def perfect_matchings_pair(g: SignedGraph, e0: int) -> tuple[frozenset[int], frozenset[int]]:
    """``(M1, M2)`` with ``e0 in M1`` and ``e0 not in M2``."""
    _require_cubic_bridgeless(g)
    if not 0 <= e0 < g.m:
        raise PreconditionError(f"unknown edge {e0}")
    m1 = perfect_matching(g, include=e0)
    m2 = perfect_matching(g, exclude=e0)
    if m1 is None or m2 is None:
        raise InvariantViolation("bridgeless cubic graph lacks a required perfect matching")
    return m1, m2


# --- mod 3 ------------------------------------------------------------------------------

def _require_z3_nzf(g: SignedGraph, tau: Orientation, z3: FlowAssignment) -> FlowAssignment:
    z3 = z3.regroup(Z3)
    if len(z3) != g.m or not is_nzf(g, tau, z3):
        raise PreconditionError("supplied assignment is not a Z3-NZF")
    return z3


def mod3_orientation(g: SignedGraph, z3: FlowAssignment, tau: Orientation | None = None) -> Orientation:
    """Reverse every edge carrying 2 so the all-ones assignment is a Z3-NZF."""
    tau = default_orientation(g) if tau is None else tau
    z3 = _require_z3_nzf(g, tau, z3)
    return tau.flipped(e for e, x in enumerate(z3) if x == 2)


def orientation_excess(g: SignedGraph, tau: Orientation, v: int) -> int:
    return sum(tau.tau[e][side] for e, side in g.incidence[v])


def _find_z3(g: SignedGraph, tau: Orientation, z3: FlowAssignment | None) -> FlowAssignment:
    if z3 is not None:
        return _require_z3_nzf(g, tau, z3)
    found = find_nzf(g, Z3, tau=tau)
    if found is None:
        raise PreconditionError("graph admits no Z3-NZF")
    return found


def three_nzf_prescribed(
    g: SignedGraph,
    e0: int,
    i: int,
    tau: Orientation | None = None,
    z3: FlowAssignment | None = None,
) -> FlowAssignment:
    """A 3-NZF of a bridgeless graph with ``|f(e0)| == i``, expressed under ``tau``.

    Loops are first subdivided by a positive edge so splits only ever move
    ordinary edge ends. Vertices of degree at least 4 are split (with a positive
    balancing edge back to ``v`` when the new vertex is not mod-3 balanced), the
    result is suppressed to cubic pieces, and a perfect matching carrying the
    value 2 gives the flow. Everything added along the way is dropped again.
    """
    tau = default_orientation(g) if tau is None else tau
    tau.check(g)
    if not 0 <= e0 < g.m:
        raise PreconditionError(f"unknown edge {e0}")
    if i not in (1, 2):
        raise PreconditionError("prescribed value must be 1 or 2")
    if not is_bridgeless(g):
        raise PreconditionError("graph has a cut-edge")
    z3 = _find_z3(g, tau, z3)
    reversed_edges = [e for e, x in enumerate(z3) if x == 2]
    t0 = tau.flipped(reversed_edges)

    # subdivide loops: loop e at v becomes e = (v, w) plus positive (w, v)
    edges = list(g.edges)
    taus = list(t0.tau)
    n = g.n
    for e, edge in enumerate(g.edges):
        if edge.is_loop:
            w = n
            n += 1
            a, b = taus[e]
            edges[e] = Edge(edge.u, w, edge.sign)
            edges.append(Edge(w, edge.u, 1))
            taus.append((-b, b))
    h = SignedGraph(n, tuple(edges))
    th = Orientation(tuple(taus))

    while h.max_degree() > 3:
        v = min(x for x in range(h.n) if h.degree(x) > 3)
        res = fleischner_split(h, v, *choose_split_triple(h, v))
        h = res.graph
        star = res.new_vertex
        excess = orientation_excess(h, th, star)
        if excess:
            t = 1 if excess > 0 else -1
            h = h.with_edges_added([(v, star, 1)])
            th = th.extended([(-t, t)])
    if not is_bridgeless(h):
        raise InvariantViolation("reduction to maximum degree 3 produced a cut-edge")
    if any(orientation_excess(h, th, x) % 3 for x in range(h.n)):
        raise InvariantViolation("reduction lost the mod-3 orientation property")

    hbar, prov = suppress(h)
    tbar = suppressed_orientation(h, th, prov)
    target = prov.image_of_edge(e0)
    vals = [0] * hbar.m
    for comp in components(hbar):
        comp_edges = [e for e in range(hbar.m) if hbar.edges[e].u in set(comp)]
        if not comp_edges:
            continue
        if len(comp) == 1:
            # a suppressed circuit: one vertex with one loop, directed through
            c = i if target in comp_edges else 1
            for e in comp_edges:
                vals[e] = c
            continue
        sub, vmap, emap = edge_subgraph(hbar, comp_edges, comp)
        if target in emap:
            local = emap.index(target)
            m_sub = perfect_matching(sub, include=local) if i == 2 else perfect_matching(sub, exclude=local)
        else:
            m_sub = perfect_matching(sub)
        if m_sub is None:
            raise InvariantViolation("bridgeless cubic piece lacks the required perfect matching")
        for le, pe in enumerate(emap):
            vals[pe] = -2 if le in m_sub else 1
    fbar = FlowAssignment(INT3, tuple(vals))
    if not is_nzf(hbar, tbar, fbar):
        raise InvariantViolation("matching assignment is not a flow on the suppressed graph")
    lifted = lift_through_suppression(h, th, prov, tbar, fbar)
    out = [lifted[e] for e in range(g.m)]
    for e in reversed_edges:
        out[e] = -out[e]
    f = FlowAssignment(INT3, tuple(out))
    if not is_k_nzf(g, tau, f, 3) or abs(f[e0]) != i:
        raise InvariantViolation("prescribed 3-NZF construction failed verification")
    return f


# --- Z3 to 5 -----------------------------------------------------------------------------

def _component_of(g: SignedGraph, start: int, skip: int) -> set[int]:
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for e, side in g.incidence[x]:
            if e == skip:
                continue
            y = g.other_end(e, side)
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return seen


def minimal_bridge_side(g: SignedGraph) -> tuple[int, int, frozenset[int]]:
    """``(bridge, end on the minimal side, minimal side)`` by vertex count then edge id."""
    best = None
    for b in sorted(bridges(g)):
        edge = g.edges[b]
        for end in (edge.u, edge.v):
            side = _component_of(g, end, b)
            key = (len(side), b)
            if best is None or key < best[0]:
                best = (key, b, end, frozenset(side))
    if best is None:
        raise PreconditionError("graph has no cut-edge")
    return best[1], best[2], best[3]


def _with_negative_loop(g: SignedGraph, tau: Orientation, z3: FlowAssignment, side: frozenset[int],
                        end: int, bridge: int):
    """The side of a bridge as a standalone graph with a negative loop replacing the bridge."""
    side_edges = [e for e, edge in enumerate(g.edges) if e != bridge and edge.u in side]
    sub, vmap, emap = edge_subgraph(g, side_edges, side)
    local_end = vmap.index(end)
    bside = 0 if g.edges[bridge].u == end else 1
    if g.edges[bridge].is_loop:
        raise InvariantViolation("a loop cannot be a cut-edge")
    # the extroverted loop contributes 2y; match the bridge's contribution there
    y = (2 * tau.tau[bridge][bside] * z3[bridge]) % 3
    graph = sub.with_edges_added([(local_end, local_end, -1)])
    t = tau.restricted(emap).extended([(1, 1)])
    z = FlowAssignment(Z3, tuple(z3[e] for e in emap) + (y,))
    return graph, t, z, emap


def _five(g: SignedGraph, tau: Orientation, z3: FlowAssignment) -> list[int]:
    if g.m == 0:
        return []
    if is_bridgeless(g):
        return list(three_nzf_prescribed(g, 0, 1, tau, z3))
    b, end1, side1 = minimal_bridge_side(g)
    edge = g.edges[b]
    end2 = edge.v if edge.u == end1 else edge.u
    side2 = frozenset(range(g.n)) - side1
    g1, t1, z1, emap1 = _with_negative_loop(g, tau, z3, side1, end1, b)
    g2, t2, z2, emap2 = _with_negative_loop(g, tau, z3, side2, end2, b)
    vals2 = _five(g2, t2, z2)
    a2 = vals2[-1]
    if abs(a2) not in (1, 2):
        raise InvariantViolation("loop value of the recursive 5-NZF is not 1 or 2")
    vals1 = list(three_nzf_prescribed(g1, g1.m - 1, abs(a2), t1, z1))
    side_at_2 = 0 if edge.u == end2 else 1
    gb = tau.tau[b][side_at_2] * 2 * a2
    if vals1[-1] != -edge.sign * a2:
        vals1 = [-x for x in vals1]
    out = [0] * g.m
    for le, pe in enumerate(emap1):
        out[pe] = vals1[le]
    for le, pe in enumerate(emap2):
        out[pe] = vals2[le]
    out[b] = gb
    return out


def z3_to_5nzf(g: SignedGraph, tau: Orientation | None = None, z3: FlowAssignment | None = None) -> FlowAssignment:
    """A 5-NZF with no value of absolute value 3 and every +-4 on a cut-edge.

    Works per component; within a component, the cut-edge whose side is
    smallest is replaced by negative loops on both sides and the pieces are
    solved recursively, then rejoined with ``2a`` on the cut-edge.
    """
    tau = default_orientation(g) if tau is None else tau
    tau.check(g)
    z3 = _find_z3(g, tau, z3)
    out = [0] * g.m
    for comp in components(g):
        cs = set(comp)
        ce = [e for e, edge in enumerate(g.edges) if edge.u in cs]
        sub, vmap, emap = edge_subgraph(g, ce, comp)
        vals = _five(sub, tau.restricted(emap), z3.restricted(emap))
        for le, pe in enumerate(emap):
            out[pe] = vals[le]
    f = FlowAssignment(INT5, tuple(out))
    if not is_k_nzf(g, tau, f, 5):
        raise InvariantViolation("constructed assignment is not a 5-NZF")
    if edges_with_abs(f, 3) or not edges_with_abs(f, 4) <= bridges(g):
        raise InvariantViolation("5-NZF violates the value pattern (no 3, 4 only on cut-edges)")
    return f


# --- Z2 to 3 -----------------------------------------------------------------------------

def support_bridges(g: SignedGraph, edges: Iterable[int]) -> frozenset[int]:
    """Cut-edges of the spanning subgraph with the given edge set, as parent edge ids."""
    es = sorted(set(edges))
    sub = SignedGraph(g.n, tuple(g.edges[e] for e in es))
    return frozenset(es[b] for b in bridges(sub))


def z2_to_3flow(
    g: SignedGraph,
    f1: FlowAssignment | Sequence[int],
    tau: Orientation | None = None,
    budget: int | None = None,
) -> FlowAssignment:
    """An integer 3-flow ``h`` with ``supp(f1) <= supp(h)`` and ``|h| == 2`` exactly on ``B(supp(h))``.

    Candidate supports are tried smallest first; each is a constrained search
    with values +-2 on the support's cut-edges and +-1 elsewhere on it.
    """
    tau = default_orientation(g) if tau is None else tau
    tau.check(g)
    z2 = FlowAssignment.of(GroupSpec.modulo(2), f1.values if isinstance(f1, FlowAssignment) else f1)
    if len(z2) != g.m or not is_flow(g, tau, z2):
        raise PreconditionError("f1 is not a Z2-flow")
    base = sorted(support(z2))
    if sum(1 for e in base if g.edges[e].sign < 0) % 2:
        raise PreconditionError("supp(f1) has an odd number of negative edges")
    if len(components(g)) > 1:
        raise PreconditionError("graph is disconnected")
    rest = [e for e in range(g.m) if e not in set(base)]
    for size in range(len(rest) + 1):
        for extra in combinations(rest, size):
            S = set(base) | set(extra)
            bs = support_bridges(g, S)
            allowed = {e: ((2, -2) if e in bs else (1, -1)) if e in S else (0,) for e in range(g.m)}
            c = Constraints(allowed=allowed, nowhere_zero=False)
            h = find_nzf(g, INT3, c, tau=tau, budget=budget)
            if h is not None:
                return h
    raise InvariantViolation("no 3-flow with the required support pattern exists")


# --- 11-flow pipeline -------------------------------------------------------------------

@dataclass
class PipelineTrace:
    graph: SignedGraph
    orientation: Orientation
    g1g2: FlowAssignment
    f1: FlowAssignment
    f2: FlowAssignment
    f: FlowAssignment
    audit: list[tuple[str, bool]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.audit)


def audit_pipeline(g: SignedGraph, tau: Orientation, g12: FlowAssignment, f1: FlowAssignment,
                   f2: FlowAssignment, f: FlowAssignment) -> list[tuple[str, bool]]:
    """Independent re-check of every stage and of the final value pattern."""
    s1, s2 = support(f1), support(f2)
    b1, b2 = support_bridges(g, s1), support_bridges(g, s2)
    all_edges = frozenset(range(g.m))
    checks = [
        ("g1g2 is a balanced Z2xZ3-NZF", is_nzf(g, tau, g12) and is_balanced_z2z3(g, g12)),
        ("f1 is a 3-flow containing supp(g1)",
         is_k_flow(g, tau, f1, 3) and support(z2_part(g12)) <= s1),
        ("|f1| = 2 exactly on B(supp(f1))", edges_with_abs(f1, 2) == b1),
        ("f2 is a 5-flow with supp(f2) = supp(g2)",
         is_k_flow(g, tau, f2, 5) and s2 == support(z3_part(g12))),
        ("f2 has no value +-3", not edges_with_abs(f2, 3)),
        ("|f2| = 4 only on B(supp(f2))", edges_with_abs(f2, 4) <= b2),
        ("supp(f1) and supp(f2) cover E", (s1 | s2) == all_edges),
        ("f = 3 f1 + f2", all(x == 3 * a + b for x, a, b in zip(f, f1, f2))),
        ("f is a flow", is_flow(g, tau, f)),
        ("f is nowhere-zero", support(f) == all_edges),
        ("|f| <= 10", all(abs(x) <= 10 for x in f)),
        ("|f| != 9", not edges_with_abs(f, 9)),
        ("|f| = 10 only on B(supp(f1)) & B(supp(f2))", edges_with_abs(f, 10) <= (b1 & b2)),
    ]
    return checks


def build_11flow(g: SignedGraph, tau: Orientation | None = None, budget: int | None = None) -> PipelineTrace:
    """Nowhere-zero 11-flow ``3*f1 + f2`` of a flow-admissible graph, with an audit trail.

    Each component is handled on its own; all stages share one orientation.
    """
    tau = default_orientation(g) if tau is None else tau
    tau.check(g)
    ok, why = admissibility(g)
    if not ok:
        raise NotFlowAdmissible(why)
    z23 = GroupSpec.z2z3()
    g12 = [z23.zero] * g.m
    f1 = [0] * g.m
    f2 = [0] * g.m
    for comp in components(g):
        cs = set(comp)
        ce = [e for e, edge in enumerate(g.edges) if edge.u in cs]
        if not ce:
            continue
        sub, vmap, emap = edge_subgraph(g, ce, comp)
        ts = tau.restricted(emap)
        w = find_nzf(sub, z23, Constraints(balanced=True), tau=ts, budget=budget)
        if w is None:
            raise InvariantViolation("flow-admissible component has no balanced Z2xZ3-NZF")
        h1 = z2_to_3flow(sub, z2_part(w), ts, budget)
        h2 = [0] * sub.m
        trits = z3_part(w)
        s2 = support(trits)
        for piece in components_of_edges(sub, s2):
            ps = set(piece)
            psub, pvmap, pemap = edge_subgraph(sub, [e for e in s2 if sub.edges[e].u in ps])
            part = z3_to_5nzf(psub, ts.restricted(pemap), trits.restricted(pemap))
            for le, pe in enumerate(pemap):
                h2[pe] = part[le]
        for le, pe in enumerate(emap):
            g12[pe] = w[le]
            f1[pe] = h1[le]
            f2[pe] = h2[le]
    G12 = FlowAssignment(z23, tuple(g12))
    F1 = FlowAssignment(INT3, tuple(f1))
    F2 = FlowAssignment(INT5, tuple(f2))
    F = FlowAssignment(INT11, tuple(3 * a + b for a, b in zip(f1, f2)))
    trace = PipelineTrace(g, tau, G12, F1, F2, F, audit_pipeline(g, tau, G12, F1, F2, F))
    if not trace.passed:
        failed = ", ".join(name for name, ok in trace.audit if not ok)
        raise AuditFailure(f"audit failed: {failed}", trace)
    return trace
