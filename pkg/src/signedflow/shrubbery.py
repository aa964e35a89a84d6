"""Shrubbery axioms, waterings and the circuit-removal extension step.

A watering is a nowhere-zero Z2 x Z3 assignment whose boundary is ``(0, 0)``
at 3-vertices and ``(0, +-1)`` at 1- and 2-vertices.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Any, Iterable, Mapping

from .core import (
    SignedGraph,
    SubgraphHandle,
    balancing_potential,
    circuit_sign,
    circuit_walk,
    components,
    delete_vertices,
    edge_subgraph,
    is_balanced,
    is_circuit,
    switch_set,
)
from .errors import BudgetExceeded, InvariantViolation, PreconditionError
from .flows import (
    FlowAssignment,
    GroupSpec,
    Orientation,
    boundary,
    default_orientation,
    switch_orientation,
)
from .search import admissibility, default_budget, solve_boundary

Z23 = GroupSpec.z2z3()
Z3 = GroupSpec.modulo(3)


@dataclass(frozen=True)
class ChordPartition:
    chords: frozenset[int]
    unbalanced: frozenset[int]
    balanced: frozenset[int]


def _handle(g: SignedGraph, h) -> SubgraphHandle:
    return h if isinstance(h, SubgraphHandle) else SubgraphHandle.from_edges(g, h)


def chord_partition(g: SignedGraph, h) -> ChordPartition:
    """Chords of ``h`` split by whether adding them makes ``h`` unbalanced."""
    h = _handle(g, h)
    if not h.vertices:
        raise PreconditionError("subgraph has no vertices")
    sub, _, _ = edge_subgraph(g, h.edges, h.vertices)
    if len(components(sub)) != 1:
        raise PreconditionError("subgraph is disconnected")
    chords = frozenset(
        e for e, edge in enumerate(g.edges)
        if e not in h.edges and edge.u in h.vertices and edge.v in h.vertices
    )
    unbalanced = frozenset(e for e in chords if not is_balanced(g, h.edges | {e}))
    return ChordPartition(chords, unbalanced, chords - unbalanced)


def is_removable_circuit(g: SignedGraph, c: Iterable[int]) -> bool:
    c = frozenset(c)
    if not is_circuit(g, c):
        raise PreconditionError("edge set is not a circuit")
    if circuit_sign(g, c) < 0:
        return True
    verts = {g.edges[e].u for e in c} | {g.edges[e].v for e in c}
    twos = sum(1 for v in verts if g.degree(v) == 2)
    return len(chord_partition(g, c).unbalanced) + twos >= 2


# --- shrubbery axioms -------------------------------------------------------------------

SHRUBBERY_LIMIT = 16


def _connected_vertex_sets(g: SignedGraph) -> Iterable[tuple[int, ...]]:
    """All vertex sets of size >= 2 inducing a connected subgraph, as sorted tuples."""
    adj = [set() for _ in range(g.n)]
    for edge in g.edges:
        if not edge.is_loop:
            adj[edge.u].add(edge.v)
            adj[edge.v].add(edge.u)
    for mask in range(1, 1 << g.n):
        X = [v for v in range(g.n) if mask >> v & 1]
        if len(X) < 2:
            continue
        seen = {X[0]}
        stack = [X[0]]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if mask >> y & 1 and y not in seen:
                    seen.add(y)
                    stack.append(y)
        if len(seen) == len(X):
            yield tuple(X)


def _s3_violation(g: SignedGraph, budget: int):
    """Smallest-index violation of the S3 inequality, or None.

    For a vertex set ``X`` and a potential ``s`` on it, the best ``H`` uses
    every edge ``s`` agrees with; the unbalanced chords are exactly the
    disagreeing edges. ``H`` exists when the agreeing edges connect ``X``.
    """
    work = 0
    for X in _connected_vertex_sets(g):
        xs = set(X)
        inner = [e for e, edge in enumerate(g.edges) if edge.u in xs and edge.v in xs]
        cut = sum(1 for edge in g.edges if (edge.u in xs) != (edge.v in xs))
        slack = sum(3 - g.degree(x) for x in X)
        base = cut + slack
        if base >= 4:
            continue
        index = {v: i for i, v in enumerate(X)}
        for bits in range(1 << (len(X) - 1)):
            work += 1
            if work > budget:
                raise BudgetExceeded("shrubbery S3 check exceeded its budget")
            s = [1] + [(-1 if bits >> i & 1 else 1) for i in range(len(X) - 1)]
            agree, disagree = [], 0
            for e in inner:
                edge = g.edges[e]
                if s[index[edge.u]] * s[index[edge.v]] * edge.sign > 0:
                    agree.append(e)
                else:
                    disagree += 1
            if base + 2 * disagree >= 4:
                continue
            sub, _, _ = edge_subgraph(g, agree, X)
            if len(components(sub)) == 1:
                return X, frozenset(agree)
    return None


def _balanced_4_circuit(g: SignedGraph):
    for quad in combinations(range(g.m), 4):
        if is_circuit(g, quad) and circuit_sign(g, quad) > 0:
            return frozenset(quad)
    return None


def is_shrubbery(g: SignedGraph, budget: int | None = None) -> tuple[bool, Any]:
    """Check S1-S4; on failure the witness is ``(axiom, detail)``.

    Under S1 every cubic subgraph is a union of cubic components, so S2 is
    decided component by component.
    """
    if g.n > SHRUBBERY_LIMIT:
        raise PreconditionError(f"shrubbery check is exhaustive; {g.n} vertices exceeds {SHRUBBERY_LIMIT}")
    budget = default_budget() if budget is None else budget
    for v in range(g.n):
        if g.degree(v) > 3:
            return False, ("S1", v)
    for comp in components(g):
        if all(g.degree(v) == 3 for v in comp):
            cs = set(comp)
            ce = [e for e, edge in enumerate(g.edges) if edge.u in cs]
            sub, _, emap = edge_subgraph(g, ce, comp)
            if not admissibility(sub)[0]:
                return False, ("S2", frozenset(emap))
    bad = _s3_violation(g, budget)
    if bad is not None:
        return False, ("S3", bad)
    quad = _balanced_4_circuit(g)
    if quad is not None:
        return False, ("S4", quad)
    return True, None


# --- waterings ----------------------------------------------------------------------------

def _wet(x) -> bool:
    return x[0] == 0 and x[1] != 0


def verify_nzw(g: SignedGraph, f: FlowAssignment, tau: Orientation | None = None) -> bool:
    tau = default_orientation(g) if tau is None else tau
    for v in range(g.n):
        if g.degree(v) > 3:
            raise PreconditionError(f"vertex {v} has degree {g.degree(v)}; watering needs maximum degree 3")
    if f.group != Z23 or len(f) != g.m or len(tau) != g.m:
        return False
    if any(Z23.is_zero(x) for x in f):
        return False
    for v in range(g.n):
        d = g.degree(v)
        b = boundary(g, tau, f, v)
        if d == 3 and b != (0, 0):
            return False
        if d in (1, 2) and not _wet(b):
            return False
    return True


def unbalanced_eta(g: SignedGraph, c: Iterable[int], u: int, tau: Orientation | None = None) -> dict[int, int]:
    """Z3 values on an unbalanced circuit with boundary 1 at ``u`` and 0 elsewhere on it.

    Walk the circuit from ``u`` with a unit start value; each interior vertex
    forces the next edge. The value returning to ``u`` is a nonzero multiple of
    the start exactly when the circuit is unbalanced, so one rescaling finishes.
    """
    tau = default_orientation(g) if tau is None else tau
    walk = circuit_walk(g, c, u)
    x = {}
    prev = None
    for vertex, e, side in walk:
        if prev is None:
            x[e] = 1
        else:
            pe, pside = prev
            arriving = tau.tau[pe][1 - pside] * x[pe]
            x[e] = (-tau.tau[e][side] * arriving) % 3
        prev = (e, side)
    first_e, first_side = walk[0][1], walk[0][2]
    last_e, last_side = prev
    coef = (tau.tau[first_e][first_side] * x[first_e] + tau.tau[last_e][1 - last_side] * x[last_e]) % 3
    if coef == 0:
        raise PreconditionError("circuit is balanced; no such function exists")
    inv = coef  # 1 and 2 are their own inverses mod 3
    return {e: (val * inv) % 3 for e, val in x.items()}


def _eta_boundary(g: SignedGraph, tau: Orientation, values: Mapping[int, int], v: int) -> int:
    return sum(tau.tau[e][side] * values.get(e, 0) for e, side in g.incidence[v]) % 3


def extend_nzw_over_circuit(
    g: SignedGraph,
    c: Iterable[int],
    w_prime: FlowAssignment,
    tau: Orientation | None = None,
) -> FlowAssignment:
    """Extend a watering of ``g - V(C)`` to ``g`` with ``supp(f1) = supp(f1') | E(C)``.

    ``w_prime`` is indexed by the edges of ``delete_vertices(g, V(C))``.
    Edges to the outside get trits +-1 chosen vertex by vertex, circuit edges
    get ``(1, *)``, chords get ``(0, 1)`` or ``(0, alpha)``; the remaining trit
    deficit on the circuit is then cancelled either with eta functions
    (unbalanced circuit) or with a boundary solve after choosing the free signs
    (balanced circuit).
    """
    tau = default_orientation(g) if tau is None else tau
    tau.check(g)
    c = frozenset(c)
    if any(g.degree(v) > 3 for v in range(g.n)):
        raise PreconditionError("watering needs maximum degree 3")
    if not is_removable_circuit(g, c):
        raise PreconditionError("circuit is not removable")
    cverts = sorted({g.edges[e].u for e in c} | {g.edges[e].v for e in c})
    cset = set(cverts)
    rest, rvmap, remap = delete_vertices(g, cverts)
    rtau = tau.restricted(remap)
    if len(w_prime) != rest.m or not verify_nzw(rest, w_prime, rtau):
        raise PreconditionError("w_prime is not a watering of g - V(C)")

    vals: list = [None] * g.m
    for le, pe in enumerate(remap):
        vals[pe] = w_prime[le]
    part = chord_partition(g, c)
    for e in c:
        vals[e] = (1, 0)
    for e in part.balanced:
        vals[e] = (0, 1)
    for e in part.unbalanced:
        vals[e] = (0, 1)  # alpha = 1 until Case 2 picks otherwise

    # outside neighbours: pick trits so their watering condition holds in g
    rindex = {pv: lv for lv, pv in enumerate(rvmap)}
    for x in rvmap:
        spokes = [(e, side) for e, side in g.incidence[x] if g.other_end(e, side) in cset]
        if not spokes:
            continue
        inner = boundary(rest, rtau, w_prime, rindex[x])[1]
        d = g.degree(x)
        for signs in product((1, -1), repeat=len(spokes)):
            trit = (inner + sum(tau.tau[e][side] * s for (e, side), s in zip(spokes, signs))) % 3
            if (d == 3 and trit == 0) or (d in (1, 2) and trit != 0):
                for (e, _), s in zip(spokes, signs):
                    vals[e] = (0, s % 3)
                break
        else:
            raise InvariantViolation(f"no spoke values satisfy the watering rule at vertex {x}")

    def trit_boundary(v: int) -> int:
        return sum(tau.tau[e][side] * vals[e][1] for e, side in g.incidence[v]) % 3

    balanced_c = circuit_sign(g, c) > 0
    twos = [v for v in cverts if g.degree(v) == 2]
    if not balanced_c:
        phi: dict[int, int] = {}
        for v in cverts:
            target = 1 if v in twos else 0
            need = (target - trit_boundary(v)) % 3
            if need:
                eta = unbalanced_eta(g, c, v, tau)
                for e, y in eta.items():
                    phi[e] = (phi.get(e, 0) + need * y) % 3
    else:
        sub, svmap, semap = edge_subgraph(g, c)
        s_local = balancing_potential(sub)
        s = {svmap[i]: s_local[i] for i in range(sub.n)}
        ualpha = sorted(part.unbalanced)
        variables = [("a", e) for e in ualpha] + [("b", v) for v in twos]
        if len(variables) < 2:
            raise InvariantViolation("balanced removable circuit without two free signs")

        def residual(choice) -> tuple[int, dict]:
            for (kind, key), val in zip(variables, choice):
                if kind == "a":
                    vals[key] = (0, val % 3)
            beta = {key: val % 3 for (kind, key), val in zip(variables, choice) if kind == "b"}
            total = 0
            for v in cverts:
                total += s[v] * (beta.get(v, 0) - trit_boundary(v))
            return total % 3, beta

        fixed = (1,) * (len(variables) - 2)
        for tail in product((1, -1), repeat=2):
            r, beta = residual(fixed + tail)
            if r == 0:
                break
        else:
            raise InvariantViolation("no sign choice balances the circuit deficit")
        # solve on the circuit switched to all-positive; switching negates tau at switched vertices
        flip = [i for i in range(sub.n) if s_local[i] < 0]
        pos = switch_set(sub, flip)
        stau = tau.restricted(semap)
        for i in flip:
            stau = switch_orientation(sub, stau, i)
        beta_local = []
        for i in range(sub.n):
            v = svmap[i]
            want = (beta.get(v, 0) - trit_boundary(v)) % 3
            beta_local.append((s_local[i] * want) % 3)
        sol = solve_boundary(pos, stau, Z3, beta_local)
        phi = {semap[le]: sol[le] for le in range(sub.m)}
    for e, y in phi.items():
        vals[e] = (vals[e][0], (vals[e][1] + y) % 3)
    f = FlowAssignment(Z23, tuple(vals))
    if not verify_nzw(g, f, tau):
        raise InvariantViolation("extended watering fails verification")
    s1 = {e for e, x in enumerate(f) if x[0]}
    expected = {remap[le] for le, x in enumerate(w_prime) if x[0]} | set(c)
    if s1 != expected:
        raise InvariantViolation("extended watering has the wrong Z2 support")
    return f
