"""Exact exhaustive solvers and counters.

Everything here is exponential and meant for desk-scale graphs; each routine
takes a node budget and raises :class:`BudgetExceeded` rather than guessing.

The backtracking engine assigns edges in a BFS elimination order. When an
edge is the last one still open at one of its ends, its value is forced by that
vertex's boundary target. Dead search states are memoised by
``(position, partial boundaries of the open vertices, parity)``, which keeps
infeasible instances cheap.
"""
from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Collection, Iterator, Mapping, Sequence

from .core import (
    SignedGraph,
    bridges,
    components,
    edge_subgraph,
    is_balanced,
    is_connected,
    negativeness,
)
from .errors import BudgetExceeded, InvariantViolation, PreconditionError, SizeLimitError
from .flows import (
    FlowAssignment,
    GroupSpec,
    Orientation,
    boundary,
    default_orientation,
)

DEFAULT_BUDGET = 5_000_000
SIMILARITY_LIMIT = 20


def default_budget() -> int:
    env = os.environ.get("SIGNEDFLOW_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


@dataclass(frozen=True)
class Constraints:
    """Restrictions for :func:`find_nzf`.

    ``forbidden_abs`` and ``allowed`` are per-edge; ``support`` lists edges that
    must be nonzero when ``nowhere_zero`` is off.
    """

    prescribed: Mapping[int, Any] = field(default_factory=dict)
    forbidden_abs: Mapping[int, Collection[int]] = field(default_factory=dict)
    allowed: Mapping[int, Collection[Any]] = field(default_factory=dict)
    balanced: bool = False
    support: Collection[int] = ()
    nowhere_zero: bool = True


def elimination_order(g: SignedGraph) -> list[int]:
    """Edges in BFS order from vertex 0 (then each further component), ties by edge id."""
    seen = [False] * g.n
    added = [False] * g.m
    order = []
    for root in range(g.n):
        if seen[root]:
            continue
        seen[root] = True
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for e in g.incident_edges(x):
                if not added[e]:
                    added[e] = True
                    order.append(e)
                edge = g.edges[e]
                y = edge.v if edge.u == x else edge.u
                if not seen[y]:
                    seen[y] = True
                    queue.append(y)
    return order


class _Engine:
    def __init__(
        self,
        g: SignedGraph,
        group: GroupSpec,
        tau: Orientation,
        domains: Sequence[Sequence[int]],
        targets: Sequence[frozenset[int]],
        parity: int | None,
        budget: int,
        order: Sequence[int] | None = None,
    ):
        self.g = g
        self.group = group
        self.mod = group.modulus
        self.targets = targets
        self.parity = parity
        self.budget = budget
        self.nodes = 0
        self.order = list(elimination_order(g) if order is None else order)
        if sorted(self.order) != list(range(g.m)):
            raise PreconditionError("elimination order must be a permutation of the edges")
        m = g.m
        self.m = m
        first = [m] * g.n
        last = [-1] * g.n
        steps = []
        for i, e in enumerate(self.order):
            edge = g.edges[e]
            t0, t1 = tau.tau[e]
            for x in (edge.u, edge.v):
                first[x] = min(first[x], i)
                last[x] = max(last[x], i)
            neg = 1 if (edge.sign < 0 and group.kind == "z2z3") else 0
            steps.append((e, edge.u, t0, edge.v, t1, edge.is_loop, neg))
        self.steps = steps
        self.last = last
        self.closes = [[] for _ in range(m)]
        for v in range(g.n):
            if last[v] >= 0:
                self.closes[last[v]].append(v)
        self.frontier = [
            tuple(v for v in range(g.n) if first[v] < i <= last[v]) for i in range(m + 1)
        ]
        # domains arrive per edge id; the engine walks positions
        self.domains = [list(domains[e]) for e in self.order]
        self.domain_sets = [set(d) for d in self.domains]
        self.isolated_ok = all(0 in targets[v] for v in range(g.n) if last[v] < 0)
        self.reach = self._reach_bounds() if not self.mod else [()] * m
        self.partial = [0] * g.n
        self.values = [0] * m
        self.par = 0
        self.dead: set = set()
        self.symmetric = self._symmetric()

    def _norm(self, x: int) -> int:
        return x % self.mod if self.mod else x

    def _symmetric(self) -> bool:
        neg = self._norm
        for d in self.domain_sets:
            if any(neg(-x) not in d for x in d):
                return False
        for t in self.targets:
            if any(neg(-x) not in t for x in t):
                return False
        return True

    def _canonical(self, x: int) -> bool:
        if self.mod:
            return x <= (-x) % self.mod
        return x >= 0

    def _candidates(self, i: int) -> list[int]:
        e, a, ta, b, tb, loop, _ = self.steps[i]
        if not loop:
            for v, t in ((a, ta), (b, tb)):
                if self.last[v] == i:
                    forced = {self._norm(t * (target - self.partial[v])) for target in self.targets[v]}
                    return [x for x in self.domains[i] if x in forced]
        return self.domains[i]

    def _apply(self, i: int, x: int, sign: int) -> None:
        e, a, ta, b, tb, loop, neg = self.steps[i]
        p = self.partial
        if self.mod:
            p[a] = (p[a] + sign * ta * x) % self.mod
            p[b] = (p[b] + sign * tb * x) % self.mod
        else:
            p[a] += sign * ta * x
            p[b] += sign * tb * x
        if neg and x % 2:
            self.par ^= 1

    def _reach_bounds(self) -> list[tuple[tuple[int, int], ...]]:
        # after position i, an open vertex can still move by at most the
        # largest value times the weight of its remaining half-edges
        cap = [0] * self.g.n
        out = [()] * self.m
        for i in range(self.m - 1, -1, -1):
            e, a, ta, b, tb, loop, _ = self.steps[i]
            out[i] = tuple((v, cap[v]) for v in {a, b} if self.last[v] > i)
            big = max((abs(x) for x in self.domains[i]), default=0)
            if loop:
                cap[a] += abs(ta + tb) * big
            else:
                cap[a] += big
                cap[b] += big
        return out

    def _closes_ok(self, i: int) -> bool:
        p = self.partial
        for v in self.closes[i]:
            if p[v] not in self.targets[v]:
                return False
        for v, cap in self.reach[i]:
            if all(abs(t - p[v]) > cap for t in self.targets[v]):
                return False
        return True

    def _key(self, i: int):
        return (i, tuple(self.partial[v] for v in self.frontier[i]), self.par if self.parity is not None else 0)

    def _tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceeded(f"search exceeded its budget of {self.budget} nodes")

    def find(self, use_symmetry: bool = True) -> list[int] | None:
        if not self.isolated_ok:
            return None
        sym = use_symmetry and self.symmetric
        if self._find(0, sym):
            out = [0] * self.m
            for i, e in enumerate(self.order):
                out[e] = self.values[i]
            return out
        return None

    def _find(self, i: int, sym: bool) -> bool:
        if i == self.m:
            return self.parity is None or self.par == self.parity
        key = self._key(i)
        if key in self.dead:
            return False
        self._tick()
        cands = self._candidates(i)
        if sym and i == 0:
            cands = [x for x in cands if self._canonical(x)]
        for x in cands:
            self._apply(i, x, 1)
            if self._closes_ok(i):
                self.values[i] = x
                if self._find(i + 1, sym):
                    return True
            self._apply(i, x, -1)
        self.dead.add(key)
        return False

    def enumerate(self) -> Iterator[list[int]]:
        if not self.isolated_ok:
            return
        for vals in self._enum(0):
            out = [0] * self.m
            for i, e in enumerate(self.order):
                out[e] = vals[i]
            yield out

    def _enum(self, i: int) -> Iterator[list[int]]:
        if i == self.m:
            if self.parity is None or self.par == self.parity:
                yield list(self.values)
            return
        key = self._key(i)
        if key in self.dead:
            return
        self._tick()
        found = False
        for x in self._candidates(i):
            self._apply(i, x, 1)
            if self._closes_ok(i):
                self.values[i] = x
                for sol in self._enum(i + 1):
                    found = True
                    yield sol
            self._apply(i, x, -1)
        if not found:
            self.dead.add(key)


def _check_edges(g: SignedGraph, edges) -> None:
    for e in edges:
        if not (isinstance(e, int) and 0 <= e < g.m):
            raise PreconditionError(f"constraint references unknown edge {e!r}")


def _domains(g: SignedGraph, group: GroupSpec, c: Constraints) -> list[list[int]]:
    for mapping in (c.prescribed, c.forbidden_abs, c.allowed):
        _check_edges(g, mapping)
    _check_edges(g, c.support)
    if c.forbidden_abs and group.kind != "int":
        raise PreconditionError("forbidden absolute values only apply to integer groups")
    base = group.nonzero_elements() if c.nowhere_zero else group.elements()
    required = set(c.support)
    out = []
    for e in range(g.m):
        if e in c.prescribed:
            vals = [group.normalize(c.prescribed[e])]
            if c.nowhere_zero and group.is_zero(vals[0]):
                vals = []
        else:
            vals = list(base)
        if e in required:
            vals = [x for x in vals if not group.is_zero(x)]
        if e in c.allowed:
            ok = {group.normalize(x) for x in c.allowed[e]}
            vals = [x for x in vals if x in ok]
        if e in c.forbidden_abs:
            bad = set(c.forbidden_abs[e])
            vals = [x for x in vals if abs(x) not in bad]
        out.append([group.encode(x) for x in vals])
    return out


def _flow_targets(g: SignedGraph) -> list[frozenset[int]]:
    return [frozenset((0,))] * g.n


def _engine(g, group, constraints, tau, budget, order=None) -> _Engine:
    c = constraints or Constraints()
    tau = default_orientation(g) if tau is None else tau
    tau.check(g)
    if c.balanced and group.kind != "z2z3":
        raise PreconditionError("balanced constraint requires the Z2 x Z3 group")
    parity = 0 if c.balanced else None
    return _Engine(g, group, tau, _domains(g, group, c), _flow_targets(g), parity,
                   default_budget() if budget is None else budget, order)


def find_nzf(
    g: SignedGraph,
    group: GroupSpec,
    constraints: Constraints | None = None,
    tau: Orientation | None = None,
    budget: int | None = None,
    order: Sequence[int] | None = None,
) -> FlowAssignment | None:
    """Return a flow meeting the constraints (nowhere-zero by default), or None if none exists."""
    eng = _engine(g, group, constraints, tau, budget, order)
    codes = eng.find()
    if codes is None:
        return None
    return FlowAssignment(group, tuple(group.decode(c) for c in codes))


def enumerate_flows(
    g: SignedGraph,
    group: GroupSpec,
    constraints: Constraints | None = None,
    tau: Orientation | None = None,
    budget: int | None = None,
) -> Iterator[FlowAssignment]:
    """Every flow meeting the constraints, without symmetry reduction."""
    eng = _engine(g, group, constraints, tau, budget)
    for codes in eng.enumerate():
        yield FlowAssignment(group, tuple(group.decode(c) for c in codes))


def count_flows(g, group, constraints=None, tau=None, budget=None) -> int:
    return sum(1 for _ in enumerate_flows(g, group, constraints, tau, budget))


def min_flow_number(g: SignedGraph, k_max: int, budget: int | None = None) -> int | None:
    if k_max < 2:
        raise PreconditionError("k_max must be at least 2")
    for k in range(2, k_max + 1):
        if find_nzf(g, GroupSpec.integer(k), budget=budget) is not None:
            return k
    return None


def admissibility(g: SignedGraph) -> tuple[bool, str]:
    """Flow-admissibility verdict plus the violated clause (empty string when admissible).

    Applied per component: negativeness must differ from 1, and no cut-edge may
    leave a balanced component behind.
    """
    for comp in components(g):
        comp_set = set(comp)
        comp_edges = [e for e, edge in enumerate(g.edges) if edge.u in comp_set]
        sub, vmap, emap = edge_subgraph(g, comp_edges, comp)
        if negativeness(sub) == 1:
            return False, f"negativeness of the component containing vertex {comp[0]} is 1"
        for b in sorted(bridges(sub)):
            rest = [e for e in range(sub.m) if e != b]
            side_u = _reach(sub, sub.edges[b].u, rest)
            for side in (side_u, set(range(sub.n)) - side_u):
                side_edges = [e for e in rest if sub.edges[e].u in side]
                if is_balanced(sub, side_edges):
                    return False, f"cut-edge {emap[b]} leaves a balanced component"
    return True, ""


def _reach(g: SignedGraph, start: int, edges: Sequence[int]) -> set[int]:
    allowed = set(edges)
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for e, side in g.incidence[x]:
            if e in allowed:
                y = g.other_end(e, side)
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
    return seen


def is_flow_admissible(g: SignedGraph) -> bool:
    return admissibility(g)[0]


# --- prescribed counting on ordinary graphs -------------------------------------------

def _require_ordinary(g: SignedGraph) -> None:
    if not g.ordinary():
        raise PreconditionError("operation requires an ordinary graph (all edges positive)")


def count_prescribed_nzf(
    g: SignedGraph,
    tau: Orientation,
    group: GroupSpec,
    gamma: Mapping[int, Any],
    budget: int | None = None,
) -> int:
    """Number of A-NZFs agreeing with ``gamma`` on its keys, by deletion-contraction.

    Edges outside the prescribed set are removed one at a time: a cut-edge
    contributes 0, a loop multiplies by ``|A| - 1``, and any other edge gives
    ``F(G/e) - F(G-e)``.
    """
    _require_ordinary(g)
    if not group.finite:
        raise PreconditionError("counting requires a finite group")
    tau.check(g)
    _check_edges(g, gamma)
    gam = {e: group.normalize(x) for e, x in gamma.items()}
    fixed = set(gam)
    limit = default_budget() if budget is None else budget
    memo: dict = {}
    calls = 0

    def base(alive: frozenset, rep: tuple) -> int:
        acc: dict[int, Any] = {}
        for e in alive:
            x = gam[e]
            if group.is_zero(x):
                return 0
            edge = g.edges[e]
            t0, t1 = tau.tau[e]
            for end, t in ((rep[edge.u], t0), (rep[edge.v], t1)):
                acc[end] = group.add(acc.get(end, group.zero), group.scale(t, x))
        return int(all(group.is_zero(x) for x in acc.values()))

    def is_cut(alive: frozenset, rep: tuple, e: int) -> bool:
        classes = sorted(set(rep))
        index = {r: i for i, r in enumerate(classes)}
        ids = sorted(alive)
        tmp = SignedGraph.from_edges(len(classes), [
            (index[rep[g.edges[x].u]], index[rep[g.edges[x].v]]) for x in ids
        ])
        return ids.index(e) in bridges(tmp)

    def rec(alive: frozenset, rep: tuple) -> int:
        nonlocal calls
        key = (alive, rep)
        if key in memo:
            return memo[key]
        calls += 1
        if calls > limit:
            raise BudgetExceeded(f"deletion-contraction exceeded its budget of {limit} calls")
        free = sorted(e for e in alive if e not in fixed)
        if not free:
            out = base(alive, rep)
        else:
            e = free[0]
            a, b = rep[g.edges[e].u], rep[g.edges[e].v]
            rest = alive - {e}
            if a == b:
                out = (group.order - 1) * rec(rest, rep)
            elif is_cut(alive, rep, e):
                out = 0
            else:
                lo, hi = min(a, b), max(a, b)
                merged = tuple(lo if r == hi else r for r in rep)
                out = rec(rest, merged) - rec(rest, rep)
        memo[key] = out
        return out

    return rec(frozenset(range(g.m)), tuple(range(g.n)))


def alpha(g: SignedGraph, tau: Orientation, X: Collection[int], e: int) -> int:
    """+1 if ``e`` crosses out of ``X`` directed toward ``X``, -1 if directed away, else 0."""
    edge = g.edges[e]
    inside_u, inside_v = edge.u in X, edge.v in X
    if inside_u == inside_v:
        return 0
    side = 0 if inside_u else 1
    return -tau.tau[e][side]


def are_similar(
    g: SignedGraph,
    tau: Orientation,
    group: GroupSpec,
    gamma1: Mapping[int, Any],
    gamma2: Mapping[int, Any],
    limit: int = SIMILARITY_LIMIT,
) -> bool:
    _require_ordinary(g)
    if set(gamma1) != set(gamma2):
        raise PreconditionError("both functions must be defined on the same edge set")
    _check_edges(g, gamma1)
    if g.n > limit:
        raise SizeLimitError(f"similarity check is exhaustive over 2^n subsets; n={g.n} exceeds {limit}")
    T = sorted(gamma1)
    g1 = [group.normalize(gamma1[e]) for e in T]
    g2 = [group.normalize(gamma2[e]) for e in T]
    for mask in range(1 << g.n):
        X = {v for v in range(g.n) if mask >> v & 1}
        s1 = s2 = group.zero
        for e, x1, x2 in zip(T, g1, g2):
            a = alpha(g, tau, X, e)
            if a:
                s1 = group.add(s1, group.scale(a, x1))
                s2 = group.add(s2, group.scale(a, x2))
        if group.is_zero(s1) != group.is_zero(s2):
            return False
    return True


def extend_nzf_at_vertex(
    g: SignedGraph,
    tau: Orientation,
    group: GroupSpec,
    v: int,
    gamma: Mapping[int, Any],
    budget: int | None = None,
) -> FlowAssignment:
    """An A-NZF agreeing with ``gamma`` on the edges at a vertex of degree at most 3."""
    _require_ordinary(g)
    if not 0 <= v < g.n:
        raise PreconditionError(f"invalid vertex {v}")
    if g.degree(v) > 3:
        raise PreconditionError(f"vertex {v} has degree {g.degree(v)} > 3")
    if set(gamma) != set(g.incident_edges(v)):
        raise PreconditionError("gamma must be defined exactly on the edges at v")
    gam = {e: group.normalize(x) for e, x in gamma.items()}
    if any(group.is_zero(x) for x in gam.values()):
        raise PreconditionError("gamma must be nowhere-zero")
    acc = group.zero
    for e, side in g.incidence[v]:
        acc = group.add(acc, group.scale(tau.tau[e][side], gam[e]))
    if not group.is_zero(acc):
        raise PreconditionError("gamma has nonzero boundary at v")
    if find_nzf(g, group, tau=tau, budget=budget) is None:
        raise PreconditionError("graph admits no nowhere-zero flow over this group")
    phi = find_nzf(g, group, Constraints(prescribed=gam), tau=tau, budget=budget)
    if phi is None:
        raise InvariantViolation("no extension exists although every precondition holds")
    return phi


def solve_boundary(
    g: SignedGraph,
    tau: Orientation,
    group: GroupSpec,
    beta: Sequence[Any],
) -> FlowAssignment:
    """Edge values with boundary exactly ``beta``, supported on a BFS spanning tree.

    Leaves are peeled first: each tree edge absorbs the residual boundary at its
    child end, so the root is settled by ``sum(beta) == 0``.
    """
    _require_ordinary(g)
    tau.check(g)
    if len(beta) != g.n:
        raise PreconditionError("beta needs one value per vertex")
    b = [group.normalize(x) for x in beta]
    if not group.is_zero(group.total(b)):
        raise PreconditionError("beta does not sum to zero")
    if not is_connected(g):
        raise PreconditionError("graph is disconnected")
    vals = [group.zero] * g.m
    if g.n == 0:
        return FlowAssignment(group, tuple(vals))
    parent: list[tuple[int, int] | None] = [None] * g.n
    order = [0]
    seen = {0}
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for e, side in g.incidence[x]:
            y = g.other_end(e, side)
            if y not in seen:
                seen.add(y)
                parent[y] = (e, 1 - side)
                order.append(y)
                queue.append(y)
    acc = [group.zero] * g.n
    for w in reversed(order[1:]):
        e, side = parent[w]
        residual = group.add(b[w], group.neg(acc[w]))
        x = group.scale(tau.tau[e][side], residual)
        vals[e] = x
        acc[w] = group.add(acc[w], group.scale(tau.tau[e][side], x))
        p = g.other_end(e, side)
        acc[p] = group.add(acc[p], group.scale(tau.tau[e][1 - side], x))
    phi = FlowAssignment(group, tuple(vals))
    if any(boundary(g, tau, phi, v) != b[v] for v in range(g.n)):
        raise InvariantViolation("tree peeling failed to meet the prescribed boundary")
    return phi


# --- watering search --------------------------------------------------------------------

def nzw_targets(g: SignedGraph, group: GroupSpec) -> list[frozenset[int]]:
    """Allowed boundary codes per vertex: zero at 3-vertices, (0, +-1) at 1- and 2-vertices."""
    wet = frozenset((group.encode((0, 1)), group.encode((0, 2))))
    out = []
    for v in range(g.n):
        d = g.degree(v)
        if d > 3:
            raise PreconditionError(f"vertex {v} has degree {d}; watering needs maximum degree 3")
        out.append(wet if d in (1, 2) else frozenset((0,)))
    return out


def find_nzw(
    g: SignedGraph,
    sign: int | None = None,
    tau: Orientation | None = None,
    budget: int | None = None,
) -> FlowAssignment | None:
    """A nowhere-zero watering, optionally with ``sign(supp(f1)) == sign``."""
    group = GroupSpec.z2z3()
    tau = default_orientation(g) if tau is None else tau
    tau.check(g)
    if sign not in (None, 1, -1):
        raise PreconditionError("sign target must be +1 or -1")
    parity = None if sign is None else (0 if sign == 1 else 1)
    domains = [[group.encode(x) for x in group.nonzero_elements()] for _ in range(g.m)]
    eng = _Engine(g, group, tau, domains, nzw_targets(g, group), parity,
                  default_budget() if budget is None else budget)
    codes = eng.find()
    if codes is None:
        return None
    return FlowAssignment(group, tuple(group.decode(c) for c in codes))
