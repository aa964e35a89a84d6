"""Orientations, group-valued edge assignments and the boundary operator.

An orientation gives every half-edge a direction ``tau(h) in {-1, +1}`` (+1 means
pointing away from its end) with ``tau(h) * tau(h') == -sign(e)`` on each edge.
The boundary of ``f`` at ``v`` is the sum of ``tau(h) * f(e_h)`` over the
half-edges at ``v``; a loop contributes both of its half-edges.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Sequence

from .core import SignedGraph, SuppressProvenance
from .errors import PreconditionError

Z2Z3 = "z2z3"


@dataclass(frozen=True)
class GroupSpec:
    """Value domain: bounded integers, ``Z_k``, or ``Z2 x Z3`` (pairs ``(bit, trit)``).

    For ``int`` the bound ``k`` is only used when enumerating candidate values
    (``|x| < k``); arithmetic is plain integer arithmetic.
    """

    kind: str
    k: int = 0

    def __post_init__(self):
        if self.kind not in ("int", "mod", Z2Z3):
            raise PreconditionError(f"unknown group kind {self.kind!r}")
        if self.kind in ("int", "mod") and self.k < 2:
            raise PreconditionError("k must be at least 2")

    @classmethod
    def integer(cls, k: int) -> "GroupSpec":
        return cls("int", k)

    @classmethod
    def modulo(cls, k: int) -> "GroupSpec":
        return cls("mod", k)

    @classmethod
    def z2z3(cls) -> "GroupSpec":
        return cls(Z2Z3, 6)

    @classmethod
    def parse(cls, text: str) -> "GroupSpec":
        """Accept ``int:5``, ``int 5``, ``mod:3``, ``mod 3`` or ``z2z3``."""
        parts = text.replace(":", " ").split()
        if parts == [Z2Z3]:
            return cls.z2z3()
        if len(parts) == 2 and parts[0] in ("int", "mod"):
            return cls(parts[0], int(parts[1]))
        raise PreconditionError(f"cannot parse group {text!r}")

    def __str__(self) -> str:
        return Z2Z3 if self.kind == Z2Z3 else f"{self.kind} {self.k}"

    @property
    def finite(self) -> bool:
        return self.kind != "int"

    @property
    def order(self) -> int | None:
        return None if self.kind == "int" else self.k

    @property
    def zero(self):
        return (0, 0) if self.kind == Z2Z3 else 0

    def normalize(self, x):
        if self.kind == "int":
            return int(x)
        if self.kind == "mod":
            return int(x) % self.k
        a, b = x
        return (int(a) % 2, int(b) % 3)

    def add(self, x, y):
        if self.kind == "int":
            return x + y
        if self.kind == "mod":
            return (x + y) % self.k
        return ((x[0] + y[0]) % 2, (x[1] + y[1]) % 3)

    def scale(self, s: int, x):
        """Multiply by the integer ``s`` (in practice an orientation sign)."""
        if self.kind == "int":
            return s * x
        if self.kind == "mod":
            return (s * x) % self.k
        return ((s * x[0]) % 2, (s * x[1]) % 3)

    def neg(self, x):
        return self.scale(-1, x)

    def is_zero(self, x) -> bool:
        return x == self.zero

    def total(self, xs: Iterable):
        acc = self.zero
        for x in xs:
            acc = self.add(acc, x)
        return acc

    def elements(self) -> list:
        """Candidate values, zero first then by increasing magnitude (for ``int``: ``|x| < k``)."""
        if self.kind == "int":
            out = [0]
            for t in range(1, self.k):
                out += [t, -t]
            return out
        if self.kind == "mod":
            out = [0]
            for t in range(1, self.k // 2 + 1):
                out.append(t)
                if self.k - t != t:
                    out.append(self.k - t)
            return out
        return [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)]

    def nonzero_elements(self) -> list:
        return [x for x in self.elements() if not self.is_zero(x)]

    # integer codes used by the search engine; Z2 x Z3 maps onto Z6 by CRT
    @property
    def modulus(self) -> int:
        return 0 if self.kind == "int" else self.k

    def encode(self, x) -> int:
        if self.kind == Z2Z3:
            a, b = x
            return (3 * a + 4 * b) % 6
        return self.normalize(x)

    def decode(self, c: int):
        if self.kind == Z2Z3:
            return (c % 2, c % 3)
        return c

    def parse_value(self, text: str):
        if self.kind == Z2Z3:
            a, b = text.split(",")
            return self.normalize((int(a), int(b)))
        return self.normalize(int(text))

    def format_value(self, x) -> str:
        if self.kind == Z2Z3:
            return f"{x[0]},{x[1]}"
        return str(x)

    def abs(self, x) -> int:
        if self.kind != "int":
            raise PreconditionError("absolute value only defined for integer flows")
        return abs(x)


@dataclass(frozen=True)
class Orientation:
    # tau[e] = (direction at half-edge (e, 0), direction at half-edge (e, 1))
    tau: tuple[tuple[int, int], ...]

    def __getitem__(self, half: tuple[int, int]) -> int:
        e, side = half
        return self.tau[e][side]

    def __len__(self) -> int:
        return len(self.tau)

    def check(self, g: SignedGraph) -> None:
        if len(self.tau) != g.m:
            raise PreconditionError("orientation does not match the graph's edge count")
        for e, (t0, t1) in enumerate(self.tau):
            if t0 not in (-1, 1) or t1 not in (-1, 1) or t0 * t1 != -g.edges[e].sign:
                raise PreconditionError(f"edge {e}: invalid orientation ({t0}, {t1})")

    def flipped(self, edges: Iterable[int]) -> "Orientation":
        flip = set(edges)
        return Orientation(tuple((-a, -b) if e in flip else (a, b) for e, (a, b) in enumerate(self.tau)))

    def restricted(self, edge_map: Sequence[int]) -> "Orientation":
        return Orientation(tuple(self.tau[e] for e in edge_map))

    def extended(self, extra: Iterable[tuple[int, int]]) -> "Orientation":
        return Orientation(self.tau + tuple(extra))


@dataclass(frozen=True)
class FlowAssignment:
    group: GroupSpec
    values: tuple

    def __getitem__(self, e: int):
        return self.values[e]

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    @classmethod
    def of(cls, group: GroupSpec, values: Iterable) -> "FlowAssignment":
        return cls(group, tuple(group.normalize(x) for x in values))

    @classmethod
    def zeros(cls, group: GroupSpec, m: int) -> "FlowAssignment":
        return cls(group, (group.zero,) * m)

    def with_values(self, updates: Mapping[int, Any]) -> "FlowAssignment":
        vals = list(self.values)
        for e, x in updates.items():
            vals[e] = self.group.normalize(x)
        return FlowAssignment(self.group, tuple(vals))

    def regroup(self, group: GroupSpec) -> "FlowAssignment":
        return FlowAssignment.of(group, self.values)

    def restricted(self, edge_map: Sequence[int]) -> "FlowAssignment":
        return FlowAssignment(self.group, tuple(self.values[e] for e in edge_map))


def default_orientation(g: SignedGraph) -> Orientation:
    """Positive edges point from the smaller to the larger end; negative edges are extroverted."""
    tau = []
    for e in g.edges:
        if e.sign < 0:
            tau.append((1, 1))
        elif e.u <= e.v:
            tau.append((1, -1))
        else:
            tau.append((-1, 1))
    return Orientation(tuple(tau))


def switch_orientation(g: SignedGraph, tau: Orientation, v: int) -> Orientation:
    """Orientation transform that accompanies switching at ``v``: negate ``tau`` at every half-edge at ``v``."""
    t = [list(x) for x in tau.tau]
    for e, side in g.incidence[v]:
        t[e][side] = -t[e][side]
    return Orientation(tuple((a, b) for a, b in t))


def _check_sizes(g: SignedGraph, tau: Orientation, f: FlowAssignment) -> None:
    if len(tau) != g.m or len(f) != g.m:
        raise PreconditionError("orientation and flow must cover every edge of the graph")


def boundary(g: SignedGraph, tau: Orientation, f: FlowAssignment, v: int):
    grp = f.group
    acc = grp.zero
    for e, side in g.incidence[v]:
        acc = grp.add(acc, grp.scale(tau.tau[e][side], f.values[e]))
    return acc


def boundaries(g: SignedGraph, tau: Orientation, f: FlowAssignment) -> list:
    _check_sizes(g, tau, f)
    return [boundary(g, tau, f, v) for v in range(g.n)]


def is_flow(g: SignedGraph, tau: Orientation, f: FlowAssignment) -> bool:
    zero = f.group.zero
    return all(b == zero for b in boundaries(g, tau, f))


def is_nzf(g: SignedGraph, tau: Orientation, f: FlowAssignment) -> bool:
    return all(not f.group.is_zero(x) for x in f.values) and is_flow(g, tau, f)


def is_k_nzf(g: SignedGraph, tau: Orientation, f: FlowAssignment, k: int) -> bool:
    if f.group.kind != "int":
        raise PreconditionError("k-NZF requires an integer flow")
    return all(0 < abs(x) <= k - 1 for x in f.values) and is_flow(g, tau, f)


def is_k_flow(g: SignedGraph, tau: Orientation, f: FlowAssignment, k: int) -> bool:
    if f.group.kind != "int":
        raise PreconditionError("k-flow requires an integer flow")
    return all(abs(x) <= k - 1 for x in f.values) and is_flow(g, tau, f)


def is_balanced_z2z3(g: SignedGraph, f: FlowAssignment) -> bool:
    """Even number of negative edges inside the support of the Z2 coordinate."""
    if f.group.kind != Z2Z3:
        raise PreconditionError("balancedness is defined for Z2 x Z3 assignments")
    count = sum(1 for e, x in enumerate(f.values) if x[0] == 1 and g.edges[e].sign < 0)
    return count % 2 == 0


def reorient_edge(g: SignedGraph, tau: Orientation, f: FlowAssignment, e: int) -> tuple[Orientation, FlowAssignment]:
    if not 0 <= e < g.m:
        raise PreconditionError(f"unknown edge {e}")
    return tau.flipped([e]), f.with_values({e: f.group.neg(f.values[e])})


def support(f: FlowAssignment) -> frozenset[int]:
    return frozenset(e for e, x in enumerate(f.values) if not f.group.is_zero(x))


def edges_with_abs(f: FlowAssignment, t: int) -> frozenset[int]:
    if f.group.kind != "int":
        raise PreconditionError("E_{f=±t} is defined for integer flows")
    return frozenset(e for e, x in enumerate(f.values) if abs(x) == t)


def z2_part(f: FlowAssignment) -> FlowAssignment:
    return FlowAssignment(GroupSpec.modulo(2), tuple(x[0] for x in f.values))


def z3_part(f: FlowAssignment) -> FlowAssignment:
    return FlowAssignment(GroupSpec.modulo(3), tuple(x[1] for x in f.values))


def sign_of_edges(g: SignedGraph, edges: Iterable[int]) -> int:
    s = 1
    for e in edges:
        s *= g.edges[e].sign
    return s


# --- suppression ---------------------------------------------------------------

def suppressed_orientation(g: SignedGraph, tau: Orientation, prov: SuppressProvenance) -> Orientation:
    """Orientation of the suppressed graph that reuses the end half-edges of each path.

    Only consistent when ``tau`` is directed through every suppressed 2-vertex
    (zero ``tau``-boundary there); that is checked.
    """
    out = []
    for path in prov.paths:
        for (e1, s1), (e2, s2) in zip(path, path[1:]):
            if tau.tau[e1][1 - s1] + tau.tau[e2][s2] != 0:
                raise PreconditionError("orientation is not directed through a suppressed 2-vertex")
        first_e, first_s = path[0]
        last_e, last_s = path[-1]
        out.append((tau.tau[first_e][first_s], tau.tau[last_e][1 - last_s]))
    return Orientation(tuple(out))


def lift_through_suppression(
    g: SignedGraph,
    tau: Orientation,
    prov: SuppressProvenance,
    tau_bar: Orientation,
    f_bar: FlowAssignment,
) -> FlowAssignment:
    """Carry a flow on the suppressed graph back along every subdivided path.

    The first edge of a path reproduces the suppressed edge's contribution at
    the start; each interior 2-vertex then forces the next value.
    """
    grp = f_bar.group
    vals = [grp.zero] * g.m
    for new_e, path in enumerate(prov.paths):
        e, side = path[0]
        contribution = grp.scale(tau_bar.tau[new_e][0], f_bar.values[new_e])
        x = grp.scale(tau.tau[e][side], contribution)
        vals[e] = x
        for (pe, ps), (ne, ns) in zip(path, path[1:]):
            arriving = grp.scale(tau.tau[pe][1 - ps], vals[pe])
            vals[ne] = grp.scale(tau.tau[ne][ns], grp.neg(arriving))
    return FlowAssignment(grp, tuple(vals))
