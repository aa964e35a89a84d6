from __future__ import annotations

import pytest
from hypothesis import assume, given, strategies as st

from signedflow.core import SignedGraph, delete_vertices, edge_subgraph, is_connected, switch
from signedflow.errors import PreconditionError
from signedflow.flows import FlowAssignment, GroupSpec, boundary, default_orientation
from signedflow.generators import named
from signedflow.search import find_nzw
from signedflow.shrubbery import (
    chord_partition,
    extend_nzw_over_circuit,
    is_removable_circuit,
    is_shrubbery,
    unbalanced_eta,
    verify_nzw,
)

from oracles import naive_balanced, naive_circuits, naive_nzw
from strategies import signed_graphs

f = SignedGraph.from_edges
Z23 = GroupSpec.z2z3()
Z3 = GroupSpec.modulo(3)
EMPTY = FlowAssignment(Z23, ())


@st.composite
def subcubic_graphs(draw, max_n=4, max_m=6, min_m=1):
    g = draw(signed_graphs(max_n=max_n, max_m=max_m, min_m=min_m))
    assume(all(g.degree(v) <= 3 for v in range(g.n)))
    return g


# --- chords ---------------------------------------------------------------------------------

def test_chord_partition_unbalanced_theta():
    g = named("unbalanced_theta")
    part = chord_partition(g, [0, 2, 3])
    assert part.chords == {1} and part.unbalanced == {1} and not part.balanced


def test_chord_partition_path_in_triangle(triangle):
    part = chord_partition(triangle, [0, 1])
    assert part.chords == {2} and part.balanced == {2}


def test_chord_partition_loop_chord():
    g = f(2, [(0, 1), (0, 0, -1), (1, 1)])
    part = chord_partition(g, [0])
    assert part.unbalanced == {1} and part.balanced == {2}


def test_chord_partition_needs_connected(triangle):
    g = f(4, [(0, 1), (2, 3), (1, 2)])
    with pytest.raises(PreconditionError):
        chord_partition(g, [0, 1])
    with pytest.raises(PreconditionError):
        chord_partition(triangle, [])


@given(signed_graphs(max_n=4, max_m=7, min_m=1), st.data())
def test_unbalanced_chords_match_oracle(g, data):
    h = data.draw(st.sets(st.integers(0, g.m - 1), min_size=1))
    sub, _, _ = edge_subgraph(g, h)
    assume(is_connected(sub) and naive_balanced(sub))
    part = chord_partition(g, h)
    for e in part.chords:
        grown, _, _ = edge_subgraph(g, set(h) | {e})
        assert (e in part.unbalanced) == (not naive_balanced(grown))


# --- removable circuits --------------------------------------------------------------------------

def test_removable_examples(triangle):
    assert is_removable_circuit(named("negative_loop"), [0])
    assert is_removable_circuit(triangle, [0, 1, 2])
    assert not is_removable_circuit(named("k4"), [0, 1, 3])
    # one degree-2 vertex and one unbalanced chord
    g = f(3, [(0, 1), (1, 2), (0, 2), (0, 1, -1)])
    assert is_removable_circuit(g, [0, 1, 2])
    with pytest.raises(PreconditionError):
        is_removable_circuit(triangle, [0, 1])


# --- axioms -----------------------------------------------------------------------------------

def test_single_edge_is_shrubbery():
    assert is_shrubbery(f(2, [(0, 1)])) == (True, None)


def test_k4_fails_s3():
    ok, (axiom, _) = is_shrubbery(named("k4"))
    assert not ok and axiom == "S3"


def test_degree_four_fails_s1():
    ok, witness = is_shrubbery(f(3, [(0, 1), (0, 2), (0, 1), (0, 2)]))
    assert not ok and witness == ("S1", 0)


def test_inadmissible_cubic_component_fails_s2():
    # negative loop at 0 bridged to a balanced cubic piece
    g = f(6, [(0, 0, -1), (0, 1), (1, 2), (1, 3), (2, 4), (2, 5), (3, 4), (3, 5), (4, 5)])
    ok, (axiom, _) = is_shrubbery(g)
    assert not ok and axiom == "S2"


def test_balanced_square_fails_s4():
    c4 = f(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    assert is_shrubbery(c4) == (False, ("S4", frozenset({0, 1, 2, 3})))
    assert is_shrubbery(c4.with_signs([1, 1, 1, -1])) == (True, None)


def test_shrubbery_size_limit():
    with pytest.raises(PreconditionError):
        is_shrubbery(f(17, [(i, i + 1) for i in range(16)]))


@given(subcubic_graphs(max_n=5, max_m=7), st.data())
def test_shrubbery_switch_invariant(g, data):
    v = data.draw(st.integers(0, g.n - 1))
    assert is_shrubbery(g)[0] == is_shrubbery(switch(g, v))[0]


# --- waterings ---------------------------------------------------------------------------------

def test_verify_nzw_path():
    g = f(3, [(0, 1), (1, 2)])
    assert verify_nzw(g, FlowAssignment(Z23, ((0, 1), (0, 2))))
    assert not verify_nzw(g, FlowAssignment(Z23, ((0, 1), (0, 1))))
    # reversing the second edge swaps which assignment works
    tau = default_orientation(g).flipped([1])
    assert verify_nzw(g, FlowAssignment(Z23, ((0, 1), (0, 1))), tau)
    assert not verify_nzw(g, FlowAssignment(Z23, ((0, 1), (0, 2))), tau)


def test_verify_nzw_triangle(triangle):
    assert not verify_nzw(triangle, FlowAssignment(Z23, ((1, 1),) * 3))
    assert not verify_nzw(triangle, FlowAssignment(Z23, ((0, 0), (0, 1), (0, 1))))


def test_verify_nzw_degree_limit():
    with pytest.raises(PreconditionError):
        verify_nzw(f(3, [(0, 1), (0, 2), (0, 1), (0, 2)]), FlowAssignment(Z23, ((0, 1),) * 4))


@given(subcubic_graphs(max_n=4, max_m=5, min_m=0), st.sampled_from((None, 1, -1)))
def test_find_nzw_matches_oracle(g, sign):
    found = find_nzw(g, sign=sign)
    exists = next(naive_nzw(g, sign=sign), None) is not None
    assert (found is not None) == exists
    if found is not None:
        assert verify_nzw(g, found)


def test_nzw_oracle_agrees_with_verifier():
    g = f(4, [(0, 1), (1, 2), (0, 2, -1), (2, 3), (3, 3, -1)])
    for vals in naive_nzw(g):
        assert verify_nzw(g, FlowAssignment(Z23, vals))


# --- eta functions ------------------------------------------------------------------------------

@pytest.mark.parametrize("g,c", [
    (f(1, [(0, 0, -1)]), [0]),
    (f(2, [(0, 1), (0, 1, -1)]), [0, 1]),
    (f(3, [(0, 1), (1, 2, -1), (0, 2)]), [0, 1, 2]),
    (f(4, [(0, 1, -1), (1, 2, -1), (2, 3), (3, 0, -1), (0, 2)]), [0, 1, 2, 3]),
], ids=["loop", "digon", "triangle", "square"])
def test_unbalanced_eta(g, c):
    tau = default_orientation(g)
    verts = {g.edges[e].u for e in c} | {g.edges[e].v for e in c}
    for u in verts:
        eta = unbalanced_eta(g, c, u)
        assert set(eta) == set(c) and all(eta.values())
        phi = FlowAssignment(Z3, tuple(eta.get(e, 0) for e in range(g.m)))
        for v in verts:
            assert boundary(g, tau, phi, v) == (1 if v == u else 0)


def test_unbalanced_eta_rejects_balanced(triangle):
    with pytest.raises(PreconditionError):
        unbalanced_eta(triangle, [0, 1, 2], 0)


# --- extension over a removable circuit -------------------------------------------------------------

def test_extend_unbalanced_loop():
    g = f(1, [(0, 0, -1)])
    w = extend_nzw_over_circuit(g, [0], EMPTY)
    assert verify_nzw(g, w) and w[0][0] == 1


def test_extend_balanced_triangle(triangle):
    w = extend_nzw_over_circuit(triangle, [0, 1, 2], EMPTY)
    assert verify_nzw(triangle, w)
    assert all(x[0] == 1 for x in w)


def test_extend_twice_on_disjoint_circuits(barbell):
    rest, _, _ = delete_vertices(barbell, [1])
    w1 = extend_nzw_over_circuit(rest, [0], EMPTY)
    w = extend_nzw_over_circuit(barbell, [2], w1)
    assert verify_nzw(barbell, w)
    assert {e for e, x in enumerate(w) if x[0]} == {1, 2}


def test_extend_rejects_bad_input(triangle):
    with pytest.raises(PreconditionError):
        extend_nzw_over_circuit(named("k4"), [0, 1, 3], FlowAssignment(Z23, ((0, 1),) * 3))
    g = f(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4)])
    with pytest.raises(PreconditionError):
        extend_nzw_over_circuit(g, [0, 1, 2], FlowAssignment(Z23, ((1, 0),)))
    assert verify_nzw(g, extend_nzw_over_circuit(g, [0, 1, 2], FlowAssignment(Z23, ((0, 1),))))


@given(subcubic_graphs(max_n=5, max_m=7))
def test_extend_property(g):
    for c in naive_circuits(g):
        if not is_removable_circuit(g, c):
            continue
        verts = {g.edges[e].u for e in c} | {g.edges[e].v for e in c}
        rest, _, remap = delete_vertices(g, verts)
        w0 = find_nzw(rest)
        if w0 is None:
            continue
        w = extend_nzw_over_circuit(g, c, w0)
        assert verify_nzw(g, w)
        assert {e for e, x in enumerate(w) if x[0]} == {remap[le] for le, x in enumerate(w0) if x[0]} | set(c)


@given(subcubic_graphs(max_n=5, max_m=7), st.data())
def test_shrubbery_inherited_by_edge_subsets(g, data):
    assume(is_shrubbery(g)[0])
    keep = data.draw(st.sets(st.integers(0, g.m - 1)))
    h = SignedGraph(g.n, tuple(g.edges[e] for e in sorted(keep)))
    assert is_shrubbery(h)[0]
