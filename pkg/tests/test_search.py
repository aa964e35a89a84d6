from __future__ import annotations

import random
from itertools import product

import pytest
from hypothesis import given

from signedflow.core import SignedGraph, is_connected
from signedflow.errors import BudgetExceeded, PreconditionError, SizeLimitError
from signedflow.flows import (
    GroupSpec,
    boundaries,
    default_orientation,
    is_balanced_z2z3,
    is_k_nzf,
    is_nzf,
)
from signedflow.generators import corpus_enumerate, named
from signedflow.search import (
    Constraints,
    admissibility,
    alpha,
    are_similar,
    count_flows,
    count_prescribed_nzf,
    elimination_order,
    extend_nzf_at_vertex,
    find_nzf,
    find_nzw,
    is_flow_admissible,
    min_flow_number,
    solve_boundary,
)

from oracles import naive_count, naive_has_nzf
from strategies import signed_graphs

f = SignedGraph.from_edges
INT2 = GroupSpec.integer(2)
INT3 = GroupSpec.integer(3)
INT4 = GroupSpec.integer(4)
INT11 = GroupSpec.integer(11)
Z3 = GroupSpec.modulo(3)
Z6 = GroupSpec.modulo(6)
Z23 = GroupSpec.z2z3()


# --- find_nzf ---------------------------------------------------------------------------------

def test_negative_loop_has_no_flow():
    assert find_nzf(named("negative_loop"), INT11) is None


def test_triangle_two_flow(triangle):
    phi = find_nzf(triangle, INT2)
    assert phi is not None
    assert all(abs(x) == 1 for x in phi)
    assert is_k_nzf(triangle, default_orientation(triangle), phi, 2)


def test_unbalanced_digon_no_z3_flow():
    g = named("unbalanced_digon")
    assert find_nzf(g, Z3) is None
    assert not naive_has_nzf(g, "mod", 3)


def test_elimination_order_is_bfs():
    g = f(4, [(2, 3), (0, 2), (1, 3), (0, 1)])
    # from vertex 0: edges 1 and 3, then edges at 2 (0), then at 1 (2)
    assert elimination_order(g) == [1, 3, 0, 2]


@pytest.mark.parametrize("kind,k", [("int", 3), ("int", 4), ("mod", 3), ("mod", 4), ("z2z3", None)])
def test_find_nzf_matches_oracle(kind, k):
    group = {"int": GroupSpec.integer, "mod": GroupSpec.modulo}[kind](k) if k else Z23
    for g in corpus_enumerate(2, 4):
        assert (find_nzf(g, group) is not None) == naive_has_nzf(g, kind, k), g


@pytest.mark.parametrize("kind,k", [("int", 3), ("mod", 3), ("mod", 5), ("z2z3", None)])
def test_count_flows_matches_oracle(kind, k):
    group = {"int": GroupSpec.integer, "mod": GroupSpec.modulo}[kind](k) if k else Z23
    for g in corpus_enumerate(2, 4):
        tau = default_orientation(g)
        assert count_flows(g, group) == naive_count(g, kind, k, tau.tau, {}), g


@given(signed_graphs(max_n=4, max_m=5))
def test_found_flows_verify(g):
    for group in (INT3, INT4, Z3, Z23):
        phi = find_nzf(g, group)
        if phi is not None:
            assert is_nzf(g, default_orientation(g), phi)


@given(signed_graphs(max_n=4, max_m=6))
def test_completeness_under_permuted_order(g):
    base = find_nzf(g, INT3) is not None
    rng = random.Random(g.m * 31 + g.n)
    for _ in range(3):
        order = list(range(g.m))
        rng.shuffle(order)
        assert (find_nzf(g, INT3, order=order) is not None) == base


def test_constraints_prescribed_and_forbidden():
    g = named("theta")
    phi = find_nzf(g, INT3, Constraints(prescribed={0: 2}))
    assert phi[0] == 2
    # forbidding |f| = 2 everywhere leaves only +-1, and 1 + 1 + 1 cannot cancel
    assert find_nzf(g, INT3, Constraints(forbidden_abs={e: {2} for e in range(3)})) is None


def test_constraints_balanced(barbell):
    phi = find_nzf(barbell, Z23, Constraints(balanced=True))
    assert phi is not None and is_balanced_z2z3(barbell, phi)
    # the unbalanced digon has a Z2xZ3-NZF, (1, 0) on both edges, but no balanced one
    digon = named("unbalanced_digon")
    assert tuple(find_nzf(digon, Z23)) == ((1, 0), (1, 0))
    assert find_nzf(digon, Z23, Constraints(balanced=True)) is None


def test_constraints_support_only():
    g = named("theta")
    c = Constraints(nowhere_zero=False, support=(0,), allowed={2: (0,)})
    phi = find_nzf(g, INT3, c)
    assert phi[2] == 0 and phi[0] != 0


def test_budget_exceeded():
    with pytest.raises(BudgetExceeded):
        find_nzf(named("petersen"), INT4, budget=50)


def test_bad_order_rejected(triangle):
    with pytest.raises(PreconditionError):
        find_nzf(triangle, INT3, order=[0, 0, 1])


# --- flow number and admissibility ---------------------------------------------------------

def test_min_flow_numbers(triangle, barbell, k13):
    assert min_flow_number(triangle, 6) == 2
    assert min_flow_number(barbell, 6) == 3
    assert min_flow_number(k13, 6) == 5
    assert min_flow_number(k13, 4) is None


def test_min_flow_number_petersen():
    assert min_flow_number(named("petersen"), 6) == 5


def test_admissibility_examples(triangle):
    assert not is_flow_admissible(named("negative_loop"))
    assert "negativeness" in admissibility(named("negative_loop"))[1]
    assert is_flow_admissible(triangle)
    two = named("two_triangles_bridge")
    ok, why = admissibility(two)
    assert not ok and "cut-edge 6" in why
    assert min_flow_number(two, 11) is None


def test_admissibility_matches_flow_existence_small():
    for g in corpus_enumerate(3, 5):
        assert is_flow_admissible(g) == (find_nzf(g, INT11) is not None), g


# --- prescribed counting -----------------------------------------------------------------------

def test_count_prescribed_examples(triangle):
    tau = default_orientation(triangle)
    assert count_prescribed_nzf(triangle, tau, Z3, {0: 1}) == 1
    path = f(3, [(0, 1), (1, 2)])
    assert count_prescribed_nzf(path, default_orientation(path), Z3, {}) == 0
    loop = f(1, [(0, 0)])
    assert count_prescribed_nzf(loop, default_orientation(loop), Z3, {}) == 2


def test_cut_edge_outside_prescription_gives_zero():
    g = f(4, [(0, 1), (0, 1), (1, 2), (2, 3), (2, 3)])
    tau = default_orientation(g)
    assert count_prescribed_nzf(g, tau, Z3, {0: 1, 3: 2}) == 0


@pytest.mark.parametrize("group,kind,k", [(Z3, "mod", 3), (Z6, "mod", 6), (Z23, "z2z3", None)], ids=str)
def test_count_prescribed_matches_enumeration(group, kind, k):
    rng = random.Random(5)
    for g in corpus_enumerate(3, 4):
        if not g.ordinary():
            continue
        tau = default_orientation(g)
        elems = group.nonzero_elements()
        gamma = {e: rng.choice(elems) for e in range(g.m) if rng.random() < 0.4}
        assert count_prescribed_nzf(g, tau, group, gamma) == naive_count(g, kind, k, tau.tau, gamma)


def test_count_prescribed_requires_ordinary(barbell):
    with pytest.raises(PreconditionError):
        count_prescribed_nzf(barbell, default_orientation(barbell), Z3, {})


def test_count_prescribed_budget():
    g = named("k4")
    with pytest.raises(BudgetExceeded):
        count_prescribed_nzf(g, default_orientation(g), Z3, {}, budget=3)


# --- similarity --------------------------------------------------------------------------------

def test_alpha_directions():
    g = f(2, [(0, 1)])
    tau = default_orientation(g)
    # edge points 0 -> 1: toward {1}, away from {0}
    assert alpha(g, tau, {1}, 0) == 1
    assert alpha(g, tau, {0}, 0) == -1
    assert alpha(g, tau, {0, 1}, 0) == 0


def test_similar_examples():
    g = named("k4")
    tau = default_orientation(g)
    gam = {0: 1, 1: 1, 2: 1}
    assert are_similar(g, tau, Z3, gam, gam)
    # at vertex 0 all three edges leave; any two nowhere-zero zero-sum triples are similar
    assert are_similar(g, tau, Z3, {0: 1, 1: 1, 2: 1}, {0: 2, 1: 2, 2: 2})
    assert not are_similar(g, tau, Z3, {0: 0}, {0: 1})


def test_similarity_size_limit():
    g = f(25, [(i, i + 1) for i in range(24)])
    with pytest.raises(SizeLimitError):
        are_similar(g, default_orientation(g), Z3, {0: 1}, {0: 2})


def test_similar_pairs_have_equal_counts():
    for g in corpus_enumerate(3, 4):
        if not g.ordinary():
            continue
        tau = default_orientation(g)
        T = list(range(min(2, g.m)))
        for vals1 in product(Z3.nonzero_elements(), repeat=len(T)):
            for vals2 in product(Z3.nonzero_elements(), repeat=len(T)):
                g1, g2 = dict(zip(T, vals1)), dict(zip(T, vals2))
                if are_similar(g, tau, Z3, g1, g2):
                    assert count_prescribed_nzf(g, tau, Z3, g1) == count_prescribed_nzf(g, tau, Z3, g2)


def test_zero_prescription_on_loop_breaks_literal_similarity():
    # alpha is 0 on a loop for every X, so 0 and 1 look similar, yet only 1 extends
    g = f(1, [(0, 0)])
    tau = default_orientation(g)
    assert are_similar(g, tau, Z3, {0: 0}, {0: 1})
    assert count_prescribed_nzf(g, tau, Z3, {0: 0}) == 0
    assert count_prescribed_nzf(g, tau, Z3, {0: 1}) == 1


# --- extension and boundary solving -------------------------------------------------------------

def test_extend_triangle(triangle):
    tau = default_orientation(triangle)
    # both edges at 0 leave it, so the prescribed values must cancel
    phi = extend_nzf_at_vertex(triangle, tau, Z3, 0, {0: 1, 2: 2})
    assert is_nzf(triangle, tau, phi)
    assert tuple(phi) == (1, 1, 2)


def test_extend_theta():
    g = named("theta")
    tau = default_orientation(g)
    phi = extend_nzf_at_vertex(g, tau, Z3, 0, {0: 1, 1: 1, 2: 1})
    assert tuple(phi) == (1, 1, 1)


def test_extend_k4_z2z3():
    g = named("k4")
    tau = default_orientation(g)
    gamma = {0: (1, 0), 1: (0, 1), 2: (1, 2)}
    phi = extend_nzf_at_vertex(g, tau, Z23, 0, gamma)
    assert is_nzf(g, tau, phi)
    assert all(phi[e] == x for e, x in gamma.items())


def test_extend_preconditions(triangle):
    tau = default_orientation(triangle)
    with pytest.raises(PreconditionError):
        extend_nzf_at_vertex(triangle, tau, Z3, 0, {0: 1, 2: 1})
    with pytest.raises(PreconditionError):
        extend_nzf_at_vertex(triangle, tau, Z3, 0, {0: 1})
    path = f(2, [(0, 1)])
    with pytest.raises(PreconditionError):
        extend_nzf_at_vertex(path, default_orientation(path), Z3, 0, {0: 1})


def test_solve_boundary_examples():
    path = f(2, [(0, 1)])
    tau = default_orientation(path)
    assert tuple(solve_boundary(path, tau, Z3, [0, 0])) == (0,)
    phi = solve_boundary(path, tau, Z3, [1, 2])
    assert tuple(phi) == (1,)
    c5 = f(5, [(i, (i + 1) % 5) for i in range(5)])
    t5 = default_orientation(c5)
    beta = [1, 2, 0, 0, 0]
    assert boundaries(c5, t5, solve_boundary(c5, t5, Z3, beta)) == beta


def test_solve_boundary_rejects_bad_input(triangle):
    tau = default_orientation(triangle)
    with pytest.raises(PreconditionError):
        solve_boundary(triangle, tau, Z3, [1, 0, 0])
    two = f(2, [(0, 0)])
    with pytest.raises(PreconditionError):
        solve_boundary(two, default_orientation(two), Z3, [1, 2])


@given(signed_graphs(max_n=5, max_m=7, ordinary=True))
def test_solve_boundary_connected_property(g):
    if not is_connected(g):
        return
    tau = default_orientation(g)
    rng = random.Random(g.m)
    for group in (Z3, Z23, GroupSpec.integer(5)):
        elems = group.elements()
        head = [rng.choice(elems) for _ in range(g.n - 1)]
        beta = head + [group.neg(group.total(head))]
        assert boundaries(g, tau, solve_boundary(g, tau, group, beta)) == [group.normalize(b) for b in beta]


# --- waterings ------------------------------------------------------------------------------------

def test_nzw_single_edge():
    g = f(2, [(0, 1)])
    w = find_nzw(g)
    assert w is not None and w[0][0] == 0


def test_nzw_sign_targets_on_unbalanced_theta():
    g = named("unbalanced_theta")
    for s in (1, -1):
        w = find_nzw(g, sign=s)
        neg = sum(1 for e, x in enumerate(w) if x[0] and g.edges[e].sign < 0)
        assert (-1) ** neg == s


def test_nzw_rejects_high_degree():
    with pytest.raises(PreconditionError):
        find_nzw(named("k5"))
