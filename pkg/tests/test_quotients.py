"""Congruence quotient pipeline: generators, reduction, closure, complexes."""

import math
import random

import pytest

from buildinglab.building import neighbors, standard_lattice
from buildinglab.fields import IdealNotCoprimeError, Poly, ResidueRing
from buildinglab.quotients import (
    PartialClosureError,
    build_quotient,
    ball_lift,
    congruence_reduce,
    covering_check,
    group_closure,
    pgl_order,
    standard_generators,
    systole,
)
from buildinglab.simplicial import ColoredGraph


def test_generator_count_d3p2():
    gens = standard_generators(3, 2)
    assert len(gens) == 7  # (2^3 - 1)/(2 - 1)


def test_generator_count_d2p3_maps_to_tree_neighbors():
    gens = standard_generators(2, 3)
    assert len(gens) == 4  # (3^2 - 1)/(3 - 1)
    base = standard_lattice(2, 3)
    assert sorted(gens.neighbor_classes) == neighbors(base, shift=1)


def test_generator_determinant_valuation_one():
    for d, p in [(2, 2), (2, 3), (3, 2), (3, 3)]:
        gens = standard_generators(d, p)
        for cls in gens.neighbor_classes:
            assert cls.det_valuation % d == 1


def test_rank2_generators_inverse_closed():
    """Products of paired generators are scalar multiples of the identity."""
    from buildinglab.building import poly_mat_mul

    for p in [2, 3, 5]:
        gens = standard_generators(2, p)
        for m in gens.matrices:
            closed = False
            for m2 in gens.matrices:
                prod = poly_mat_mul(m, m2, p)
                off_zero = prod[0][1] == () and prod[1][0] == ()
                if off_zero and prod[0][0] == prod[1][1] and prod[0][0]:
                    closed = True
            assert closed


def test_congruence_reduce_diagonal_generator():
    gens = standard_generators(3, 2)
    red = congruence_reduce(gens, (1, 1, 1))
    ring = red.ring
    assert ring.q == 4
    # the diag(1,1,y) generator reduces to diag(1,1,ybar)
    ybar = ring.element(Poly((0, 1), 2)).val
    diag = tuple(tuple(ybar if i == j == 2 else (1 if i == j else 0) for j in range(3))
                 for i in range(3))
    assert diag in red.mats
    # images are invertible for all generators
    for m in red.mats:
        assert ring.mat_det(m) != 0


def test_congruence_reduce_d2p2_deg3():
    gens = standard_generators(2, 2)
    red = congruence_reduce(gens, (1, 1, 0, 1))
    assert red.ring.q == 8
    assert len(red.mats) == 3
    for m in red.mats:
        assert red.ring.mat_det(m) != 0


def test_congruence_reduce_rejects_reducible():
    gens = standard_generators(2, 2)
    with pytest.raises(ValueError, match="[Rr]educible"):
        congruence_reduce(gens, (1, 0, 1, 0, 1))  # (y^2+y+1)^2, coprime to y(y+1)


def test_congruence_reduce_rejects_non_coprime():
    gens = standard_generators(2, 2)
    with pytest.raises(IdealNotCoprimeError):
        congruence_reduce(gens, (0, 1))


def test_group_closure_identity_seed():
    ring = ResidueRing.for_order(4)
    clo = group_closure((ring, [ring.mat_identity(2)]))
    assert clo.order == 1


def test_group_closure_lagrange_d2p2():
    X = build_quotient(2, 2, (1, 1, 1))
    # brute-force group order: |PGL_2(F_4)| = (16-1)(16-4)/3 = 60
    q = 4
    oracle = (q * q - 1) * (q * q - q) // (q - 1)
    assert oracle == 60
    assert X.closure.pgl_order() == 60
    assert X.n == 60
    assert oracle % X.n == 0


def test_group_closure_axioms_sampled():
    X = build_quotient(2, 2, (1, 1, 1))
    ring = X.ring
    els = X.closure.elements
    index = X.closure.index
    rng = random.Random(5)
    norm = ring.normalize_projective
    for _ in range(1000):
        a, b, c = (rng.choice(els) for _ in range(3))
        ab_c = norm(ring.mat_mul(norm(ring.mat_mul(a, b)), c))
        a_bc = norm(ring.mat_mul(a, norm(ring.mat_mul(b, c))))
        assert ab_c == a_bc
        assert norm(ring.mat_inv(a)) in index


def test_group_closure_cap():
    gens = standard_generators(2, 2)
    red = congruence_reduce(gens, (1, 1, 0, 1))
    with pytest.raises(PartialClosureError):
        group_closure(red, cap=100)


def test_quotient_complex_degrees_and_size():
    X = build_quotient(2, 2, (1, 1, 0, 1))
    assert X.n == X.closure.order == 504
    assert X.out_degree == 3
    deg = [0] * X.n
    for u, v in X.undirected_pairs():
        deg[u] += 1
        deg[v] += 1
    assert set(deg) == {3}


def test_quotient_complex_out_degree_d3():
    X = build_quotient(3, 3, (2, 1), cap=10_000)
    assert X.out_degree == 13
    assert X.closure.pgl_order() == pgl_order(3, 3) == 5616
    assert X.closure.pgl_order() % X.n == 0
    outs = [0] * X.n
    for u in X.edge_heads:
        outs[u] += 1
    assert set(outs) == {13}


def test_left_translation_is_colored_automorphism():
    X = build_quotient(2, 2, (1, 1, 1))
    ring = X.ring
    norm = ring.normalize_projective
    rng = random.Random(6)
    edges = set(zip(X.edge_heads, X.edge_tails, X.edge_labels))
    for _ in range(5):
        h = rng.choice(X.closure.elements)
        perm = [X.closure.index[norm(ring.mat_mul(h, g))] for g in X.closure.elements]
        for u, v, k in list(edges)[:300]:
            assert (perm[u], perm[v], k) in edges


def test_chambers_d3_are_triangles():
    X = build_quotient(3, 3, (2, 1), cap=10_000)
    chambers = X.chambers()
    assert chambers
    pairs = set(X.undirected_pairs())
    for ch in chambers[:200]:
        assert len(ch) == 3
        for a, b in [(ch[0], ch[1]), (ch[0], ch[2]), (ch[1], ch[2])]:
            assert (a, b) in pairs


# ---------------------------------------------------------------------------
# systole


def test_systole_triangle_and_square():
    tri = ColoredGraph.from_undirected_pairs(3, [(0, 1), (1, 2), (0, 2)])
    assert systole(tri) == 3
    sq = ColoredGraph.from_undirected_pairs(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    assert systole(sq) == 4


def test_systole_forest_infinite():
    tree = ColoredGraph.from_undirected_pairs(5, [(0, 1), (0, 2), (1, 3), (1, 4)])
    assert systole(tree) == math.inf


def _girth_by_edge_deletion(pairs, n):
    """Oracle: for each edge, the shortest cycle through it is 1 + the
    distance between its endpoints with the edge removed."""
    best = math.inf
    for drop in range(len(pairs)):
        adj = [[] for _ in range(n)]
        for i, (u, v) in enumerate(pairs):
            if i != drop:
                adj[u].append(v)
                adj[v].append(u)
        s, t = pairs[drop]
        dist = {s: 0}
        frontier = [s]
        while frontier and t not in dist:
            nxt = []
            for x in frontier:
                for y in adj[x]:
                    if y not in dist:
                        dist[y] = dist[x] + 1
                        nxt.append(y)
            frontier = nxt
        if t in dist:
            best = min(best, dist[t] + 1)
    return best


def test_systole_matches_bruteforce_girth():
    X = build_quotient(2, 2, (1, 1, 0, 1))
    s = systole(X, vertex_transitive=True)
    pairs = X.undirected_pairs()
    assert s == _girth_by_edge_deletion(pairs, X.n)
    # default all-sources computation agrees
    assert systole(ColoredGraph.from_undirected_pairs(X.n, pairs)) == s


# ---------------------------------------------------------------------------
# covering diagnostics


def test_covering_radius_zero():
    X = build_quotient(2, 2, (1, 1, 1))
    assert covering_check(X, 0).passed


def test_covering_radius_one_both_ranks():
    X2 = build_quotient(2, 2, (1, 1, 0, 1))
    assert covering_check(X2, 1).passed
    assert systole(X2, vertex_transitive=True) >= 3
    X3 = build_quotient(3, 2, (1, 1, 1))
    v = covering_check(X3, 1)
    assert v.passed
    assert v.quotient_ball_size == 8  # identity plus 7 out-neighbors
    assert systole(X3, vertex_transitive=True) >= 3


def test_degree_one_modulus_degenerates_and_is_detected():
    """A degree-1 modulus sends y to a constant, so the diagonal generator
    collapses; covering_check reports the local mismatch."""
    X = build_quotient(3, 3, (2, 1), cap=10_000)
    v = covering_check(X, 1)
    assert not v.passed
    assert "differ" in v.mismatch


def test_covering_rejects_radius_beyond_half_systole():
    X = build_quotient(2, 2, (1, 1, 1))
    s = systole(X, vertex_transitive=True)
    with pytest.raises(ValueError):
        covering_check(X, s)


def test_covering_detects_corruption():
    X = build_quotient(2, 2, (1, 1, 0, 1))
    X.edge_tails[0] = X.edge_tails[1]
    X._undirected = None
    X._systole = None
    verdict = covering_check(X, 1)
    assert not verdict.passed
    assert verdict.mismatch


def test_ball_lift_is_local_isomorphism():
    X = build_quotient(2, 2, (1, 1, 0, 1))
    s = systole(X, vertex_transitive=True)
    r = (s - 1) // 2
    lift, order = ball_lift(X, r)
    assert len(set(lift.values())) == len(lift)
    # lifted classes really are the building ball: compare against BFS ball
    from buildinglab.building import ball as building_ball

    B = building_ball(standard_lattice(2, 2), r)
    assert sorted(v.mat for v in lift.values()) == sorted(v.mat for v in B.payloads)


def test_quotient_json_report():
    X = build_quotient(2, 2, (1, 1, 1))
    rep = X.to_json_dict()
    assert rep["order"] == 60
    assert rep["out_degree"] == 3
    assert rep["order_divides_pgl"] is True
