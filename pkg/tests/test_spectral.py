"""Spectra, the optimal-expander bound, colored operators, Cheeger estimates."""

import itertools
import math
import random
import warnings

import numpy as np
import pytest

from buildinglab.simplicial import ColoredGraph
from buildinglab.spectral import (
    IrregularGraphError,
    adjacency_spectrum,
    cheeger_estimate,
    colored_spectra,
    ramanujan_check,
)


def complete_graph(n):
    return ColoredGraph.from_undirected_pairs(
        n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def cycle_graph(n):
    return ColoredGraph.from_undirected_pairs(n, [(i, (i + 1) % n) for i in range(n)])


def petersen_graph():
    vs = list(itertools.combinations(range(5), 2))
    idx = {v: i for i, v in enumerate(vs)}
    pairs = [(idx[a], idx[b]) for a, b in itertools.combinations(vs, 2)
             if not set(a) & set(b)]
    return ColoredGraph.from_undirected_pairs(10, pairs)


def circular_ladder(n):
    pairs = [(i, (i + 1) % n) for i in range(n)]
    pairs += [(i + n, (i + 1) % n + n) for i in range(n)]
    pairs += [(i, i + n) for i in range(n)]
    return ColoredGraph.from_undirected_pairs(2 * n, pairs)


def test_complete_graph_spectrum():
    rep = adjacency_spectrum(complete_graph(4))
    assert np.allclose(rep.eigenvalues, [3, -1, -1, -1], atol=1e-9)


def test_cycle_spectrum():
    rep = adjacency_spectrum(cycle_graph(6))
    expected = sorted((2 * math.cos(2 * math.pi * j / 6) for j in range(6)), reverse=True)
    assert np.allclose(rep.eigenvalues, expected, atol=1e-9)


def test_quotient_spectrum_top_and_gap():
    from buildinglab.quotients import build_quotient

    X = build_quotient(2, 2, (1, 1, 0, 1))
    rep = adjacency_spectrum(X)
    assert abs(rep.eigenvalues[0] - 3.0) < 1e-9
    assert rep.eigenvalues[1] < 3.0


def test_spectrum_permutation_invariance():
    rng = random.Random(8)
    pet = petersen_graph()
    perm = list(range(10))
    rng.shuffle(perm)
    pairs = [(perm[u], perm[v]) for u, v in pet.undirected_pairs()]
    rep1 = adjacency_spectrum(pet)
    rep2 = adjacency_spectrum(ColoredGraph.from_undirected_pairs(10, pairs))
    assert np.allclose(rep1.eigenvalues, rep2.eigenvalues, atol=1e-9)


def test_spectrum_trace_zero():
    for g in [complete_graph(5), cycle_graph(9), petersen_graph()]:
        rep = adjacency_spectrum(g)
        assert abs(sum(rep.eigenvalues)) <= 1e-7 * len(rep.eigenvalues)


def test_iterative_matches_dense_at_extremes():
    g = circular_ladder(15)
    dense = adjacency_spectrum(g, mode="dense")
    it = adjacency_spectrum(g, mode="iterative")
    assert abs(it.eigenvalues[0] - dense.eigenvalues[0]) < 1e-6
    assert abs(it.eigenvalues[-1] - dense.eigenvalues[-1]) < 1e-6


def test_dense_cap():
    with pytest.raises(ValueError):
        adjacency_spectrum(cycle_graph(3), mode="nonsense")


class _AsymmetricGraph(ColoredGraph):
    """Overrides the adjacency with a deliberately nonsymmetric matrix."""

    def __init__(self):
        super().__init__(3, [(0, 1, 0)])

    def undirected_adjacency(self):
        import scipy.sparse

        return scipy.sparse.csr_matrix(
            np.array([[0, 1, 0], [0, 0, 0], [0, 0, 0]], dtype=np.int8))


def test_directed_input_rejected():
    with pytest.raises(ValueError, match="symmetric"):
        adjacency_spectrum(_AsymmetricGraph())


# ---------------------------------------------------------------------------
# optimal-expander checks


def test_cycles_pass():
    for n in range(3, 51):
        assert ramanujan_check(cycle_graph(n)).passed


def test_k4_passes():
    v = ramanujan_check(complete_graph(4))
    assert v.passed
    assert abs(v.max_nontrivial_modulus - 1.0) < 1e-9
    assert abs(v.bound - 2 * math.sqrt(2)) < 1e-12


def test_petersen_passes_with_known_spectrum():
    v = ramanujan_check(petersen_graph())
    assert v.passed
    assert abs(v.max_nontrivial_modulus - 2.0) < 1e-9
    mults = v.report.multiplicities(tol=1e-8)
    assert [(round(val), m) for val, m in mults] == [(3, 1), (1, 5), (-2, 4)]


def test_circular_ladder_rejected():
    # 3-regular with lambda_2 = 1 + 2cos(2 pi / 24) > 2 sqrt(2)
    v = ramanujan_check(circular_ladder(24))
    assert not v.passed
    assert v.max_nontrivial_modulus > v.bound + 1e-6


def test_irregular_graph_error_names_vertex():
    g = ColoredGraph.from_undirected_pairs(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])
    with pytest.raises(IrregularGraphError) as ei:
        ramanujan_check(g)
    assert ei.value.vertex in (0, 1, 2, 3)


# ---------------------------------------------------------------------------
# colored spectra


def test_colored_shift_operator_row_sums():
    from buildinglab.quotients import build_quotient

    X = build_quotient(2, 2, (1, 1, 1))
    cg = X.colored_graph()
    A1 = cg.directed_adjacency(shift=1)
    assert set(np.asarray(A1.sum(axis=1)).ravel()) == {X.out_degree}


def test_colored_spectra_transpose_pair_moduli():
    n = 9
    edges = []
    for i in range(n):
        for a in (1, 4, 7):
            edges.append((i, (i + a) % n, 1))
            edges.append(((i + a) % n, i, 2))

    class Synthetic:
        d = 3

        def colored_graph(self):
            return ColoredGraph(n, edges)

    reps = colored_spectra(Synthetic())
    assert set(reps) == {1, 2}
    assert np.allclose(reps[1].moduli, reps[2].moduli, atol=1e-9)
    assert abs(reps[1].moduli[0] - 3.0) < 1e-9


def test_colored_spectra_on_quotient_trivial_eigenvalue():
    from buildinglab.quotients import build_quotient

    X = build_quotient(2, 2, (1, 1, 0, 1))
    reps = colored_spectra(X)
    assert abs(reps[1].moduli[0] - 3.0) < 1e-9  # top modulus is the out-degree


# ---------------------------------------------------------------------------
# Cheeger


def _cheeger_by_subsets(pairs, n):
    """Direct subset enumeration oracle (independent of the Gray-code walk)."""
    best = math.inf
    for mask in range(1, 1 << n):
        size = bin(mask).count("1")
        if size > n // 2:
            continue
        cut = sum(1 for u, v in pairs if ((mask >> u) & 1) != ((mask >> v) & 1))
        best = min(best, cut / size)
    return best


def test_cheeger_k4():
    b = cheeger_estimate(complete_graph(4))
    assert b.exact == 2.0
    assert _cheeger_by_subsets(complete_graph(4).undirected_pairs(), 4) == 2.0


def test_cheeger_c6():
    b = cheeger_estimate(cycle_graph(6))
    oracle = _cheeger_by_subsets(cycle_graph(6).undirected_pairs(), 6)
    assert b.exact == oracle == pytest.approx(2 / 3)


def test_cheeger_disconnected():
    g = ColoredGraph.from_undirected_pairs(4, [(0, 1), (2, 3)])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        b = cheeger_estimate(g)
    assert b.exact == 0.0


def test_spectral_sandwich_contains_exact_value():
    cube = ColoredGraph.from_undirected_pairs(
        8, [(a, b) for a in range(8) for b in range(a + 1, 8)
            if bin(a ^ b).count("1") == 1])
    corpus = [complete_graph(4), cycle_graph(6), cycle_graph(8), petersen_graph(), cube]
    for g in corpus:
        exact = cheeger_estimate(g).exact
        # recompute the sandwich by hand
        rep = adjacency_spectrum(g)
        k = rep.degree
        lam2 = rep.eigenvalues[1]
        lower = (k - lam2) / 2
        upper = math.sqrt(2 * k * (k - lam2))
        assert lower - 1e-9 <= exact <= upper + 1e-9


def test_cheeger_sandwich_beyond_exact_cap():
    g = circular_ladder(20)  # 40 vertices, above the exact cap
    b = cheeger_estimate(g)
    assert b.exact is None
    assert 0 < b.lower <= b.upper
    assert b.method == "spectral-sandwich+sweep"
    # the circular ladder has an explicit cut of ratio 4/n through two rungs
    assert b.upper <= 4 / 20 + 0.2 + 1e-9 or b.upper <= math.sqrt(2 * 3 * (3 - 1))
