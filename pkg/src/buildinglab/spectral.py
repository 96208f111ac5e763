"""Spectral diagnostics for finite graphs and complexes.

Adjacency spectra with trivial/nontrivial classification, the optimal
degree-k bound |lambda| <= 2 sqrt(k-1) for k-regular graphs, colored
(per-shift) operator spectra for quotient complexes, and Cheeger
estimates (exact by subset enumeration at small size, spectral sandwich
plus sweep cut beyond).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .simplicial import ColoredGraph

DENSE_VERTEX_CAP = 5000
EXACT_CHEEGER_CAP = 24
DENSE_TOL = 1e-9
ITERATIVE_TOL = 1e-6
TRIVIAL_TOL = 1e-6


class IrregularGraphError(ValueError):
    """Graph is not regular; carries one offending vertex."""

    def __init__(self, vertex, degree, expected):
        super().__init__(f"vertex {vertex} has degree {degree}, expected {expected}")
        self.vertex = vertex


def _as_colored_graph(G):
    if isinstance(G, ColoredGraph):
        return G
    if hasattr(G, "colored_graph"):
        return G.colored_graph()
    if hasattr(G, "edges") and hasattr(G, "n_vertices"):
        return ColoredGraph.from_undirected_pairs(G.n_vertices, G.edges())
    if isinstance(G, (list, tuple)) and len(G) == 2:
        n, pairs = G
        return ColoredGraph.from_undirected_pairs(n, pairs)
    raise TypeError(f"cannot interpret {type(G).__name__} as a graph")


@dataclass
class SpectralReport:
    """Eigenvalues sorted descending, with the trivial/nontrivial split."""

    eigenvalues: list
    degree: float
    trivial: list
    max_nontrivial_modulus: float
    ramanujan: bool | None
    method: str
    tolerance: float
    residual: float = 0.0
    moduli: list = field(default_factory=list)

    def to_json_dict(self):
        return {
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "degree": float(self.degree),
            "trivial": [float(v) for v in self.trivial],
            "max_nontrivial_modulus": float(self.max_nontrivial_modulus),
            "ramanujan": self.ramanujan,
            "method": self.method,
            "tolerance": self.tolerance,
            "residual": float(self.residual),
        }

    def multiplicities(self, tol=1e-8):
        """Cluster eigenvalues into (value, multiplicity) pairs."""
        out = []
        for v in self.eigenvalues:
            if out and abs(v - out[-1][0]) <= tol * max(1.0, abs(self.degree)):
                out[-1][1] += 1
            else:
                out.append([v, 1])
        return [(v, m) for v, m in out]

    def to_csv(self, tol=1e-8):
        lines = ["eigenvalue,multiplicity,trivial"]
        k = self.degree
        for v, m in self.multiplicities(tol):
            triv = int(abs(abs(v) - k) <= TRIVIAL_TOL * max(1.0, k))
            lines.append(f"{v!r},{m},{triv}")
        return "\n".join(lines) + "\n"


def adjacency_spectrum(G, mode="dense"):
    """Spectrum of the simple undirected adjacency matrix.

    Dense mode: full symmetric eigensolve, residuals checked against
    1e-9 * max degree.  Iterative mode: 10 extreme eigenvalues from each
    end by implicitly restarted Lanczos, residuals against 1e-6 * k.
    """
    cg = _as_colored_graph(G)
    A = cg.undirected_adjacency().astype(np.float64)
    if (A != A.T).nnz:
        raise ValueError("adjacency is not symmetric; undirected input required")
    n = A.shape[0]
    degs = np.asarray(A.sum(axis=1)).ravel()
    k = degs.max() if n else 0.0
    if mode == "dense":
        if n > DENSE_VERTEX_CAP:
            raise ValueError(f"dense mode capped at {DENSE_VERTEX_CAP} vertices, got {n}")
        dense = A.toarray()
        vals, vecs = np.linalg.eigh(dense)
        residual = float(np.abs(dense @ vecs - vecs * vals).max()) if n else 0.0
        tol = DENSE_TOL * max(1.0, k)
        if residual > tol:
            raise ArithmeticError(f"eigensolver residual {residual} above {tol}")
        eigs = sorted(vals.tolist(), reverse=True)
        method, used_tol = "dense-exact", DENSE_TOL
    elif mode == "iterative":
        kreq = min(10, n - 2) if n > 2 else max(n - 1, 1)
        v0 = np.ones(n) / math.sqrt(n)
        top, tvecs = scipy.sparse.linalg.eigsh(A, k=kreq, which="LA", v0=v0)
        bot, bvecs = scipy.sparse.linalg.eigsh(A, k=kreq, which="SA", v0=v0)
        residual = 0.0
        for vals, vecs in ((top, tvecs), (bot, bvecs)):
            residual = max(residual, float(np.abs(A @ vecs - vecs * vals).max()))
        tol = ITERATIVE_TOL * max(1.0, k)
        if residual > tol:
            raise ArithmeticError(f"iterative residual {residual} above {tol}")
        eigs = sorted(np.concatenate([top, bot]).tolist(), reverse=True)
        method, used_tol = "iterative", ITERATIVE_TOL
    else:
        raise ValueError(f"unknown mode {mode!r}")
    trivial = [v for v in eigs if abs(abs(v) - k) <= TRIVIAL_TOL * max(1.0, k)]
    nontrivial = [v for v in eigs if abs(abs(v) - k) > TRIVIAL_TOL * max(1.0, k)]
    max_nt = max((abs(v) for v in nontrivial), default=0.0)
    return SpectralReport(eigs, float(k), trivial, max_nt, None, method, used_tol,
                          residual=residual)


def ramanujan_check(G, k=None, tolerance=TRIVIAL_TOL):
    """Whether all nontrivial adjacency eigenvalues satisfy |v| <= 2 sqrt(k-1).

    Eigenvalues with |v| = k (within tolerance) count as trivial.  The graph
    must be k-regular; the report carries the margin to the bound.
    """
    cg = _as_colored_graph(G)
    A = cg.undirected_adjacency()
    degs = np.asarray(A.sum(axis=1)).ravel()
    if k is None:
        k = int(degs[0]) if len(degs) else 0
    bad = np.nonzero(degs != k)[0]
    if len(bad):
        raise IrregularGraphError(int(bad[0]), int(degs[bad[0]]), k)
    rep = adjacency_spectrum(cg, mode="dense" if A.shape[0] <= DENSE_VERTEX_CAP
                             else "iterative")
    bound = 2.0 * math.sqrt(max(k - 1, 0))
    nontrivial = [v for v in rep.eigenvalues if abs(abs(v) - k) > tolerance * max(1.0, k)]
    max_nt = max((abs(v) for v in nontrivial), default=0.0)
    verdict = max_nt <= bound + tolerance
    rep.ramanujan = bool(verdict)
    rep.max_nontrivial_modulus = max_nt
    rep.trivial = [v for v in rep.eigenvalues if abs(abs(v) - k) <= tolerance * max(1.0, k)]
    return RamanujanVerdict(bool(verdict), float(k), bound, max_nt,
                            bound + tolerance - max_nt, rep)


@dataclass
class RamanujanVerdict:
    passed: bool
    degree: float
    bound: float
    max_nontrivial_modulus: float
    margin: float
    report: SpectralReport

    def __bool__(self):
        return self.passed

    def to_json_dict(self):
        return {
            "ramanujan": self.passed,
            "degree": self.degree,
            "bound": self.bound,
            "max_nontrivial_modulus": self.max_nontrivial_modulus,
            "margin": self.margin,
        }


def colored_spectra(X):
    """Per-shift spectra of the directed shift-k adjacency operators.

    The operators are generally nonsymmetric; spectra are reported as
    complex moduli (descending).  Shift k and shift d-k operators are
    mutual transposes, which is verified.
    """
    cg = _as_colored_graph(X)
    d = getattr(X, "d", None)
    if d is None:
        shifts = [s for s in cg.shift_values() if s != 0] or [0]
    else:
        shifts = list(range(1, d))
    n = cg.n
    if n > DENSE_VERTEX_CAP:
        raise ValueError(f"colored spectra use dense solves, capped at {DENSE_VERTEX_CAP}")
    out = {}
    mats = {s: cg.directed_adjacency(shift=s).toarray() for s in shifts}
    for s in shifts:
        comp = (-s) % d if d else s
        if comp in mats and not np.array_equal(mats[s], mats[comp].T):
            raise AssertionError(f"shift {s} and shift {comp} operators are not transposes")
        vals = np.linalg.eigvals(mats[s])
        moduli = sorted(np.abs(vals).tolist(), reverse=True)
        order = np.argsort(-np.abs(vals))
        eigs = vals[order]
        row_sums = mats[s].sum(axis=1)
        k = float(row_sums.max()) if n else 0.0
        trivial = [float(np.abs(v)) for v in eigs
                   if abs(np.abs(v) - k) <= TRIVIAL_TOL * max(1.0, k)]
        nontr = [float(np.abs(v)) for v in eigs
                 if abs(np.abs(v) - k) > TRIVIAL_TOL * max(1.0, k)]
        rep = SpectralReport(
            eigenvalues=[float(np.real(v)) for v in eigs],
            degree=k,
            trivial=trivial,
            max_nontrivial_modulus=max(nontr, default=0.0),
            ramanujan=None,
            method="dense-nonsymmetric",
            tolerance=DENSE_TOL,
            moduli=moduli,
        )
        out[s] = rep
    return out


# ---------------------------------------------------------------------------
# Cheeger


@dataclass
class CheegerBounds:
    lower: float
    upper: float
    exact: float | None
    method: str
    sweep_cut_size: int | None = None

    def to_json_dict(self):
        return {"lower": self.lower, "upper": self.upper, "exact": self.exact,
                "method": self.method}


def _components(adj, n):
    seen = [False] * n
    comps = 0
    for s in range(n):
        if seen[s]:
            continue
        comps += 1
        stack = [s]
        seen[s] = True
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if not seen[y]:
                    seen[y] = True
                    stack.append(y)
    return comps


def _exact_cheeger(pairs, n):
    """Gray-code walk over subsets; h = min boundary(S)/|S| over |S| <= n/2."""
    edges_by_vertex = [[] for _ in range(n)]
    for idx, (u, v) in enumerate(pairs):
        edges_by_vertex[u].append(idx)
        edges_by_vertex[v].append(idx)
    in_set = [False] * n
    cut_state = [False] * len(pairs)
    cut = 0
    size = 0
    best = math.inf
    total = 1 << n
    g_prev = 0
    for i in range(1, total):
        g = i ^ (i >> 1)
        flip = (g ^ g_prev).bit_length() - 1
        g_prev = g
        entering = not in_set[flip]
        in_set[flip] = entering
        size += 1 if entering else -1
        for ei in edges_by_vertex[flip]:
            u, v = pairs[ei]
            other = v if u == flip else u
            crossing = in_set[flip] != in_set[other]
            if crossing != cut_state[ei]:
                cut += 1 if crossing else -1
                cut_state[ei] = crossing
        if 0 < size <= n // 2:
            ratio = cut / size
            if ratio < best:
                best = ratio
    return best


def _sweep_cut(A, n):
    """Fiedler-vector prefix cuts; an upper bound on the Cheeger constant."""
    A = A.tocsr()
    degs = np.asarray(A.sum(axis=1)).ravel()
    L = scipy.sparse.diags(degs) - A
    v0 = np.arange(1, n + 1, dtype=np.float64)
    v0 /= np.linalg.norm(v0)
    vals, vecs = scipy.sparse.linalg.eigsh(L, k=2, which="SA", v0=v0)
    fiedler = vecs[:, np.argsort(vals)[1]]
    order = np.argsort(fiedler, kind="stable")
    in_set = np.zeros(n, dtype=bool)
    best = math.inf
    best_size = None
    cut = 0.0
    for idx, v in enumerate(order[:-1]):
        row = A.indices[A.indptr[v]:A.indptr[v + 1]]
        cut += degs[v] - 2.0 * in_set[row].sum()
        in_set[v] = True
        size = idx + 1
        if size <= n // 2:
            ratio = cut / size
            if ratio < best:
                best = ratio
                best_size = size
    return best, best_size


def cheeger_estimate(G, exact_cap=EXACT_CHEEGER_CAP):
    """Cheeger constant h = min over cuts of boundary edges / smaller side.

    Exact subset enumeration up to ``exact_cap`` vertices; beyond that, for
    k-regular graphs, the spectral sandwich (k - l2)/2 <= h <= sqrt(2k(k - l2))
    tightened by a Fiedler sweep cut.  Disconnected input returns 0 with a
    warning.
    """
    cg = _as_colored_graph(G)
    pairs = cg.undirected_pairs()
    n = cg.n
    adj = [[] for _ in range(n)]
    for u, v in pairs:
        adj[u].append(v)
        adj[v].append(u)
    if n == 0:
        return CheegerBounds(0.0, 0.0, 0.0, "empty")
    if _components(adj, n) > 1:
        warnings.warn("graph is disconnected; Cheeger constant is 0")
        return CheegerBounds(0.0, 0.0, 0.0, "disconnected")
    if n <= exact_cap:
        h = _exact_cheeger(pairs, n)
        return CheegerBounds(h, h, h, "exact-enumeration")
    A = cg.undirected_adjacency().astype(np.float64)
    degs = np.asarray(A.sum(axis=1)).ravel()
    k = degs.max()
    if not np.all(degs == k):
        raise IrregularGraphError(int(np.argmax(degs != k)), int(degs[np.argmax(degs != k)]),
                                  int(k))
    rep = adjacency_spectrum(cg, mode="dense" if n <= DENSE_VERTEX_CAP else "iterative")
    lam2 = rep.eigenvalues[1]
    lower = (k - lam2) / 2.0
    upper = math.sqrt(2.0 * k * (k - lam2))
    sweep, size = _sweep_cut(A, n)
    return CheegerBounds(float(lower), float(min(upper, sweep)), None,
                         "spectral-sandwich+sweep", size)
