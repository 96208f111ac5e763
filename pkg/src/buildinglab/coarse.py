"""Quasi-isometric-embedding checks made executable.

An (L, C) quasi-isometric embedding phi must satisfy

    d(a, b)/L - C  <=  d(phi a, phi b)  <=  L d(a, b) + C

for every pair; ``qi_check`` verifies this exhaustively on finite metric
spaces (upgrading to a quasi-isometry verdict when coarse surjectivity
is requested), ``family_qi_check`` demands one uniform (L, C) across an
indexed family.  ``distortion_lower_bound`` rules out constant pairs by
a packing/counting inequality (sound lower bounds only), while
``embedding_search`` hunts for witnesses by seeded local search (its
failures prove nothing; its successes are revalidated).
``skeleton_lemma_verify`` checks the graph-metric vs flat-metric
comparison on building balls: d_g/3 - c <= d_flat <= d_g (unit-edge
convention, c the chamber diameter).
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.csgraph import shortest_path

from .building import PairwiseCat0, ball, chamber_diameter, edge_length, standard_lattice
from .simplicial import ColoredGraph, SimplicialSet

_TOL = 1e-9


class FiniteMetricSpace:
    """Point ids 0..n-1 with a dense symmetric distance matrix."""

    def __init__(self, dist_matrix, labels=None):
        self.dist = np.asarray(dist_matrix, dtype=np.float64)
        if self.dist.ndim != 2 or self.dist.shape[0] != self.dist.shape[1]:
            raise ValueError("square distance matrix required")
        self.labels = list(labels) if labels is not None else list(range(len(self.dist)))

    @classmethod
    def from_graph(cls, G):
        if isinstance(G, SimplicialSet):
            cg = ColoredGraph.from_undirected_pairs(G.n_vertices,
                                                    G.simplices_of_dim(1))
        else:
            cg = G
        adj = cg.undirected_adjacency()
        dm = shortest_path(adj, method="D", unweighted=True)
        return cls(dm)

    @classmethod
    def from_pairs(cls, n, pairs):
        return cls.from_graph(ColoredGraph.from_undirected_pairs(n, pairs))

    @classmethod
    def from_ball(cls, bl, metric="graph", normalized=True):
        """Metric space of a building ball: graph metric or flat (cat0) metric."""
        if metric == "graph":
            return cls.from_graph(bl)
        if metric == "cat0":
            pw = PairwiseCat0(bl.payloads, normalized=normalized)
            n = bl.n_vertices
            dm = np.zeros((n, n))
            for i in range(n):
                row = pw.row(i, start=i + 1)
                dm[i, i + 1:] = row
                dm[i + 1:, i] = row
            return cls(dm)
        raise ValueError(f"unknown metric {metric!r}")

    @property
    def n(self):
        return len(self.dist)

    def distance(self, i, j):
        return float(self.dist[i, j])

    def diameter(self):
        finite = self.dist[np.isfinite(self.dist)]
        return float(finite.max()) if len(finite) else 0.0

    def validate(self, samples=200, seed=0):
        """Spot-check symmetry, zero diagonal and the triangle inequality."""
        if np.abs(np.diag(self.dist)).max() > _TOL:
            raise ValueError("nonzero diagonal")
        if np.abs(self.dist - self.dist.T).max() > _TOL:
            raise ValueError("asymmetric distance matrix")
        rng = random.Random(seed)
        n = self.n
        for _ in range(samples):
            a, b, c = (rng.randrange(n) for _ in range(3))
            if self.dist[a, c] > self.dist[a, b] + self.dist[b, c] + _TOL:
                raise ValueError(f"triangle inequality fails on ({a},{b},{c})")
        return True

    def ball_sizes(self, center, radii):
        row = self.dist[center]
        return [int((row <= r + _TOL).sum()) for r in radii]


@dataclass
class QIWitness:
    """A vertex map with constants and the verdict of the pair check."""

    map: tuple
    L: float
    C: float
    valid: bool
    worst_pair: tuple | None = None
    worst_violation: float = 0.0
    coarsely_surjective: bool | None = None
    quasi_isometry: bool | None = None

    def __bool__(self):
        return self.valid

    def to_json_dict(self):
        return {
            "map": list(self.map),
            "L": self.L,
            "C": self.C,
            "valid": self.valid,
            "worst_pair": list(self.worst_pair) if self.worst_pair else None,
            "worst_violation": self.worst_violation,
            "coarsely_surjective": self.coarsely_surjective,
            "quasi_isometry": self.quasi_isometry,
        }


def qi_check(X, Y, phi, L, C, check_coarse_surjectivity=False):
    """Exhaustive pair check of the two-sided inequality.

    phi maps every point of X to a point of Y (a partial map is an error).
    With check_coarse_surjectivity=True the witness also records whether
    every point of Y is within C of the image, upgrading a valid embedding
    to a quasi-isometry verdict.
    """
    if L < 1 or C < 0:
        raise ValueError("need L >= 1 and C >= 0")
    n = X.n
    phi = tuple(int(v) for v in phi)
    if len(phi) != n:
        raise ValueError(f"partial map: {len(phi)} images for {n} points")
    if any(not 0 <= v < Y.n for v in phi):
        raise ValueError("map image out of range")
    DX = X.dist
    DP = Y.dist[np.ix_(phi, phi)]
    lower_viol = DX / L - C - DP
    upper_viol = DP - (L * DX + C)
    viol = np.maximum(lower_viol, upper_viol)
    np.fill_diagonal(viol, -math.inf)
    worst = float(viol.max())
    valid = worst <= _TOL
    worst_pair = None
    if not valid:
        i, j = np.unravel_index(int(viol.argmax()), viol.shape)
        worst_pair = (int(i), int(j))
    cs = None
    qi = None
    if check_coarse_surjectivity:
        dmin = Y.dist[:, list(set(phi))].min(axis=1)
        cs = bool((dmin <= C + _TOL).all())
        qi = valid and cs
    return QIWitness(phi, float(L), float(C), bool(valid), worst_pair,
                     max(worst, 0.0), cs, qi)


@dataclass
class FamilyVerdict:
    valid: bool
    L: float
    C: float
    first_failure: int | None
    witnesses: list

    def __bool__(self):
        return self.valid


def family_qi_check(Xs, Ys, phis, L, C):
    """One uniform (L, C) across an index-aligned family of maps."""
    if not (len(Xs) == len(Ys) == len(phis)):
        raise ValueError("family length mismatch")
    witnesses = []
    first_bad = None
    for i, (X, Y, phi) in enumerate(zip(Xs, Ys, phis)):
        w = qi_check(X, Y, phi, L, C)
        witnesses.append(w)
        if not w.valid and first_bad is None:
            first_bad = i
    return FamilyVerdict(first_bad is None, float(L), float(C), first_bad, witnesses)


@dataclass(frozen=True)
class GrowthProfile:
    base: int
    sizes: tuple

    def to_json_dict(self):
        return {"base": self.base, "sizes": list(self.sizes)}

    def to_csv(self):
        lines = ["radius,ball_size"]
        lines += [f"{r},{s}" for r, s in enumerate(self.sizes)]
        return "\n".join(lines) + "\n"


def growth_profile(X, base, R):
    """Ball sizes |B(base, r)| for r = 0..R in the graph metric."""
    if isinstance(X, FiniteMetricSpace):
        return GrowthProfile(base, tuple(X.ball_sizes(base, range(R + 1))))
    if isinstance(X, SimplicialSet):
        adj = X.adjacency()
    else:
        cg = X
        adj = {i: [] for i in range(cg.n)}
        for u, v in cg.undirected_pairs():
            adj[u].append(v)
            adj[v].append(u)
    sizes = [1]
    seen = {base}
    frontier = [base]
    for _ in range(R):
        frontier = [y for x in frontier for y in adj[x] if y not in seen and not seen.add(y)]
        sizes.append(len(seen))
    return GrowthProfile(base, tuple(sizes))


# ---------------------------------------------------------------------------
# packing-based distortion lower bounds


def _greedy_packing(dist_row_ball, D, s):
    """Size of a greedy s-separated subset of the given point list (ids)."""
    chosen = []
    for x in dist_row_ball:
        if all(D[x, c] >= s - _TOL for c in chosen):
            chosen.append(x)
    return len(chosen)


@dataclass
class DistortionBound:
    value: float
    C_max: int
    radius_budget: int
    grid: tuple
    excluded: dict = field(default_factory=dict)

    def to_json_dict(self):
        # value may be inf when every grid L is excluded
        return {"L_min": self.value if math.isfinite(self.value) else None,
                "grid_exhausted": not math.isfinite(self.value),
                "C_max": self.C_max,
                "radius_budget": self.radius_budget,
                "grid": list(self.grid)}


def distortion_lower_bound(X, Y, C_max=0, radius_budget=None, grid=None,
                           max_centers=32):
    """Least grid L not excluded for any C <= C_max by the packing inequality.

    An (L, C) embedding sends an s-separated subset of an r-ball of X to an
    (s/L - C)-separated subset of an (L r + C)-ball of Y; when a greedy
    packing of X beats the counting capacity of Y (largest target ball over
    smallest disjoint ball), the pair (L, C) is impossible.  Distances are
    assumed integral (graph metrics).  Returns 1.0 when nothing is excluded;
    the bound is monotone nondecreasing in ``radius_budget``.
    """
    if grid is None:
        grid = tuple(1 + 0.25 * i for i in range(29))  # 1, 1.25, ..., 8
    DX, DY = X.dist, Y.dist
    diam_x = int(X.diameter())
    diam_y = int(Y.diameter())
    if radius_budget is None:
        radius_budget = min(diam_x, 8) if diam_x else 1
    radius_budget = max(int(radius_budget), 1)
    centers = range(X.n) if X.n <= max_centers * 4 else \
        range(0, X.n, max(1, X.n // max_centers))
    # packing sizes of X: pack[(r, s)] = best greedy packing over centers
    pack = {}
    for r in range(1, radius_budget + 1):
        for s in range(1, 2 * r + 2):
            best = 0
            for x in centers:
                in_ball = np.nonzero(DX[x] <= r + _TOL)[0].tolist()
                got = _greedy_packing(in_ball, DX, s)
                if got > best:
                    best = got
            pack[(r, s)] = best
    # ball-size tables of Y
    max_ball = {rr: int(max((DY[y] <= rr + _TOL).sum() for y in range(Y.n)))
                for rr in range(0, int(math.ceil(8 * radius_budget + C_max)) + diam_y + 2)}
    min_ball = {h: int(min((DY[y] <= h + _TOL).sum() for y in range(Y.n)))
                for h in range(0, diam_y + 2)}

    def capped(table, k):
        k = max(0, int(k))
        top = max(table)
        return table[min(k, top)]

    excluded = {}
    for L in grid:
        for C in range(C_max + 1):
            reason = None
            for (r, s), px in pack.items():
                if px <= 1:
                    continue
                t = s / L - C
                if t <= _TOL:
                    continue
                R = int(math.floor(L * r + C + _TOL))
                h = (int(math.ceil(t - _TOL)) - 1) // 2
                capacity = capped(max_ball, R + h) / max(1, capped(min_ball, h))
                if px > capacity + _TOL:
                    reason = (r, s, px, capacity)
                    break
            if reason is not None:
                excluded[(L, C)] = reason
    value = None
    for L in grid:
        if any((L, C) not in excluded for C in range(C_max + 1)):
            value = L
            break
    if value is None:
        value = math.inf
    return DistortionBound(float(value), C_max, radius_budget, grid, excluded)


# ---------------------------------------------------------------------------
# randomized embedding search


@dataclass
class EmbeddingSearchResult:
    success: bool
    witness: QIWitness | None
    moves: int
    seed: int

    def __bool__(self):
        return self.success


def _pair_cost(dx, dy, L, C):
    lower = dx / L - C - dy
    upper = dy - (L * dx + C)
    v = max(lower, upper)
    return v if v > _TOL else 0.0


def embedding_search(X, Y, L, C, budget=100_000, seed=0):
    """Greedy placement in BFS-like order plus hill climbing on point moves.

    Deterministic for a fixed seed.  Success means a map passing qi_check
    (always revalidated); failure is non-conclusive.
    """
    rng = random.Random(seed)
    n, m = X.n, Y.n
    DX, DY = X.dist, Y.dist
    order = sorted(range(n), key=lambda i: (DX[i][np.isfinite(DX[i])].sum(), i))
    phi = [0] * n
    placed = []
    for x in order:
        best_y, best_cost = 0, math.inf
        for y in range(m):
            cost = 0.0
            for x2 in placed:
                cost += _pair_cost(DX[x, x2], DY[y, phi[x2]], L, C)
                if cost >= best_cost:
                    break
            if cost < best_cost:
                best_y, best_cost = y, cost
        phi[x] = best_y
        placed.append(x)

    def total_cost(mapping):
        DP = DY[np.ix_(mapping, mapping)]
        lower = DX / L - C - DP
        upper = DP - (L * DX + C)
        v = np.maximum(lower, upper)
        np.fill_diagonal(v, 0.0)
        v[v <= _TOL] = 0.0
        return float(v.sum())

    cost = total_cost(phi)
    moves = 0
    while cost > 0 and moves < budget:
        moves += 1
        x = rng.randrange(n)
        y_new = rng.randrange(m)
        old = phi[x]
        if y_new == old:
            continue
        phi[x] = y_new
        new_cost = total_cost(phi)
        if new_cost < cost:
            cost = new_cost
        else:
            phi[x] = old
    if cost > 0:
        return EmbeddingSearchResult(False, None, moves, seed)
    witness = qi_check(X, Y, phi, L, C)
    return EmbeddingSearchResult(witness.valid, witness, moves, seed)


# ---------------------------------------------------------------------------
# graph-vs-flat metric comparison on building balls


@dataclass
class SkeletonLemmaReport:
    d: int
    p: int
    r: int
    convention: str
    chamber_diameter: float
    edge_len: float
    n_vertices: int
    n_pairs: int
    violations: int
    first_violation: tuple | None
    max_ratio_lower: float   # max d_g / (d_flat + c), expected <= 3
    max_ratio_upper: float   # max d_flat / d_g, expected <= 1 (unit-edge)
    passed: bool

    def to_json_dict(self):
        return {
            "d": self.d, "p": self.p, "r": self.r,
            "convention": self.convention,
            "chamber_diameter": self.chamber_diameter,
            "edge_length": self.edge_len,
            "n_vertices": self.n_vertices,
            "n_pairs": self.n_pairs,
            "violations": self.violations,
            "first_violation": list(self.first_violation) if self.first_violation else None,
            "max_ratio_lower": self.max_ratio_lower,
            "max_ratio_upper": self.max_ratio_upper,
            "passed": self.passed,
        }


def skeleton_lemma_verify(d, p, r, convention="unit-edge", jobs=1, chunk=256):
    """Exhaustively check d_g/3 - c <= d_flat <= d_g * edge_length on the
    radius-r ball, where c is the computed chamber diameter.

    Under the unit-edge convention distances are rescaled so 1-simplices
    have length 1 (then c = 1 and the upper bound is d_flat <= d_g); the
    embedding convention keeps the raw exponent-vector metric.
    """
    if convention not in ("unit-edge", "embedding"):
        raise ValueError(f"unknown metric convention {convention!r}")
    normalized = convention == "unit-edge"
    bl = ball(standard_lattice(d, p), r)
    n = bl.n_vertices
    c = chamber_diameter(d, p, normalized=normalized)
    elen = 1.0 if normalized else edge_length(d)
    adjacency = ColoredGraph.from_undirected_pairs(n, bl.simplices_of_dim(1)) \
        .undirected_adjacency()
    pw = PairwiseCat0(bl.payloads, normalized=normalized)

    chunks = [list(range(i, min(i + chunk, n))) for i in range(0, n, chunk)]

    def dg_rows(idx):
        return shortest_path(adjacency, method="D", unweighted=True, indices=idx)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            dg_blocks = list(ex.map(dg_rows, chunks))
    else:
        dg_blocks = [dg_rows(ck) for ck in chunks]

    violations = 0
    first_violation = None
    max_lower = 0.0
    max_upper = 0.0
    n_pairs = 0
    for ck, block in zip(chunks, dg_blocks):
        for local, i in enumerate(ck):
            if i + 1 >= n:
                continue
            dg = block[local, i + 1:]
            dc = pw.row(i, start=i + 1)
            n_pairs += len(dg)
            lower_bad = dg / 3.0 - c > dc + _TOL
            upper_bad = dc > dg * elen + _TOL
            bad = lower_bad | upper_bad
            if bad.any():
                violations += int(bad.sum())
                if first_violation is None:
                    j = int(np.nonzero(bad)[0][0])
                    first_violation = (i, i + 1 + j, float(dg[j]), float(dc[j]))
            ratios_l = dg / (dc + c)
            max_lower = max(max_lower, float(ratios_l.max(initial=0.0)))
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios_u = np.where(dg > 0, dc / (dg * elen), 0.0)
            max_upper = max(max_upper, float(ratios_u.max(initial=0.0)))
    return SkeletonLemmaReport(
        d, p, r, convention, float(c), float(elen), n, n_pairs,
        violations, first_violation, max_lower, max_upper, violations == 0)
