"""Lattice-class model of the affine building of PGL_d over F_p((y)).

A vertex is a homothety class of rank-d lattices over the valuation
ring F_p[[y]].  The canonical representative is an upper-triangular
matrix over F_p[y] whose columns span the lattice: diagonal entries
are monomials y^{a_i}, the entry (i, j) for j > i is reduced modulo
y^{a_i}, and the class representative is scaled so the minimum
y-valuation over all entries is zero (the smallest integral
representative).  Canonical matrices are unique per class, which makes
breadth-first dedup and deterministic vertex ids possible.

Two vertices are adjacent when, after rescaling, one lattice sits
strictly between the other and y times it.  Neighbor enumeration walks
the proper nonzero subspaces of the d-dimensional quotient L/yL.

Metrics: ``graph_distance`` is the shortest-path metric of a built
complex; ``cat0_distance`` is the Euclidean norm of the mean-centered
relative exponent vector (the flat metric of an apartment through the
two vertices).  The induced 1-simplex length is sqrt((d-1)/d); the
``normalized`` flag rescales so edges have length 1.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .fields import (
    LaurentElement,
    Poly,
    padd,
    pcut,
    pdivmod,
    pmul,
    pneg,
    pscale,
    pshift,
    psub,
    pval,
    ypow,
)
from .simplicial import ColoredGraph, SimplicialSet

DEFAULT_VERTEX_CAP = 2_000_000

_INF = 10 ** 9  # valuation sentinel for the zero polynomial


class SingularMatrixError(ValueError):
    """Input matrix does not span a full-rank lattice."""


class CapacityError(RuntimeError):
    """A construction would exceed its configured size cap."""


# ---------------------------------------------------------------------------
# polynomial matrices (tuples of tuples of coefficient tuples)


def poly_mat_mul(A, B, p):
    n, k, m = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = ()
            for t in range(k):
                acc = padd(acc, pmul(A[i][t], B[t][j], p), p)
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def poly_det(M, p):
    d = len(M)
    cols = tuple(range(d))
    memo = {}

    def minor(row, cs):
        if row == d:
            return (1,)
        key = (row, cs)
        got = memo.get(key)
        if got is not None:
            return got
        acc = ()
        for idx, j in enumerate(cs):
            e = M[row][j]
            if e:
                sub = minor(row + 1, cs[:idx] + cs[idx + 1:])
                t = pmul(e, sub, p)
                acc = padd(acc, t, p) if idx % 2 == 0 else psub(acc, t, p)
        memo[key] = acc
        return acc

    return minor(0, cols)


def poly_adjugate(M, p):
    d = len(M)
    if d == 1:
        return (((1,),),)
    rows = range(d)
    out = [[()] * d for _ in rows]
    for i in rows:
        for j in rows:
            sub = tuple(tuple(M[r][c] for c in rows if c != j) for r in rows if r != i)
            cof = poly_det(sub, p)
            if (i + j) % 2:
                cof = pneg(cof, p)
            out[j][i] = cof
    return tuple(tuple(r) for r in out)


def _min_entry_val(M):
    vals = [pval(e) for row in M for e in row if e]
    if not vals:
        raise SingularMatrixError("zero matrix")
    return min(vals)


def _hnf_columns(cols, d, p):
    """Column Hermite form over F_p[y] of a rank-d column family.

    Returns the d x d upper-triangular matrix with monic diagonal and
    off-diagonal entries reduced modulo the diagonal of their row.  The
    diagonals must come out as y-powers (guaranteed when the span
    contains y^s F_p[y]^d), asserted below.
    """
    cols = [list(c) for c in cols]
    active = list(range(len(cols)))
    picked = [None] * d
    for row in range(d - 1, -1, -1):
        while True:
            nz = [j for j in active if cols[j][row]]
            if not nz:
                raise SingularMatrixError("column span has rank < d")
            if len(nz) == 1:
                break
            piv = min(nz, key=lambda j: (len(cols[j][row]), j))
            pv = cols[piv][row]
            for j in nz:
                if j == piv:
                    continue
                q, _ = pdivmod(cols[j][row], pv, p)
                cj, cp = cols[j], cols[piv]
                for k in range(row + 1):
                    cj[k] = psub(cj[k], pmul(q, cp[k], p), p)
        j = nz[0]
        picked[row] = cols[j]
        active.remove(j)
    H = [[picked[j][i] for j in range(d)] for i in range(d)]
    for j in range(d):
        dj = H[j][j]
        if pval(dj) != len(dj) - 1:
            raise AssertionError(f"diagonal {dj} is not a y-power; span not y-saturated")
        c = dj[-1]
        if c != 1:
            cinv = pow(c, p - 2, p)
            for i in range(j + 1):
                H[i][j] = pscale(H[i][j], cinv, p)
    for j in range(1, d):
        for i in range(j - 1, -1, -1):
            q, r = pdivmod(H[i][j], H[i][i], p)
            if q:
                for k in range(i + 1):
                    H[k][j] = psub(H[k][j], pmul(q, H[k][i], p), p)
    return tuple(tuple(row) for row in H)


def _canonical_poly(M, d, p):
    det = poly_det(M, p)
    if not det:
        raise SingularMatrixError("matrix is singular")
    s = pval(det)
    cols = [[M[i][j] for i in range(d)] for j in range(d)]
    ys = ypow(s)
    for i in range(d):
        cols.append([ys if k == i else () for k in range(d)])
    H = _hnf_columns(cols, d, p)
    t = _min_entry_val(H)
    if t:
        H = tuple(tuple(pcut(e, t) if e else () for e in row) for row in H)
    return H


class LatticeClass:
    """Canonical homothety-class representative; construct via canonical_form."""

    __slots__ = ("d", "p", "mat", "diag_exps")

    def __init__(self, d, p, mat):
        self.d = d
        self.p = p
        self.mat = mat
        self.diag_exps = tuple(len(mat[i][i]) - 1 for i in range(d))

    @property
    def det_valuation(self):
        return sum(self.diag_exps)

    @property
    def key(self):
        return self.mat

    def color(self):
        return self.det_valuation % self.d

    def matrix(self):
        """Entries as Poly objects."""
        return tuple(tuple(Poly(e, self.p) for e in row) for row in self.mat)

    def to_json_dict(self):
        return {"d": self.d, "p": self.p,
                "matrix": [[list(e) for e in row] for row in self.mat]}

    def __eq__(self, other):
        return (isinstance(other, LatticeClass) and other.p == self.p
                and other.d == self.d and other.mat == self.mat)

    def __lt__(self, other):
        return self.mat < other.mat

    def __hash__(self):
        return hash((self.d, self.p, self.mat))

    def __repr__(self):
        entries = "; ".join(",".join(str(Poly(e, self.p)) for e in row) for row in self.mat)
        return f"LatticeClass(d={self.d}, p={self.p}, [{entries}])"


def _to_poly_matrix(M, p):
    """Clear y / (y+1) denominators; scaling by them does not move the class."""
    d = len(M)
    lau = []
    for row in M:
        lrow = []
        for e in row:
            if isinstance(e, LaurentElement):
                if e.p != p:
                    raise ValueError("mixed characteristics")
                lrow.append(e)
            elif isinstance(e, Poly):
                lrow.append(LaurentElement.from_poly(e))
            elif isinstance(e, int):
                lrow.append(LaurentElement.from_int(e, p))
            elif isinstance(e, tuple):
                lrow.append(LaurentElement(e, 0, 0, p))
            else:
                raise TypeError(f"unsupported matrix entry {e!r}")
        lau.append(lrow)
    a = max((e.yexp for row in lau for e in row), default=0)
    b = max((e.y1exp for row in lau for e in row), default=0)
    out = []
    for row in lau:
        orow = []
        for e in row:
            n = pshift(e.num, a - e.yexp)
            for _ in range(b - e.y1exp):
                n = pmul(n, (1, 1), p)
            orow.append(n)
        out.append(tuple(orow))
    return tuple(out)


def canonical_form(M, p=None, d=None):
    """Canonical representative of the class of the column span of M.

    M may contain LaurentElement, Poly, coefficient tuples or ints.
    Raises SingularMatrixError when det(M) = 0.
    """
    d = len(M) if d is None else d
    if any(len(row) != d for row in M):
        raise ValueError("square matrix required")
    if p is None:
        for row in M:
            for e in row:
                if isinstance(e, (LaurentElement, Poly)):
                    p = e.p
                    break
            if p is not None:
                break
        if p is None:
            raise ValueError("characteristic p required")
    pm = _to_poly_matrix(M, p)
    return LatticeClass(d, p, _canonical_poly(pm, d, p))


def standard_lattice(d, p):
    mat = tuple(tuple((1,) if i == j else () for j in range(d)) for i in range(d))
    return LatticeClass(d, p, mat)


def color(v):
    """Vertex color in Z/dZ: the valuation of the determinant mod d."""
    return v.color()


# ---------------------------------------------------------------------------
# neighbor enumeration via subspaces of the residue quotient


def _all_rref(d, p, k):
    """All reduced-row-echelon bases of k-dim subspaces of F_p^d, as row tuples."""
    out = []
    for pivots in itertools.combinations(range(d), k):
        free = []
        for r in range(k):
            for c in range(pivots[r] + 1, d):
                if c not in pivots:
                    free.append((r, c))
        for assign in itertools.product(range(p), repeat=len(free)):
            rows = [[0] * d for _ in range(k)]
            for r in range(k):
                rows[r][pivots[r]] = 1
            for (r, c), v in zip(free, assign):
                rows[r][c] = v
            out.append(tuple(tuple(r) for r in rows))
    return out


def _rref_contains(big, small, p):
    """Row-space containment test for rref bases over F_p."""
    for row in small:
        r = list(row)
        for brow in big:
            lead = next(i for i, x in enumerate(brow) if x)
            if r[lead]:
                c = r[lead]
                r = [(x - c * yv) % p for x, yv in zip(r, brow)]
        if any(r):
            return False
    return True


class _Step:
    __slots__ = ("mat", "rows", "dim", "shift")

    def __init__(self, mat, rows, dim, shift):
        self.mat = mat
        self.rows = rows
        self.dim = dim
        self.shift = shift


@lru_cache(maxsize=None)
def _neighbor_steps(d, p):
    """Per proper nonzero subspace W of F_p^d: the canonical column basis of
    the lattice spanned by lifts of W together with y F_p[y]^d."""
    steps = []
    for k in range(1, d):
        for rows in sorted(_all_rref(d, p, k)):
            cols = [[(x,) if x else () for x in row] for row in rows]
            y1 = ypow(1)
            for i in range(d):
                cols.append([y1 if t == i else () for t in range(d)])
            H = _hnf_columns(cols, d, p)
            steps.append(_Step(H, rows, k, (d - k) % d))
    return tuple(steps)


@lru_cache(maxsize=None)
def _flag_chains(d, p):
    """Complete chains of step indices with dims 1..d-1 and nested subspaces."""
    steps = _neighbor_steps(d, p)
    by_dim = {}
    for i, st in enumerate(steps):
        by_dim.setdefault(st.dim, []).append(i)
    chains = [(i,) for i in by_dim.get(1, [])]
    for k in range(2, d):
        nxt = []
        for ch in chains:
            top = steps[ch[-1]]
            for j in by_dim.get(k, []):
                if _rref_contains(steps[j].rows, top.rows, p):
                    nxt.append(ch + (j,))
        chains = nxt
    return tuple(chains)


def neighbors(v, shift=None):
    """All classes adjacent to v, sorted by canonical encoding.

    With ``shift`` set, only neighbors whose color differs from v's by
    that amount (mod d) are returned.
    """
    d, p = v.d, v.p
    out = []
    for st in _neighbor_steps(d, p):
        if shift is not None and st.shift != shift % d:
            continue
        nb = LatticeClass(d, p, _canonical_poly(poly_mat_mul(v.mat, st.mat, p), d, p))
        out.append(nb)
    return sorted(out)


def neighbor_subspace(v, u):
    """The subspace of v's residue quotient corresponding to neighbor u (rref rows)."""
    p, d = v.p, v.d
    B = poly_mat_mul(poly_adjugate(v.mat, p), u.mat, p)
    t = _min_entry_val(B)
    const = [[(e[t] if len(e) > t else 0) for e in row] for row in B]
    cols = [tuple(const[i][j] for i in range(d)) for j in range(d)]
    rows = _fp_rref(cols, d, p)
    if not 0 < len(rows) < d:
        raise ValueError("vertices are not adjacent")
    return rows


def _fp_rref(rows, d, p):
    M = [list(r) for r in rows if any(r)]
    out = []
    lead_cols = []
    for row in M:
        r = list(row)
        for prow, lc in zip(out, lead_cols):
            if r[lc]:
                c = r[lc]
                r = [(x - c * yv) % p for x, yv in zip(r, prow)]
        if any(r):
            lc = next(i for i, x in enumerate(r) if x)
            inv = pow(r[lc], p - 2, p)
            r = [(x * inv) % p for x in r]
            for prow_i in range(len(out)):
                if out[prow_i][lc]:
                    c = out[prow_i][lc]
                    out[prow_i] = [(x - c * yv) % p for x, yv in zip(out[prow_i], r)]
            out.append(r)
            lead_cols.append(lc)
    order = sorted(range(len(out)), key=lambda i: lead_cols[i])
    return tuple(tuple(out[i]) for i in order)


def lattice_contains(u, v):
    """Whether the canonical lattice of v is contained in the canonical lattice of u."""
    p = u.p
    B = poly_mat_mul(poly_adjugate(u.mat, p), v.mat, p)
    s = u.det_valuation
    return all(pval(e) >= s for row in B for e in row if e)


# ---------------------------------------------------------------------------
# balls and links


class BuildingBall(SimplicialSet):
    """Radius-r ball around a vertex, with shells and per-vertex neighbor ids."""

    def __init__(self, payloads, simplices, d, p, r, shells, neighbor_ids):
        super().__init__(payloads, simplices, close_faces=True)
        self.d = d
        self.p = p
        self.r = r
        self.shells = shells
        self.neighbor_ids = neighbor_ids

    @property
    def colors(self):
        return [v.color() for v in self.payloads]

    def depth_of(self, vid):
        for depth, shell in enumerate(self.shells):
            if vid in shell:
                return depth
        raise KeyError(vid)

    def colored_graph(self):
        d = self.d
        cols = self.colors
        edges = []
        for u, v in self.edges():
            edges.append((u, v, (cols[v] - cols[u]) % d))
            edges.append((v, u, (cols[u] - cols[v]) % d))
        return ColoredGraph(self.n_vertices, edges)

    def export_edge_list(self, shift_fn=None):
        if shift_fn is None:
            d = self.d

            def shift_fn(a, b):
                return (b.color() - a.color()) % d

        return super().export_edge_list(shift_fn)


def ball(center, r, vertex_cap=DEFAULT_VERTEX_CAP):
    """All vertices within graph distance r of center, with every simplex
    among them; vertex ids follow breadth-first order with lexicographic
    tie-breaking on the canonical matrix encoding."""
    if r < 0:
        raise ValueError("radius must be >= 0")
    d, p = center.d, center.p
    steps = _neighbor_steps(d, p)
    verts = [center]
    ids = {center.key: 0}
    shells = [[0]]
    nbr_ids = {}
    edges = set()
    for depth in range(1, r + 1):
        found = {}
        buffers = []
        for vid in shells[depth - 1]:
            M = verts[vid].mat
            nbs = [LatticeClass(d, p, _canonical_poly(poly_mat_mul(M, st.mat, p), d, p))
                   for st in steps]
            buffers.append((vid, nbs))
            for nb in nbs:
                if nb.key not in ids:
                    found[nb.key] = nb
        new_keys = sorted(found)
        if len(ids) + len(new_keys) > vertex_cap:
            raise CapacityError(
                f"ball would exceed the vertex cap {vertex_cap}; raise vertex_cap to proceed")
        shell = []
        for k in new_keys:
            ids[k] = len(verts)
            verts.append(found[k])
            shell.append(ids[k])
        shells.append(shell)
        for vid, nbs in buffers:
            row = []
            for nb in nbs:
                j = ids.get(nb.key, -1)
                row.append(j)
                if j >= 0:
                    edges.add((vid, j) if vid < j else (j, vid))
            nbr_ids[vid] = row
    # expand the boundary shell for edges and chamber membership only
    for vid in shells[r] if r > 0 else []:
        M = verts[vid].mat
        row = []
        for st in steps:
            nb = LatticeClass(d, p, _canonical_poly(poly_mat_mul(M, st.mat, p), d, p))
            j = ids.get(nb.key, -1)
            row.append(j)
            if j >= 0:
                edges.add((vid, j) if vid < j else (j, vid))
        nbr_ids[vid] = row
    if r == 0:
        nbr_ids[0] = [-1] * len(steps)
    simplices = set(edges)
    chains = _flag_chains(d, p)
    for vid in range(len(verts)):
        row = nbr_ids[vid]
        for chain in chains:
            idsq = [row[si] for si in chain]
            if all(j >= 0 for j in idsq):
                simplices.add(tuple(sorted([vid] + idsq)))
    return BuildingBall(verts, simplices, d, p, r, shells, nbr_ids)


def link(v):
    """The link of a vertex in the building: the flag complex of its residue quotient."""
    b = ball(v, 1)
    return b.link_of(0)


def graph_distance(X, u, v):
    """BFS distance in the 1-skeleton of X; math.inf when unreachable."""
    if u == v:
        return 0
    adj = X.adjacency()
    dist = {u: 0}
    frontier = [u]
    while frontier:
        nxt = []
        for x in frontier:
            for y in adj[x]:
                if y not in dist:
                    dist[y] = dist[x] + 1
                    if y == v:
                        return dist[y]
                    nxt.append(y)
        frontier = nxt
    return math.inf


# ---------------------------------------------------------------------------
# apartment coordinates and the flat metric


@dataclass(frozen=True)
class ApartmentCoords:
    """Relative exponent vector of two classes, descending with minimum 0."""

    exponents: tuple

    def centered(self):
        m = sum(self.exponents) / len(self.exponents)
        return tuple(e - m for e in self.exponents)

    def norm(self):
        return math.sqrt(sum(c * c for c in self.centered()))

    def reversed_negated(self):
        mx = max(self.exponents)
        return ApartmentCoords(tuple(mx - e for e in reversed(self.exponents)))


def apartment_coords(u, v):
    """Exponents of the invariant factors of v's lattice inside u's,
    normalized to descending order with minimum 0."""
    if u.d != v.d or u.p != v.p:
        raise ValueError("vertices from different buildings")
    d, p = u.d, u.p
    B = poly_mat_mul(poly_adjugate(u.mat, p), v.mat, p)
    mins = []
    for k in range(1, d + 1):
        best = None
        for rows in itertools.combinations(range(d), k):
            for cols in itertools.combinations(range(d), k):
                sub = tuple(tuple(B[i][j] for j in cols) for i in rows)
                dv = poly_det(sub, p)
                if dv:
                    w = pval(dv)
                    if best is None or w < best:
                        best = w
        if best is None:
            raise SingularMatrixError("relative position of singular pair")
        mins.append(best)
    f = [mins[0]] + [mins[k] - mins[k - 1] for k in range(1, d)]
    f.sort(reverse=True)
    lo = f[-1]
    return ApartmentCoords(tuple(e - lo for e in f))


def edge_length(d):
    """CAT(0) length of a 1-simplex under the exponent-vector embedding."""
    return math.sqrt((d - 1) / d)


def cat0_distance(u, v, normalized=False):
    """Flat apartment distance; with normalized=True edges have length 1."""
    n = apartment_coords(u, v).norm()
    return n / edge_length(u.d) if normalized else n


def chamber_diameter(d, p, normalized=False):
    """Max pairwise cat0 distance over the vertices of one chamber (computed)."""
    base = standard_lattice(d, p)
    steps = _neighbor_steps(d, p)
    chain = _flag_chains(d, p)[0]
    verts = [base] + [
        LatticeClass(d, p, _canonical_poly(poly_mat_mul(base.mat, steps[i].mat, p), d, p))
        for i in chain]
    return max(cat0_distance(a, b, normalized=normalized)
               for a, b in itertools.combinations(verts, 2))


# ---------------------------------------------------------------------------
# fast pairwise relative positions (d = 2, 3) for whole balls


class _PolyCtx:
    """Memoized tuple-polynomial arithmetic on little-endian base-p int encodings."""

    def __init__(self, p):
        self.p = p
        self._tup = {0: ()}
        self._enc_cache = {(): 0}
        self._mul = {}
        self._add = {}
        self._sub = {}
        self._val = {0: _INF}

    def enc(self, t):
        e = self._enc_cache.get(t)
        if e is None:
            e = 0
            for c in reversed(t):
                e = e * self.p + c
            self._enc_cache[t] = e
            self._tup[e] = t
        return e

    def tup(self, e):
        t = self._tup.get(e)
        if t is None:
            c = []
            v = e
            while v:
                v, r = divmod(v, self.p)
                c.append(r)
            t = tuple(c)
            self._tup[e] = t
        return t

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        key = (a, b) if a <= b else (b, a)
        r = self._mul.get(key)
        if r is None:
            r = self.enc(pmul(self.tup(a), self.tup(b), self.p))
            self._mul[key] = r
        return r

    def add(self, a, b):
        if a == 0:
            return b
        if b == 0:
            return a
        key = (a, b) if a <= b else (b, a)
        r = self._add.get(key)
        if r is None:
            r = self.enc(padd(self.tup(a), self.tup(b), self.p))
            self._add[key] = r
        return r

    def sub(self, a, b):
        if b == 0:
            return a
        key = (a, b)
        r = self._sub.get(key)
        if r is None:
            r = self.enc(psub(self.tup(a), self.tup(b), self.p))
            self._sub[key] = r
        return r

    def neg(self, a):
        return self.enc(pneg(self.tup(a), self.p))

    def val(self, a):
        v = self._val.get(a)
        if v is None:
            v = pval(self.tup(a))
            self._val[a] = v
        return v


class PairwiseCat0:
    """Row-at-a-time cat0 distances between all vertices of a ball.

    Exact: each pair's relative exponent vector is derived from the
    valuations of the minors of adj(M_u) M_v, exploiting that canonical
    matrices are upper triangular.  Packaged per source row so callers
    can stream without materializing an n x n matrix.
    """

    def __init__(self, vertices, normalized=False):
        if not vertices:
            raise ValueError("empty vertex list")
        self.d = vertices[0].d
        self.p = vertices[0].p
        self.scale = 1.0 / edge_length(self.d) if normalized else 1.0
        self._verts = vertices
        if self.d in (2, 3):
            self.ctx = _PolyCtx(self.p)
            enc = self.ctx.enc
            if self.d == 2:
                self._encoded = [(enc(v.mat[0][0]), enc(v.mat[0][1]), enc(v.mat[1][1]))
                                 for v in vertices]
            else:
                self._encoded = [(enc(v.mat[0][0]), enc(v.mat[0][1]), enc(v.mat[0][2]),
                                  enc(v.mat[1][1]), enc(v.mat[1][2]), enc(v.mat[2][2]))
                                 for v in vertices]
        self._norms = {}

    def _norm_from_gaps(self, gaps):
        r = self._norms.get(gaps)
        if r is None:
            f = [0]
            for g in gaps:
                f.append(f[-1] + g)
            m = sum(f) / len(f)
            r = math.sqrt(sum((x - m) ** 2 for x in f)) * self.scale
            self._norms[gaps] = r
        return r

    def row(self, i, start=0):
        """Distances from vertex i to vertices start..n-1 (use start=i+1 with symmetry)."""
        if self.d == 2:
            return self._row2(i, start)
        if self.d == 3:
            return self._row3(i, start)
        return self._row_generic(i, start)

    def _row2(self, i, start):
        ctx = self.ctx
        mul, val = ctx.mul, ctx.val
        a, b, dd = self._encoded[i]
        nb = ctx.neg(b)
        targets = self._encoded[start:]
        out = np.empty(len(targets))
        for j, (m11, m12, m22) in enumerate(targets):
            b11 = mul(dd, m11)
            b12 = ctx.add(mul(dd, m12), mul(nb, m22))
            b22 = mul(a, m22)
            v11, v22 = val(b11), val(b22)
            e1 = min(v11, val(b12), v22)
            e2 = v11 + v22
            out[j] = self._norm_from_gaps((e2 - 2 * e1,))
        return out

    def _row3(self, i, start):
        ctx = self.ctx
        mul, add, val = ctx.mul, ctx.add, ctx.val
        a, b, c, dd, e, f = self._encoded[i]
        p11 = mul(dd, f)
        p12 = ctx.neg(mul(b, f))
        p13 = ctx.sub(mul(b, e), mul(c, dd))
        p22 = mul(a, f)
        p23 = ctx.neg(mul(a, e))
        p33 = mul(a, dd)
        targets = self._encoded[start:]
        out = np.empty(len(targets))
        for j, (m11, m12, m13, m22, m23, m33) in enumerate(targets):
            b11 = mul(p11, m11)
            b12 = add(mul(p11, m12), mul(p12, m22))
            b13 = add(add(mul(p11, m13), mul(p12, m23)), mul(p13, m33))
            b22 = mul(p22, m22)
            b23 = add(mul(p22, m23), mul(p23, m33))
            b33 = mul(p33, m33)
            v11, v12, v13 = val(b11), val(b12), val(b13)
            v22, v23, v33 = val(b22), val(b23), val(b33)
            e1 = min(v11, v12, v13, v22, v23, v33)
            e3 = v11 + v22 + v33
            va, vb = v12 + v23, v13 + v22
            if va != vb:
                mid = min(va, vb)
            elif va >= _INF:
                mid = _INF
            else:
                mid = val(ctx.sub(mul(b12, b23), mul(b13, b22)))
            e2 = min(v11 + v22, v11 + v23, v11 + v33, v12 + v33, v22 + v33, mid)
            out[j] = self._norm_from_gaps((e2 - e1 - e1, e3 - e2 - e2 + e1))
        return out

    def _row_generic(self, i, start):
        u = self._verts[i]
        targets = self._verts[start:]
        out = np.empty(len(targets))
        for j, v in enumerate(targets):
            out[j] = apartment_coords(u, v).norm() * self.scale
        return out
