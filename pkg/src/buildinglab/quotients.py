"""Congruence quotient complexes at desk scale.

The pipeline: color-shift-1 generator matrices over the S-integer ring
(each sends the base vertex of the building to one of its color-1
neighbors, bijectively, verified at construction), reduction modulo a
monic irreducible polynomial coprime to y(y+1), breadth-first closure
of the reduced generators inside PGL_d of the residue field, and the
Cayley complex of the closure with its covering diagnostics.

The closure is the image of a concrete finitely generated group, so
the complex is a Cayley-complex avatar of a congruence quotient; no
simple-transitivity or Ramanujan property is asserted, and
``covering_check`` provides empirical local evidence only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .building import (
    LatticeClass,
    _canonical_poly,
    neighbors,
    poly_adjugate,
    poly_det,
    poly_mat_mul,
    standard_lattice,
)
from .fields import (
    IdealNotCoprimeError,
    LaurentElement,
    Poly,
    ResidueElement,
    ResidueRing,
    is_irreducible,
    peval,
    pmod,
    pmonic,
    pnormalize,
)
from .simplicial import ColoredGraph

DEFAULT_CLOSURE_CAP = 250_000
DEFAULT_SYSTOLE_DEPTH_CAP = 20


class InternalConsistencyError(RuntimeError):
    """Generator verification against the building failed; indicates a bug."""


class PartialClosureError(RuntimeError):
    """Group closure hit its cap before finishing."""

    def __init__(self, message, frontier_size):
        super().__init__(message)
        self.frontier_size = frontier_size


def _all_hyperplanes(d, p):
    from .building import _all_rref

    return sorted(_all_rref(d, p, d - 1))


@dataclass(frozen=True)
class GeneratorSet:
    """Color-shift-1 generators and the base-vertex neighbors they produce."""

    d: int
    p: int
    matrices: tuple       # polynomial coefficient-tuple matrices
    neighbor_classes: tuple

    def laurent_matrices(self):
        return tuple(tuple(tuple(LaurentElement(e, 0, 0, self.p) for e in row)
                           for row in m) for m in self.matrices)

    def __len__(self):
        return len(self.matrices)


def _plain_lift(rows, d, p):
    """Columns: a basis of the hyperplane, then y times the missing unit vector."""
    pivots = [next(i for i, x in enumerate(row) if x) for row in rows]
    missing = next(i for i in range(d) if i not in pivots)
    cols = [tuple(row) for row in rows] + [tuple(1 if i == missing else 0 for i in range(d))]

    def entry(i, j):
        c = cols[j][i]
        if not c:
            return ()
        return (0, c) if j == d - 1 else (c,)

    return tuple(tuple(entry(i, j) for j in range(d)) for i in range(d))


def _scale_entry(e, c, p):
    return tuple((x * c) % p for x in e) if e else ()


def _gl2_constants(p):
    import itertools

    out = []
    for a, b, c, d in itertools.product(range(p), repeat=4):
        if (a * d - b * c) % p:
            out.append((((a,) if a else (), (b,) if b else ()),
                        ((c,) if c else (), (d,) if d else ())))
    return out


def _rank2_generators(p):
    """Inverse-closed lifts for the tree.

    Where the adjugate of a plain lift lands on a fresh line, the two are
    kept as a mutually inverse pair (their product is y times the identity).
    Otherwise a trace-zero lift is used: by Cayley-Hamilton its square is a
    scalar, so its image is self-inverse in every projective reduction.
    Inverse closure makes the quotient 1-skeleton (p+1)-regular like the tree.
    """
    from .fields import padd

    lines = _all_hyperplanes(2, p)
    line_class = {rows: LatticeClass(2, p, _canonical_poly(_plain_lift(rows, 2, p), 2, p))
                  for rows in lines}
    class_line = {v: k for k, v in line_class.items()}
    mats = {}
    covered = set()
    for rows in lines:
        if rows in covered:
            continue
        gamma = _plain_lift(rows, 2, p)
        det = poly_det(gamma, p)
        assert len(det) == 2 and det[0] == 0, "lift determinant must be a unit times y"
        cinv = pow(det[1], p - 2, p)
        partner = tuple(tuple(_scale_entry(e, cinv, p) for e in row)
                        for row in poly_adjugate(gamma, p))
        partner_line = class_line[LatticeClass(2, p, _canonical_poly(partner, 2, p))]
        if partner_line != rows and partner_line not in covered:
            mats[rows] = gamma
            mats[partner_line] = partner
            covered.update({rows, partner_line})
            continue
        found = None
        for v in _gl2_constants(p):
            delta = poly_mat_mul(gamma, v, p)
            if padd(delta[0][0], delta[1][1], p) == ():
                found = delta
                break
        if found is None:
            raise InternalConsistencyError(f"no trace-zero lift for line {rows}")
        mats[rows] = found
        covered.add(rows)
    return [mats[rows] for rows in lines]


def standard_generators(d, p):
    """One generator per hyperplane of F_p^d: a constant change of basis whose
    leading columns span the hyperplane, times diag(1, ..., 1, y).

    Each has determinant equal to a unit times y.  For d = 2 the lifts are
    additionally chosen inverse-closed (every generator's projective inverse
    is again a generator, uniformly over residue moduli), so quotient
    skeletons are (p+1)-regular like the tree.  Construction is verified
    against the building: the images of the base vertex must be exactly its
    color-1 neighbors, bijectively.
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    if d == 2:
        mats = _rank2_generators(p)
    else:
        mats = [_plain_lift(rows, d, p) for rows in _all_hyperplanes(d, p)]
    base = standard_lattice(d, p)
    images = [LatticeClass(d, p, _canonical_poly(m, d, p)) for m in mats]
    expected = neighbors(base, shift=1)
    if len(set(images)) != len(images) or sorted(images) != expected:
        raise InternalConsistencyError(
            "generator images do not enumerate the color-1 neighbors of the base vertex")
    for m in images:
        if m.det_valuation % d != 1:
            raise InternalConsistencyError("generator determinant valuation is not 1")
    return GeneratorSet(d, p, tuple(mats), tuple(images))


@dataclass(frozen=True)
class ReducedGenerators:
    """Generator images in PGL_d of the residue field, projectively normalized."""

    ring: ResidueRing
    d: int
    mats: tuple  # row-major int-encoded matrices

    def as_residue_elements(self):
        return tuple(tuple(tuple(ResidueElement(self.ring, v) for v in row) for row in m)
                     for m in self.mats)

    def __len__(self):
        return len(self.mats)


def congruence_reduce(gens, g, p=None):
    """Reduce a GeneratorSet modulo a monic irreducible g coprime to y(y+1).

    The residue ring must be a field (reducible g is rejected: projective
    normalization over a non-field residue ring is out of scope here).
    """
    if isinstance(g, Poly):
        p = g.p if p is None else p
        g = g.coeffs
    if p is None:
        p = gens.p
    g = pmonic(pnormalize(tuple(g), p), p)
    if peval(g, 0, p) == 0 or peval(g, p - 1, p) == 0:
        raise IdealNotCoprimeError(
            "modulus vanishes at 0 or -1: ideal not coprime to the denominators")
    if not is_irreducible(g, p):
        raise ValueError(
            "reducible modulus rejected: the residue ring would not be a field, and "
            "projective matrices over a non-field residue ring are out of scope")
    ring = ResidueRing(p, g)
    mats = []
    for m in gens.matrices:
        enc = tuple(tuple(ring.encode(pmod(e, g, p)) for e in row) for row in m)
        if ring.mat_det(enc) == 0:
            raise InternalConsistencyError("reduced generator is singular")
        mats.append(ring.normalize_projective(enc))
    return ReducedGenerators(ring, gens.d, tuple(mats))


@dataclass
class Closure:
    """BFS closure of reduced generators; elements in discovery order."""

    ring: ResidueRing
    d: int
    elements: list
    index: dict

    @property
    def order(self):
        return len(self.elements)

    def pgl_order(self):
        return pgl_order(self.d, self.ring.q)

    def lagrange_ok(self):
        return self.pgl_order() % self.order == 0


def pgl_order(d, q):
    n = 1
    for i in range(d):
        n *= q ** d - q ** i
    return n // (q - 1)


def group_closure(reduced, cap=DEFAULT_CLOSURE_CAP):
    """Close the reduced generators under multiplication and inverses.

    Breadth-first from the identity, multiplying on the right by the
    generators and their inverses in a fixed order; element ids follow
    discovery order, so the result is deterministic.
    """
    if isinstance(reduced, ReducedGenerators):
        ring, d, seed = reduced.ring, reduced.d, reduced.mats
    else:
        ring, d, seed = reduced[0], len(reduced[1][0]), tuple(reduced[1])
    multipliers = list(seed)
    for m in seed:
        inv = ring.normalize_projective(ring.mat_inv(m))
        if inv not in multipliers:
            multipliers.append(inv)
    ident = ring.normalize_projective(ring.mat_identity(d))
    elements = [ident]
    index = {ident: 0}
    head = 0
    mat_mul = ring.mat_mul
    norm = ring.normalize_projective
    while head < len(elements):
        h = elements[head]
        head += 1
        for s in multipliers:
            x = norm(mat_mul(h, s))
            if x not in index:
                if len(elements) >= cap:
                    raise PartialClosureError(
                        f"group closure exceeded cap {cap}", len(elements) - head)
                index[x] = len(elements)
                elements.append(x)
    return Closure(ring, d, elements, index)


class QuotientComplex:
    """Cayley complex of a closed generator image.

    Vertices are group elements (ids in closure order); each vertex has one
    outgoing color-shift-1 edge per generator, labeled by generator index.
    The undirected 1-skeleton and the chamber set (directed d-cycles of
    shift-1 edges) are derived.
    """

    def __init__(self, closure, reduced, generators=None):
        self.closure = closure
        self.reduced = reduced
        self.generators = generators
        self.ring = closure.ring
        self.d = closure.d
        n = closure.order
        heads, tails, labels = [], [], []
        idx = closure.index
        mat_mul = self.ring.mat_mul
        norm = self.ring.normalize_projective
        for i, h in enumerate(closure.elements):
            for k, s in enumerate(reduced.mats):
                j = idx[norm(mat_mul(h, s))]
                heads.append(i)
                tails.append(j)
                labels.append(k)
        self.n = n
        self.edge_heads = heads
        self.edge_tails = tails
        self.edge_labels = labels
        self._chambers = None
        self._undirected = None
        self._systole = None

    @property
    def out_degree(self):
        return len(self.reduced.mats)

    def directed_edges(self):
        return list(zip(self.edge_heads, self.edge_tails, self.edge_labels))

    def undirected_pairs(self):
        if self._undirected is None:
            seen = set()
            for u, v in zip(self.edge_heads, self.edge_tails):
                if u != v:
                    seen.add((u, v) if u < v else (v, u))
            self._undirected = sorted(seen)
        return self._undirected

    def adjacency_lists(self):
        adj = [[] for _ in range(self.n)]
        for u, v in self.undirected_pairs():
            adj[u].append(v)
            adj[v].append(u)
        return [sorted(a) for a in adj]

    def colored_graph(self):
        """Each ordered pair once: shift 1 along a generator edge, d-1 against."""
        d = self.d
        directed = set(zip(self.edge_heads, self.edge_tails))
        edges = []
        for u, v in self.undirected_pairs():
            edges.append((u, v, 1 % d if (u, v) in directed else (d - 1) % d))
            edges.append((v, u, 1 % d if (v, u) in directed else (d - 1) % d))
        return ColoredGraph(self.n, edges)

    def chambers(self):
        """Directed d-cycles of shift-1 edges, deduplicated as vertex sets."""
        if self._chambers is not None:
            return self._chambers
        d = self.d
        ring = self.ring
        idx = self.closure.index
        norm = ring.normalize_projective
        ident = norm(ring.mat_identity(d))
        gens = self.reduced.mats
        closing = []

        def walk(prefix_mat, picks):
            if len(picks) == d - 1:
                for k, s in enumerate(gens):
                    if norm(ring.mat_mul(prefix_mat, s)) == ident:
                        closing.append(tuple(picks))
                        return
                return
            for k, s in enumerate(gens):
                walk(ring.mat_mul(prefix_mat, s), picks + [k])

        walk(ring.mat_identity(d), [])
        chambers = set()
        if d >= 3:
            elements = self.closure.elements
            mat_mul = ring.mat_mul
            for i, h in enumerate(elements):
                for picks in closing:
                    ids = [i]
                    m = h
                    for k in picks:
                        m = norm(mat_mul(m, gens[k]))
                        ids.append(idx[m])
                    if len(set(ids)) == d:
                        chambers.add(tuple(sorted(ids)))
        else:
            chambers = {tuple(pr) for pr in self.undirected_pairs()}
        self._chambers = sorted(chambers)
        return self._chambers

    def to_json_dict(self):
        return {
            "d": self.d,
            "p": self.ring.p,
            "modulus": list(self.ring.modulus),
            "residue_field_order": self.ring.q,
            "order": self.n,
            "out_degree": self.out_degree,
            "pgl_order": self.closure.pgl_order(),
            "order_divides_pgl": self.closure.lagrange_ok(),
        }


def quotient_complex(closure, reduced, generators=None):
    return QuotientComplex(closure, reduced, generators)


def build_quotient(d, p, g, cap=DEFAULT_CLOSURE_CAP):
    """Full pipeline: generators, reduction, closure, complex."""
    gens = standard_generators(d, p)
    red = congruence_reduce(gens, g, p)
    clo = group_closure(red, cap=cap)
    return QuotientComplex(clo, red, gens)


# ---------------------------------------------------------------------------
# systole / girth


def _adjacency_of(X):
    if isinstance(X, QuotientComplex):
        return X.adjacency_lists()
    if isinstance(X, ColoredGraph):
        adj = [set() for _ in range(X.n)]
        for u, v in X.undirected_pairs():
            adj[u].add(v)
            adj[v].add(u)
        return [sorted(a) for a in adj]
    if hasattr(X, "adjacency"):
        a = X.adjacency()
        return [a[i] for i in range(len(a))]
    raise TypeError(f"cannot extract adjacency from {type(X).__name__}")


def _girth_from(adj, src, depth_cap):
    dist = {src: 0}
    parent = {src: -1}
    best = math.inf
    frontier = [src]
    depth = 0
    while frontier and depth < depth_cap:
        nxt = []
        for x in frontier:
            dx = dist[x]
            if 2 * dx >= best - 1:
                continue
            for y in adj[x]:
                if y not in dist:
                    dist[y] = dx + 1
                    parent[y] = x
                    nxt.append(y)
                elif y != parent[x] and dist[y] >= dx:
                    # non-tree edge closes a cycle through the BFS tree
                    best = min(best, dx + dist[y] + 1)
        frontier = nxt
        depth += 1
    return best


def systole(X, vertex_transitive=False, depth_cap=DEFAULT_SYSTOLE_DEPTH_CAP):
    """Girth of the undirected 1-skeleton; math.inf for forests.

    With vertex_transitive=True a single-source computation suffices
    (the shortest cycle passes through every vertex's orbit).  The BFS
    depth cap bounds the detectable girth at 2*depth_cap + 1.
    """
    if isinstance(X, QuotientComplex) and X._systole is not None:
        return X._systole
    adj = _adjacency_of(X)
    if not adj:
        return math.inf
    if vertex_transitive or isinstance(X, QuotientComplex):
        g = _girth_from(adj, 0, depth_cap)
    else:
        g = min(_girth_from(adj, s, depth_cap) for s in range(len(adj)))
    if isinstance(X, QuotientComplex):
        X._systole = g
    return g


# ---------------------------------------------------------------------------
# covering diagnostics


@dataclass
class CoveringVerdict:
    passed: bool
    radius: int
    quotient_ball_size: int
    building_ball_size: int
    mismatch: str | None
    mapping: dict | None

    def __bool__(self):
        return self.passed


def _quotient_out_ball(X, r):
    """Vertices within directed distance r of vertex 0, plus induced labeled edges."""
    depth = {0: 0}
    order = [0]
    out_edges = {}
    by_head = {}
    for u, v, k in zip(X.edge_heads, X.edge_tails, X.edge_labels):
        by_head.setdefault(u, []).append((v, k))
    head = 0
    while head < len(order):
        u = order[head]
        head += 1
        if depth[u] == r:
            continue
        for v, k in sorted(by_head.get(u, [])):
            if v not in depth:
                depth[v] = depth[u] + 1
                order.append(v)
    members = set(order)
    edges = []
    for u in order:
        for v, k in sorted(by_head.get(u, [])):
            if v in members:
                edges.append((u, v))
    return order, depth, edges


def _building_out_ball(d, p, r):
    base = standard_lattice(d, p)
    depth = {base: 0}
    order = [base]
    head = 0
    while head < len(order):
        v = order[head]
        head += 1
        if depth[v] == r:
            continue
        for w in neighbors(v, shift=1):
            if w not in depth:
                depth[w] = depth[v] + 1
                order.append(w)
    members = {v: i for i, v in enumerate(order)}
    edges = []
    for v in order:
        i = members[v]
        for w in neighbors(v, shift=1):
            j = members.get(w)
            if j is not None:
                edges.append((i, j))
    return order, depth, edges


def _rooted_digraph_iso(n_a, edges_a, depth_a, n_b, edges_b, depth_b):
    """Backtracking isomorphism search between rooted directed graphs.

    Returns (mapping a->b) or None.  Candidates are filtered by BFS depth
    and in/out degrees; fine at out-ball scale.
    """
    if n_a != n_b or len(edges_a) != len(edges_b):
        return None
    out_a = {i: set() for i in range(n_a)}
    in_a = {i: set() for i in range(n_a)}
    for u, v in edges_a:
        out_a[u].add(v)
        in_a[v].add(u)
    out_b = {i: set() for i in range(n_b)}
    in_b = {i: set() for i in range(n_b)}
    for u, v in edges_b:
        out_b[u].add(v)
        in_b[v].add(u)

    def sig_a(i):
        return (depth_a[i], len(out_a[i]), len(in_a[i]))

    def sig_b(i):
        return (depth_b[i], len(out_b[i]), len(in_b[i]))

    if sorted(sig_a(i) for i in range(n_a)) != sorted(sig_b(i) for i in range(n_b)):
        return None
    order = sorted(range(n_a), key=sig_a)
    # root (depth 0) first
    order.sort(key=lambda i: depth_a[i])
    mapping = {}
    used = set()

    def consistent(i, j):
        for x in out_a[i]:
            if x in mapping and mapping[x] not in out_b[j]:
                return False
        for x in in_a[i]:
            if x in mapping and mapping[x] not in in_b[j]:
                return False
        for u2, v2 in mapping.items():
            if i in out_a[u2] and j not in out_b[v2]:
                return False
            if i in in_a[u2] and j not in in_b[v2]:
                return False
        return True

    def backtrack(pos):
        if pos == len(order):
            return True
        i = order[pos]
        for j in range(n_b):
            if j in used or sig_b(j) != sig_a(i):
                continue
            if consistent(i, j):
                mapping[i] = j
                used.add(j)
                if backtrack(pos + 1):
                    return True
                del mapping[i]
                used.discard(j)
        return False

    return dict(mapping) if backtrack(0) else None


def covering_check(X, r):
    """Compare the radius-r colored out-ball of X at a vertex with the
    building's color-1 out-ball of the same radius.

    Requires r < systole(X)/2 so the local picture is unambiguous; returns
    a verdict carrying the first structural mismatch on failure.
    """
    if r < 0:
        raise ValueError("radius must be >= 0")
    s = systole(X, vertex_transitive=True)
    if not r < s / 2:
        raise ValueError(f"radius {r} is not below systole/2 = {s}/2")
    if r == 0:
        return CoveringVerdict(True, 0, 1, 1, None, {0: 0})
    d, p = X.d, X.ring.p
    q_order, q_depth, q_edges = _quotient_out_ball(X, r)
    b_order, b_depth, b_edges = _building_out_ball(d, p, r)
    remap = {v: i for i, v in enumerate(q_order)}
    qn = len(q_order)
    q_edges_r = [(remap[u], remap[v]) for u, v in q_edges]
    q_depth_r = {remap[v]: dep for v, dep in q_depth.items()}
    bn = len(b_order)
    b_depth_r = {i: b_depth[v] for i, v in enumerate(b_order)}
    if qn != bn:
        return CoveringVerdict(False, r, qn, bn,
                               f"out-ball sizes differ: quotient {qn} vs building {bn}", None)
    if len(set(q_edges_r)) != len(set(b_edges)):
        return CoveringVerdict(False, r, qn, bn,
                               f"edge counts differ: quotient {len(set(q_edges_r))} "
                               f"vs building {len(set(b_edges))}", None)
    mapping = _rooted_digraph_iso(qn, sorted(set(q_edges_r)), q_depth_r,
                                  bn, sorted(set(b_edges)), b_depth_r)
    if mapping is None:
        return CoveringVerdict(False, r, qn, bn,
                               "no depth/degree-compatible isomorphism of out-balls", None)
    return CoveringVerdict(True, r, qn, bn, None, mapping)


def ball_lift(X, r):
    """Parallel undirected BFS matching quotient vertices (within radius r of
    the identity) to building vertices, following generator labels.

    Valid for r < systole(X)/2; returns (id map quotient id -> building
    class, quotient ids in BFS order).  Word products are tracked exactly
    (canonical forms only key the classes): canonicalizing mid-word would
    change subsequent right multiplications.  Raises if the correspondence
    is inconsistent, which would mean the radius is too large.
    """
    if X.generators is None:
        raise ValueError("quotient was built without its generator set")
    p = X.ring.p
    d = X.d
    gens = X.generators.matrices
    adjs = [poly_adjugate(m, p) for m in gens]
    by_head = {}
    by_tail = {}
    for u, v, k in zip(X.edge_heads, X.edge_tails, X.edge_labels):
        by_head.setdefault(u, []).append((v, k))
        by_tail.setdefault(v, []).append((u, k))
    ident = tuple(tuple((1,) if i == j else () for j in range(d)) for i in range(d))
    lift = {0: standard_lattice(d, p)}
    words = {0: ident}
    depth = {0: 0}
    order = [0]
    head = 0
    while head < len(order):
        u = order[head]
        head += 1
        if depth[u] == r:
            continue
        wu = words[u]
        moves = [(v, k, True) for v, k in sorted(by_head.get(u, []))] + \
                [(v, k, False) for v, k in sorted(by_tail.get(u, []))]
        for v, k, forward in moves:
            wv = poly_mat_mul(wu, gens[k] if forward else adjs[k], p)
            cv = LatticeClass(d, p, _canonical_poly(wv, d, p))
            if v in lift:
                if lift[v] != cv:
                    raise ValueError(
                        f"inconsistent lift at radius {depth[u] + 1}: radius too large?")
            else:
                lift[v] = cv
                words[v] = wv
                depth[v] = depth[u] + 1
                order.append(v)
    return lift, order
