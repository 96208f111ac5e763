"""Flag complexes of F_q^n: spherical geometry at the links of the building.

Vertices are proper nonzero subspaces (reduced row-echelon bases over
F_q give unique keys), simplices are flags, chambers are complete
flags.  Apartments come from frames (n independent lines); chambers of
an apartment correspond to orderings of the frame lines, which makes
walls, half-apartments and reflection bookkeeping purely combinatorial.

``root_group_check`` verifies the defining property of a root group:
every element must fix pointwise every chamber having a panel in the
interior of the half-apartment.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .fields import ResidueRing
from .simplicial import SimplicialSet

FLAG_VERTEX_CAP = 200_000
GROUP_CLOSURE_CAP = 1_000_000


def gf(q):
    """The finite field F_q (prime power q) with table-backed arithmetic."""
    return ResidueRing.for_order(q)


class Subspace:
    """Subspace of F_q^n as a reduced-row-echelon basis (rows of int-encoded scalars)."""

    __slots__ = ("ring", "n", "rows")

    def __init__(self, ring, n, rows, reduce=True):
        self.ring = ring
        self.n = n
        if reduce:
            rows, _ = ring.mat_rref(tuple(tuple(r) for r in rows))
        self.rows = tuple(tuple(r) for r in rows)

    @property
    def dim(self):
        return len(self.rows)

    def contains(self, other):
        if other.dim > self.dim:
            return False
        for row in other.rows:
            r = list(row)
            for brow in self.rows:
                lead = next(i for i, x in enumerate(brow) if x)
                if r[lead]:
                    c = r[lead]
                    r = [self.ring.sub(x, self.ring.mul(c, y)) for x, y in zip(r, brow)]
            if any(r):
                return False
        return True

    def apply(self, g):
        """Image under the invertible matrix g acting on column vectors."""
        gt = tuple(tuple(g[i][j] for i in range(self.n)) for j in range(self.n))
        return Subspace(self.ring, self.n, self.ring.mat_mul(self.rows, gt))

    def to_json_dict(self):
        return {"q": self.ring.q, "n": self.n, "rows": [list(r) for r in self.rows]}

    def __eq__(self, other):
        return (isinstance(other, Subspace) and other.ring == self.ring
                and other.n == self.n and other.rows == self.rows)

    def __lt__(self, other):
        return (self.dim, self.rows) < (other.dim, other.rows)

    def __hash__(self):
        return hash((self.ring, self.n, self.rows))

    def __repr__(self):
        return f"Subspace(q={self.ring.q}, dim={self.dim}, rows={self.rows})"


class Flag:
    """Strictly increasing chain of proper nonzero subspaces."""

    __slots__ = ("subspaces",)

    def __init__(self, subspaces):
        subs = tuple(subspaces)
        if not subs:
            raise ValueError("empty flag")
        for a, b in zip(subs, subs[1:]):
            if not (a.dim < b.dim and b.contains(a)):
                raise ValueError("not an increasing chain of subspaces")
        self.subspaces = subs

    @property
    def dims(self):
        return tuple(s.dim for s in self.subspaces)

    def __eq__(self, other):
        return isinstance(other, Flag) and other.subspaces == self.subspaces

    def __hash__(self):
        return hash(self.subspaces)

    def __len__(self):
        return len(self.subspaces)

    def __iter__(self):
        return iter(self.subspaces)

    def __repr__(self):
        return f"Flag(dims={self.dims})"


def group_action(g, flag, ring=None):
    """Left-multiplication action on a flag; g must be invertible."""
    if isinstance(flag, Subspace):
        ring = flag.ring
        if ring.mat_det(g) == 0:
            raise ValueError("singular matrix does not act on the flag complex")
        return flag.apply(g)
    ring = flag.subspaces[0].ring
    if ring.mat_det(g) == 0:
        raise ValueError("singular matrix does not act on the flag complex")
    return Flag(tuple(s.apply(g) for s in flag.subspaces))


def all_subspaces(ring, n, dim=None):
    """All subspaces of F_q^n, or only those of a given dimension, sorted."""
    dims = range(1, n) if dim is None else [dim]
    out = []
    for k in dims:
        for pivots in itertools.combinations(range(n), k):
            free = []
            for r in range(k):
                for c in range(pivots[r] + 1, n):
                    if c not in pivots:
                        free.append((r, c))
            for assign in itertools.product(range(ring.q), repeat=len(free)):
                rows = [[0] * n for _ in range(k)]
                for r in range(k):
                    rows[r][pivots[r]] = 1
                for (r, c), v in zip(free, assign):
                    rows[r][c] = v
                out.append(Subspace(ring, n, rows, reduce=False))
    return sorted(out)


def gaussian_binomial(n, k, q):
    """Number of k-dimensional subspaces of F_q^n."""
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (k - i) - 1
    return num // den


def flag_complex(n, q, vertex_cap=FLAG_VERTEX_CAP):
    """The simplicial complex of flags of proper nonzero subspaces of F_q^n."""
    if n < 2:
        raise ValueError("n must be >= 2")
    ring = q if isinstance(q, ResidueRing) else gf(q)
    n_vertices = sum(gaussian_binomial(n, k, ring.q) for k in range(1, n))
    if n_vertices > vertex_cap:
        raise ValueError(f"flag complex with {n_vertices} vertices exceeds cap {vertex_cap}")
    verts = all_subspaces(ring, n)
    index = {s: i for i, s in enumerate(verts)}
    children = {i: [] for i in range(len(verts))}  # i -> strictly larger neighbors
    for i, a in enumerate(verts):
        for j, b in enumerate(verts):
            if a.dim < b.dim and b.contains(a):
                children[i].append(j)
    simplices = []

    def extend(chain):
        simplices.append(tuple(chain))
        for j in children[chain[-1]]:
            extend(chain + [j])

    for i in range(len(verts)):
        extend([i])
    return SimplicialSet(verts, simplices, close_faces=False)


class Frame:
    """n independent lines of F_q^n; spans of subsets form one apartment."""

    __slots__ = ("ring", "n", "lines")

    def __init__(self, lines):
        lines = tuple(lines)
        if not lines:
            raise ValueError("empty frame")
        ring = lines[0].ring
        n = lines[0].n
        if len(lines) != n or any(ln.dim != 1 for ln in lines):
            raise ValueError("a frame needs n independent lines")
        stacked = tuple(ln.rows[0] for ln in lines)
        if ring.mat_det(stacked) == 0:
            raise ValueError("frame lines are not independent")
        self.ring = ring
        self.n = n
        self.lines = lines

    @classmethod
    def coordinate(cls, ring, n):
        lines = [Subspace(ring, n, [tuple(1 if j == i else 0 for j in range(n))],
                          reduce=False) for i in range(n)]
        return cls(lines)

    @classmethod
    def from_vectors(cls, ring, vectors):
        n = len(vectors)
        return cls([Subspace(ring, n, [tuple(v)]) for v in vectors])

    def span_of(self, subset):
        rows = [self.lines[i].rows[0] for i in sorted(subset)]
        return Subspace(self.ring, self.n, rows)

    def __repr__(self):
        return f"Frame(n={self.n}, q={self.ring.q})"


class Apartment(SimplicialSet):
    """Subcomplex of flags of spans of frame-line subsets.

    Payloads are (frozenset of line indices, Subspace); chambers
    correspond to orderings of the frame lines.
    """

    def __init__(self, frame):
        n = frame.n
        subsets = []
        for k in range(1, n):
            subsets.extend(frozenset(c) for c in itertools.combinations(range(n), k))
        subsets.sort(key=lambda s: (len(s), sorted(s)))
        payloads = [(s, frame.span_of(s)) for s in subsets]
        index = {s: i for i, (s, _) in enumerate(payloads)}
        simplices = []

        def extend(chain, top):
            simplices.append(tuple(index[s] for s in chain))
            for s in subsets:
                if len(s) > len(top) and top < s:
                    extend(chain + [s], s)

        for s in subsets:
            extend([s], s)
        super().__init__(payloads, simplices, close_faces=False)
        self.frame = frame
        self.subset_index = index

    def chamber_order(self, chamber):
        """The ordering of frame lines realized by a chamber (complete flag)."""
        chain = sorted((self.payloads[i][0] for i in chamber), key=len)
        order = []
        seen = set()
        for s in chain:
            new = s - seen
            if len(new) != 1:
                raise ValueError("not a chamber of this apartment")
            order.append(next(iter(new)))
            seen = s
        order.extend(i for i in range(self.frame.n) if i not in seen)
        return tuple(order)


def apartment(frame):
    """The apartment determined by a frame; for n=3 a hexagon of 6 chambers."""
    return Apartment(frame)


@dataclass(frozen=True)
class Root:
    """A closed half-apartment: the chambers on one side of a reflection wall."""

    apartment: Apartment
    transposition: tuple
    chambers: frozenset
    wall_panels: frozenset

    def interior_panels(self):
        """Panels all of whose ambient apartment chambers lie in this root."""
        ap = self.apartment
        n = ap.frame.n
        chambers = [s for s in ap.simplices if len(s) == n - 1]
        panels = set()
        for ch in chambers:
            for panel in itertools.combinations(ch, n - 2):
                panels.add(tuple(sorted(panel)))
        out = []
        for panel in sorted(panels):
            pset = set(panel)
            holders = [ch for ch in chambers if pset <= set(ch)]
            if holders and all(ch in self.chambers for ch in holders):
                out.append(panel)
        return out

    def opposite(self):
        ap = self.apartment
        n = ap.frame.n
        all_chambers = frozenset(s for s in ap.simplices if len(s) == n - 1)
        return Root(ap, self.transposition, all_chambers - self.chambers, self.wall_panels)


def _panel_fixed_by(ap, panel, i, j):
    """A simplex is wall material for the swap (i j) iff every member subset
    either contains both indices or neither."""
    for vid in panel:
        s = ap.payloads[vid][0]
        if (i in s) != (j in s):
            return False
    return True


def root_halfapartment(ap, wall, side_chamber):
    """The closed half-apartment bounded by a reflection wall.

    ``wall`` is a pair of opposite panels fixed by a reflection of the
    apartment; ``side_chamber`` names the side to keep.
    """
    n = ap.frame.n
    panel_a, panel_b = (tuple(sorted(w)) for w in wall)
    swaps = [(i, j) for i, j in itertools.combinations(range(n), 2)
             if _panel_fixed_by(ap, panel_a, i, j) and _panel_fixed_by(ap, panel_b, i, j)
             and panel_a != panel_b]
    if not swaps:
        raise ValueError("wall is not invariant under any reflection of the apartment")
    i, j = swaps[0]
    chambers = [s for s in ap.simplices if len(s) == n - 1]
    side = {}
    for ch in chambers:
        order = ap.chamber_order(ch)
        side[ch] = order.index(i) < order.index(j)
    key = tuple(sorted(side_chamber))
    if key not in side:
        raise ValueError("side chamber is not a chamber of the apartment")
    keep = frozenset(ch for ch in chambers if side[ch] == side[key])
    return Root(ap, (i, j), keep, frozenset({panel_a, panel_b}))


def walls(ap):
    """All reflection walls of the apartment as (transposition, panel pair ...)."""
    n = ap.frame.n
    chambers = [s for s in ap.simplices if len(s) == n - 1]
    panels = set()
    for ch in chambers:
        for panel in itertools.combinations(ch, n - 2):
            panels.add(tuple(sorted(panel)))
    out = []
    for i, j in itertools.combinations(range(n), 2):
        fixed = [p for p in sorted(panels) if _panel_fixed_by(ap, p, i, j)]
        out.append(((i, j), fixed))
    return out


@dataclass
class RootGroupVerdict:
    passed: bool
    group_order: int
    checked_chambers: int
    witness: tuple | None  # (matrix, chamber ids) on failure

    def __bool__(self):
        return self.passed


def close_group(ring, generators, cap=GROUP_CLOSURE_CAP):
    """Multiplicative closure of matrix generators over a residue ring."""
    gens = [tuple(tuple(r) for r in g) for g in generators]
    n = len(gens[0]) if gens else 0
    ident = ring.mat_identity(n)
    seen = {ident}
    queue = [ident]
    while queue:
        h = queue.pop()
        for g in gens:
            x = ring.mat_mul(h, g)
            if x not in seen:
                if len(seen) >= cap:
                    raise RuntimeError(f"group closure exceeded cap {cap}")
                seen.add(x)
                queue.append(x)
    return seen


def root_group_check(complex_, root, generators):
    """Verify that the group generated by ``generators`` fixes, pointwise,
    every chamber of the complex having a panel in the interior of the root.

    Returns a verdict carrying the group order and a counterexample
    (element, chamber) when the check fails.
    """
    ap = root.apartment
    ring = ap.frame.ring
    n = ap.frame.n
    elements = close_group(ring, generators)
    interior = root.interior_panels()
    # chambers of the full complex containing an interior panel
    vertex_index = {s: i for i, s in enumerate(complex_.payloads)}
    target_chambers = set()
    full_chambers = [s for s in complex_.simplices if len(s) == n - 1]
    for panel in interior:
        panel_subspaces = {ap.payloads[vid][1] for vid in panel}
        panel_ids = {vertex_index[s] for s in panel_subspaces}
        for ch in full_chambers:
            if panel_ids <= set(ch):
                target_chambers.add(ch)
    checked = 0
    for g in sorted(elements):
        for ch in sorted(target_chambers):
            checked += 1
            for vid in ch:
                s = complex_.payloads[vid]
                if s.apply(g) != s:
                    return RootGroupVerdict(False, len(elements), checked, (g, ch))
    return RootGroupVerdict(True, len(elements), checked, None)


def elementary_unipotent(ring, n, i, j, t):
    """I + t E_ij over the ring."""
    m = [[1 if a == b else 0 for b in range(n)] for a in range(n)]
    m[i][j] = t
    return tuple(tuple(r) for r in m)


def elementary_root_groups(n, q):
    """The root groups {I + t E_ij} paired with their roots in the
    coordinate apartment: the root of (i, j) is the half made of chambers
    whose line ordering puts i before j."""
    ring = q if isinstance(q, ResidueRing) else gf(q)
    ap = Apartment(Frame.coordinate(ring, n))
    chambers = [s for s in ap.simplices if len(s) == n - 1]
    out = []
    for i, j in itertools.permutations(range(n), 2):
        gens = [elementary_unipotent(ring, n, i, j, t) for t in range(1, ring.q)]
        keep = frozenset(ch for ch in chambers
                         if ap.chamber_order(ch).index(i) < ap.chamber_order(ch).index(j))
        wall = frozenset(p for (pair, panels) in walls(ap) if pair == tuple(sorted((i, j)))
                         for p in panels)
        out.append(((i, j), Root(ap, tuple(sorted((i, j))), keep, wall), gens))
    return out
