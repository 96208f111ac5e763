"""Finite simplicial sets and colored directed graphs.

These are the shared containers: balls of the affine building, flag
complexes, apartments and quotient complexes all materialize as a
``SimplicialSet`` (vertices with payloads, simplices as sorted id
tuples, closed under faces), while 1-skeleta travel as a
``ColoredGraph`` (directed edges with color-shift labels).
"""

from __future__ import annotations

import json
from itertools import combinations

import numpy as np
from scipy.sparse import csr_matrix


class SimplicialSet:
    """Vertices with payloads plus a face-closed set of simplices."""

    def __init__(self, payloads, simplices, close_faces=True):
        self.payloads = list(payloads)
        n = len(self.payloads)
        simps = set()
        for s in simplices:
            t = tuple(sorted(set(s)))
            if not t:
                continue
            if t[0] < 0 or t[-1] >= n:
                raise ValueError(f"simplex {t} references unknown vertex ids")
            simps.add(t)
        for i in range(n):
            simps.add((i,))
        if close_faces:
            closed = set()
            for s in simps:
                for k in range(1, len(s) + 1):
                    closed.update(combinations(s, k))
            simps = closed
        self.simplices = frozenset(simps)
        self._adj = None

    @property
    def n_vertices(self):
        return len(self.payloads)

    @property
    def dimension(self):
        return max((len(s) for s in self.simplices), default=0) - 1

    def simplices_of_dim(self, k):
        return sorted(s for s in self.simplices if len(s) == k + 1)

    def edges(self):
        return self.simplices_of_dim(1)

    def maximal_simplices(self):
        simps = self.simplices
        out = []
        for s in simps:
            ss = set(s)
            if not any(len(t) > len(s) and ss.issubset(t) for t in simps):
                out.append(s)
        return sorted(out)

    def adjacency(self):
        """Vertex id -> sorted list of neighbor ids (cached)."""
        if self._adj is None:
            adj = {i: set() for i in range(self.n_vertices)}
            for u, v in self.edges():
                adj[u].add(v)
                adj[v].add(u)
            self._adj = {i: sorted(s) for i, s in adj.items()}
        return self._adj

    def link_of(self, vid):
        """Link of a vertex within this complex (ids renumbered, payloads kept)."""
        star = [s for s in self.simplices if vid in s and len(s) > 1]
        members = sorted({i for s in star for i in s if i != vid})
        remap = {old: new for new, old in enumerate(members)}
        simps = [tuple(remap[i] for i in s if i != vid) for s in star]
        return SimplicialSet([self.payloads[i] for i in members], simps, close_faces=False)

    def subcomplex(self, ids):
        keep = sorted(set(ids))
        remap = {old: new for new, old in enumerate(keep)}
        kset = set(keep)
        simps = [tuple(remap[i] for i in s) for s in self.simplices if set(s) <= kset]
        return SimplicialSet([self.payloads[i] for i in keep], simps, close_faces=False)

    # -- export

    def to_json_dict(self, payload_encoder=None):
        if payload_encoder is None:
            payload_encoder = _default_payload_encoder
        return {
            "vertices": [{"id": i, "payload": payload_encoder(p)}
                         for i, p in enumerate(self.payloads)],
            "simplices": [list(s) for s in sorted(self.simplices)],
            "dimension": self.dimension,
        }

    def to_json(self, payload_encoder=None):
        return json.dumps(self.to_json_dict(payload_encoder), sort_keys=True)

    def export_edge_list(self, shift_fn=None):
        """One line per undirected edge: "u v shift" (shift 0 when untyped)."""
        lines = []
        for u, v in self.edges():
            shift = shift_fn(self.payloads[u], self.payloads[v]) if shift_fn else 0
            lines.append(f"{u} {v} {shift}")
        return "\n".join(lines) + ("\n" if lines else "")


def _default_payload_encoder(p):
    if p is None:
        return None
    enc = getattr(p, "to_json_dict", None)
    if enc is not None:
        return enc()
    return str(p)


class ColoredGraph:
    """Directed multigraph with color-shift edge labels.

    Edges are parallel arrays (heads, tails, shifts); an optional
    ``edge_length`` annotates the metric length of one edge.
    """

    def __init__(self, n, edges, edge_length=1.0):
        self.n = int(n)
        tr = [(int(u), int(v), int(s)) for u, v, s in edges]
        self.heads = np.array([e[0] for e in tr], dtype=np.int64)
        self.tails = np.array([e[1] for e in tr], dtype=np.int64)
        self.shifts = np.array([e[2] for e in tr], dtype=np.int64)
        if len(self.heads) and (self.heads.max() >= self.n or self.tails.max() >= self.n):
            raise ValueError("edge endpoint out of range")
        self.edge_length = float(edge_length)

    @classmethod
    def from_simplicial(cls, X, shift_fn=None, undirected_shift=None):
        """Both directions of every edge of X; shifts from shift_fn(u_payload, v_payload)."""
        edges = []
        for u, v in X.edges():
            if shift_fn is None:
                s = t = 0
            else:
                s = shift_fn(X.payloads[u], X.payloads[v])
                t = shift_fn(X.payloads[v], X.payloads[u])
            edges.append((u, v, s))
            edges.append((v, u, t))
        return cls(X.n_vertices, edges)

    @classmethod
    def from_undirected_pairs(cls, n, pairs):
        edges = []
        for u, v in pairs:
            edges.append((u, v, 0))
            edges.append((v, u, 0))
        return cls(n, edges)

    @classmethod
    def from_edge_list_text(cls, text, directed=False):
        """Parse "u v shift" lines; undirected input is symmetrized."""
        edges = []
        nmax = -1
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise ValueError(f"malformed edge line: {line!r}")
            u, v = int(parts[0]), int(parts[1])
            s = int(parts[2]) if len(parts) == 3 else 0
            edges.append((u, v, s))
            if not directed:
                edges.append((v, u, -s))
            nmax = max(nmax, u, v)
        return cls(nmax + 1, edges)

    @property
    def n_edges(self):
        return len(self.heads)

    def out_degrees(self):
        return np.bincount(self.heads, minlength=self.n)

    def undirected_pairs(self):
        """Deduplicated undirected edge pairs (u < v), self-loops dropped."""
        seen = set()
        for u, v in zip(self.heads, self.tails):
            if u == v:
                continue
            seen.add((min(u, v), max(u, v)))
        return sorted(seen)

    def undirected_adjacency(self):
        """Simple symmetric 0/1 adjacency as CSR."""
        pairs = self.undirected_pairs()
        if not pairs:
            return csr_matrix((self.n, self.n), dtype=np.int8)
        us = np.array([p[0] for p in pairs] + [p[1] for p in pairs])
        vs = np.array([p[1] for p in pairs] + [p[0] for p in pairs])
        data = np.ones(len(us), dtype=np.int8)
        return csr_matrix((data, (us, vs)), shape=(self.n, self.n))

    def directed_adjacency(self, shift=None, dtype=np.float64):
        """Adjacency counting matrix of directed edges, optionally one shift class."""
        if shift is None:
            mask = np.ones(len(self.heads), dtype=bool)
        else:
            mask = self.shifts == shift
        us, vs = self.heads[mask], self.tails[mask]
        data = np.ones(len(us), dtype=dtype)
        return csr_matrix((data, (us, vs)), shape=(self.n, self.n))

    def shift_values(self):
        return sorted(set(int(s) for s in self.shifts))

    def export_edge_list(self):
        lines = [f"{u} {v} {s}" for u, v, s in
                 sorted(zip(self.heads.tolist(), self.tails.tolist(), self.shifts.tolist()))]
        return "\n".join(lines) + ("\n" if lines else "")

    def __repr__(self):
        return f"ColoredGraph(n={self.n}, edges={self.n_edges})"
