"""Graphs and reversible nearest-neighbour walk kernels.

Vertices carry dense integer ids assigned on first touch; infinite
families (line, z2, regular tree) materialize neighbours lazily from
vertex labels, so balls of any radius can be taken without building the
whole graph.  Conductances are stored as exact fractions so that the
reversibility identity c(x)p(x,y) = c(y)p(y,x) holds literally.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import GraphSpecError, IsolatedVertexError

__all__ = [
    "Graph",
    "WalkKernel",
    "FiniteKernel",
    "build_graph",
    "explicit_graph",
    "ball",
    "kernel",
    "truncate_kernel",
    "symmetrize",
]


class Graph:
    """A graph with symmetric adjacency and positive edge conductances.

    ``neighbor_fn(label)`` yields ``(label, conductance)`` pairs and is the
    single source of truth for adjacency; everything else is cached.
    """

    def __init__(self, family, neighbor_fn, finite_labels=None):
        self.family = family
        self._neighbor_fn = neighbor_fn
        self._labels = []
        self._index = {}
        self._adj = {}   # id -> tuple of neighbour ids, sorted
        self._cond = {}  # (min_id, max_id) -> Fraction
        if finite_labels is not None:
            self.is_finite = True
            for lab in finite_labels:
                self._assign(lab)
            for v in range(len(self._labels)):
                self.neighbors(v)
            self._check_symmetry()
        else:
            self.is_finite = False

    # -- id / label bookkeeping -------------------------------------------

    def _assign(self, label):
        idx = self._index.get(label)
        if idx is None:
            idx = len(self._labels)
            self._labels.append(label)
            self._index[label] = idx
        return idx

    def label_of(self, v):
        return self._labels[v]

    def id_of(self, label):
        if self.is_finite:
            if label not in self._index:
                raise GraphSpecError(f"unknown vertex label {label!r}")
            return self._index[label]
        return self._assign(label)

    @property
    def n_vertices(self):
        if not self.is_finite:
            raise GraphSpecError("infinite graph has no vertex count")
        return len(self._labels)

    # -- adjacency ---------------------------------------------------------

    def neighbors(self, v):
        """Sorted neighbour ids of vertex ``v``; materializes lazily."""
        adj = self._adj.get(v)
        if adj is not None:
            return adj
        label = self._labels[v]
        ids = []
        for nlab, c in sorted(self._neighbor_fn(label)):
            if nlab == label:
                raise GraphSpecError(f"self-loop at {label!r}")
            c = Fraction(c)
            if c <= 0:
                raise GraphSpecError(
                    f"nonpositive conductance {c} on edge {label!r}-{nlab!r}"
                )
            u = self._assign(nlab)
            ids.append(u)
            key = (v, u) if v < u else (u, v)
            prev = self._cond.get(key)
            if prev is not None and prev != c:
                raise GraphSpecError(
                    f"asymmetric conductance on edge {label!r}-{nlab!r}"
                )
            self._cond[key] = c
        adj = tuple(sorted(ids))
        self._adj[v] = adj
        return adj

    def degree(self, v):
        return len(self.neighbors(v))

    def conductance(self, x, y):
        """c(x,y) as an exact Fraction; 0 if not adjacent."""
        self.neighbors(x)
        key = (x, y) if x < y else (y, x)
        return self._cond.get(key, Fraction(0))

    def vertex_weight(self, x):
        """c(x) = sum of incident conductances."""
        return sum((self.conductance(x, y) for y in self.neighbors(x)),
                   Fraction(0))

    def _check_symmetry(self):
        for v in range(len(self._labels)):
            for u in self._adj[v]:
                if v not in self._adj[u]:
                    raise GraphSpecError(
                        f"asymmetric adjacency: {self.label_of(v)!r} -> "
                        f"{self.label_of(u)!r} has no reverse edge"
                    )


# -- graph families --------------------------------------------------------


def explicit_graph(vertices, edges):
    """Finite graph from a label list and an edge list.

    Edges are ``[i, j]`` or ``[i, j, conductance]`` with indices into
    ``vertices``.  Adjacency is symmetrized from the given edges; listing
    an edge in both directions with different conductances is an error.
    """
    n = len(vertices)
    if len(set(vertices)) != n:
        raise GraphSpecError("duplicate vertex labels")
    adj = {lab: [] for lab in vertices}
    seen = {}
    for e in edges:
        if len(e) == 2:
            i, j = e
            c = Fraction(1)
        elif len(e) == 3:
            i, j = e[0], e[1]
            c = Fraction(e[2])
        else:
            raise GraphSpecError(f"bad edge entry {e!r}")
        if not (0 <= i < n and 0 <= j < n):
            raise GraphSpecError(f"edge {e!r} references unknown vertex")
        if i == j:
            raise GraphSpecError(f"self-loop on vertex index {i}")
        if c <= 0:
            raise GraphSpecError(f"nonpositive conductance on edge {e!r}")
        key = (min(i, j), max(i, j))
        if key in seen:
            if seen[key] != c:
                raise GraphSpecError(f"conflicting conductance on edge {e!r}")
            continue
        seen[key] = c
        adj[vertices[i]].append((vertices[j], c))
        adj[vertices[j]].append((vertices[i], c))

    return Graph("explicit", lambda lab: adj[lab], finite_labels=vertices)


def _line_neighbors(lab):
    return [(lab - 1, 1), (lab + 1, 1)]


def _z2_neighbors(lab):
    i, j = lab
    return [((i - 1, j), 1), ((i + 1, j), 1), ((i, j - 1), 1), ((i, j + 1), 1)]


def _tree_neighbors_factory(d):
    def nbrs(lab):
        out = []
        if lab:
            out.append((lab[:-1], 1))
            children = d - 1
        else:
            children = d
        for k in range(children):
            out.append((lab + (k,), 1))
        return out

    return nbrs


def build_graph(spec):
    """Build a graph from a specification string.

    Supported: ``explicit:<json path>``, ``line``, ``cycle:<n>``,
    ``grid:<w>x<h>``, ``z2``, ``tree:<degree>``.
    """
    name, _, arg = spec.partition(":")
    if name == "line":
        return Graph("line", _line_neighbors)
    if name == "z2":
        return Graph("z2", _z2_neighbors)
    if name == "cycle":
        try:
            n = int(arg)
        except ValueError:
            raise GraphSpecError(f"bad cycle size {arg!r}") from None
        if n < 3:
            raise GraphSpecError("cycle needs at least 3 vertices")
        labels = list(range(n))
        return Graph(
            "cycle",
            lambda k: [((k - 1) % n, 1), ((k + 1) % n, 1)],
            finite_labels=labels,
        )
    if name == "grid":
        try:
            w, h = (int(t) for t in arg.split("x"))
        except ValueError:
            raise GraphSpecError(f"bad grid size {arg!r}") from None
        if w < 1 or h < 1:
            raise GraphSpecError("grid dimensions must be positive")

        def nbrs(lab):
            i, j = lab
            out = []
            for di, dj in ((-1, 0), (1, 0), (0, -1), (0, 1)):
                ii, jj = i + di, j + dj
                if 0 <= ii < w and 0 <= jj < h:
                    out.append(((ii, jj), 1))
            return out

        labels = [(i, j) for i in range(w) for j in range(h)]
        return Graph("grid", nbrs, finite_labels=labels)
    if name == "tree":
        try:
            d = int(arg)
        except ValueError:
            raise GraphSpecError(f"bad tree degree {arg!r}") from None
        if d < 2:
            raise GraphSpecError("tree degree must be >= 2")
        return Graph("tree", _tree_neighbors_factory(d))
    if name == "explicit":
        with open(arg) as fh:
            data = json.load(fh)
        try:
            vertices = data["vertices"]
            edges = data["edges"]
        except (TypeError, KeyError):
            raise GraphSpecError(
                f"{arg}: expected object with 'vertices' and 'edges'"
            ) from None
        # JSON labels may be lists; make them hashable.
        vertices = [tuple(v) if isinstance(v, list) else v for v in vertices]
        return explicit_graph(vertices, edges)
    raise GraphSpecError(f"unknown graph family {name!r}")


# -- balls -----------------------------------------------------------------


def ball(g, root, radius):
    """Vertices at graph distance <= radius from root, BFS order."""
    if radius < 0:
        raise GraphSpecError("radius must be nonnegative")
    seen = {root}
    order = [root]
    frontier = deque([(root, 0)])
    while frontier:
        v, d = frontier.popleft()
        if d == radius:
            continue
        for u in g.neighbors(v):
            if u not in seen:
                seen.add(u)
                order.append(u)
                frontier.append((u, d + 1))
    return order


# -- kernels ---------------------------------------------------------------


class WalkKernel:
    """Nearest-neighbour transition probabilities p(x,y) = c(x,y)/c(x)."""

    def __init__(self, graph):
        self.graph = graph
        self._weights = {}
        if graph.is_finite:
            for v in range(graph.n_vertices):
                self.weight(v)

    def weight(self, x):
        w = self._weights.get(x)
        if w is None:
            w = self.graph.vertex_weight(x)
            if w == 0:
                raise IsolatedVertexError(
                    f"vertex {self.graph.label_of(x)!r} is isolated"
                )
            self._weights[x] = w
        return w

    def p_frac(self, x, y):
        return self.graph.conductance(x, y) / self.weight(x)

    def p(self, x, y):
        return float(self.p_frac(x, y))

    def neighbors(self, x):
        return self.graph.neighbors(x)


def kernel(g):
    return WalkKernel(g)


@dataclass
class FiniteKernel:
    """Truncation T_A of a walk kernel to an ordered finite vertex list.

    Rows are substochastic: transitions leaving A are dropped (absorbed).
    """

    vertices: tuple
    matrix: np.ndarray
    weights: np.ndarray
    kernel: WalkKernel
    index: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.index:
            self.index = {v: i for i, v in enumerate(self.vertices)}

    def matrix_frac(self):
        """Entries as exact fractions (same layout as ``matrix``)."""
        n = len(self.vertices)
        rows = [[Fraction(0)] * n for _ in range(n)]
        for i, v in enumerate(self.vertices):
            for u in self.kernel.neighbors(v):
                j = self.index.get(u)
                if j is not None:
                    rows[i][j] = self.kernel.p_frac(v, u)
        return rows


def truncate_kernel(k, A):
    """FiniteKernel on vertex list A; entries p(y,z) for y,z in A only."""
    A = list(A)
    if not A:
        raise GraphSpecError("truncation set must be nonempty")
    index = {v: i for i, v in enumerate(A)}
    if len(index) != len(A):
        raise GraphSpecError("duplicate vertices in truncation set")
    n = len(A)
    M = np.zeros((n, n))
    w = np.empty(n)
    for i, v in enumerate(A):
        w[i] = float(k.weight(v))
        for u in k.neighbors(v):
            j = index.get(u)
            if j is not None:
                M[i, j] = k.p(v, u)
    return FiniteKernel(tuple(A), M, w, k, index)


def symmetrize(fk):
    """Symmetric matrix with the same spectrum and diagonal powers as T_A.

    S(y,z) = sqrt(c(y)/c(z)) p(y,z) = sqrt(p(y,z) p(z,y)); computed in the
    product form so S is symmetric to the last bit.
    """
    M = fk.matrix
    return np.sqrt(M * M.T)
