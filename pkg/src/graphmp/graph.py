"""Undirected graphs, node supports and the (k, g) sparsity model.

A support is represented as a sorted tuple of distinct node ids.
"""
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import ParseError, ValidationError

__all__ = [
    "Graph",
    "DisjointSet",
    "SparsityModel",
    "load_graph",
    "serialize_graph",
    "as_support",
    "support_of",
    "components",
    "gamma",
    "in_model",
    "path_graph",
    "cycle_graph",
    "star_graph",
    "grid_graph",
]


class DisjointSet:
    """Union-find with path halving and union by size."""

    def __init__(self, size):
        self.parent = list(range(size))
        self.size = [1] * size

    def find(self, x):
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a, b):
        """Merge the sets of ``a`` and ``b``; return False if already merged."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True


class Graph:
    """Immutable undirected simple graph on nodes ``0..n-1`` with edge costs.

    Parameters
    ----------
    n : int
        Number of nodes.
    edges : iterable of (u, v) or (u, v, cost)
        Undirected edges; cost defaults to 1.0.
    """

    __slots__ = ("n", "edge_u", "edge_v", "edge_cost", "indptr", "nbr", "nbr_edge")

    def __init__(self, n, edges=()):
        n = int(n)
        if n < 0:
            raise ValidationError("node count must be nonnegative")
        us, vs, cs = [], [], []
        seen = set()
        for e in edges:
            if len(e) == 2:
                u, v = e
                c = 1.0
            elif len(e) == 3:
                u, v, c = e
            else:
                raise ValidationError(f"edge {e!r} must be (u, v) or (u, v, cost)")
            u, v, c = int(u), int(v), float(c)
            if not (0 <= u < n and 0 <= v < n):
                raise ValidationError(f"edge ({u}, {v}) has a node outside [0, {n})")
            if u == v:
                raise ValidationError(f"self-loop at node {u}")
            if not np.isfinite(c) or c < 0:
                raise ValidationError(f"edge ({u}, {v}) has invalid cost {c}")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise ValidationError(f"duplicate edge {key}")
            seen.add(key)
            us.append(u)
            vs.append(v)
            cs.append(c)
        self.n = n
        self.edge_u = _frozen(np.asarray(us, dtype=np.int64))
        self.edge_v = _frozen(np.asarray(vs, dtype=np.int64))
        self.edge_cost = _frozen(np.asarray(cs, dtype=np.float64))

        # CSR adjacency; neighbor lists sorted by neighbor id
        m = len(us)
        ends = np.concatenate([self.edge_u, self.edge_v])
        others = np.concatenate([self.edge_v, self.edge_u])
        eids = np.concatenate([np.arange(m), np.arange(m)])
        order = np.lexsort((others, ends))
        counts = np.bincount(ends, minlength=n) if m else np.zeros(n, dtype=np.int64)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        self.indptr = _frozen(indptr)
        self.nbr = _frozen(others[order].astype(np.int64))
        self.nbr_edge = _frozen(eids[order].astype(np.int64))

    def __setattr__(self, name, value):
        if hasattr(self, name):
            raise AttributeError("Graph is immutable")
        object.__setattr__(self, name, value)

    @property
    def m(self):
        return len(self.edge_u)

    @property
    def edges(self):
        """List of ``(u, v, cost)`` in construction order."""
        return [(int(u), int(v), float(c))
                for u, v, c in zip(self.edge_u, self.edge_v, self.edge_cost)]

    def neighbors(self, u):
        return self.nbr[self.indptr[u]:self.indptr[u + 1]]

    def degree(self, u):
        return int(self.indptr[u + 1] - self.indptr[u])

    def canonical_edges(self):
        """Sorted ``(min, max)`` endpoint pairs."""
        return sorted((min(u, v), max(u, v)) for u, v, _ in self.edges)

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


def _frozen(a):
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SparsityModel:
    """Supports with at most ``k`` nodes forming at most ``g`` components."""

    k: int
    g: int = 1

    def __post_init__(self):
        if int(self.k) != self.k or int(self.g) != self.g:
            raise ValidationError("k and g must be integers")
        if self.g < 1 or self.k < self.g:
            raise ValidationError(f"need 1 <= g <= k, got k={self.k}, g={self.g}")

    @property
    def k_head(self):
        return 2 * self.k

    @property
    def k_tail(self):
        return 5 * self.k

    @property
    def budget(self):
        return self.k - self.g

    def check(self, graph):
        if self.k > graph.n:
            raise ValidationError(f"k={self.k} exceeds node count {graph.n}")
        return self


def load_graph(text):
    """Parse an edge list into a graph with dense node ids.

    Each non-comment line is ``u v`` or ``u v cost``. Original ids are mapped
    to ``0..n-1`` in sorted order.

    Returns
    -------
    graph : Graph
    ids : numpy.ndarray
        ``ids[i]`` is the original id of node ``i``.
    """
    raw = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise ParseError(f"expected 'u v' or 'u v cost', got {line!r}", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
            c = float(parts[2]) if len(parts) == 3 else 1.0
        except ValueError:
            raise ParseError(f"cannot parse {line!r}", lineno) from None
        if u == v:
            raise ValidationError(f"line {lineno}: self-loop at node {u}")
        if not np.isfinite(c) or c < 0:
            raise ValidationError(f"line {lineno}: invalid edge cost {parts[2]}")
        raw.append((u, v, c))
    if not raw:
        raise ValidationError("empty graph: no edges found")
    ids = np.array(sorted({u for u, _, _ in raw} | {v for _, v, _ in raw}), dtype=np.int64)
    index = {int(x): i for i, x in enumerate(ids)}
    graph = Graph(len(ids), [(index[u], index[v], c) for u, v, c in raw])
    return graph, ids


def serialize_graph(graph, ids=None):
    """Edge-list text; ``load_graph`` reads it back to the same edge set."""
    lines = []
    for u, v, c in graph.edges:
        if ids is not None:
            u, v = int(ids[u]), int(ids[v])
        lines.append(f"{u} {v}" if c == 1.0 else f"{u} {v} {c!r}")
    return "\n".join(lines) + "\n"


def as_support(nodes, n=None):
    """Validate ``nodes`` and return them as a sorted duplicate-free tuple."""
    s = tuple(sorted({int(i) for i in nodes}))
    if s and (s[0] < 0 or (n is not None and s[-1] >= n)):
        raise ValidationError(f"support has node ids outside [0, {n})")
    return s


def support_of(x, tol=0.0):
    """Indices with ``|x_i| > tol``."""
    if tol < 0:
        raise ValidationError("tol must be nonnegative")
    return tuple(int(i) for i in np.flatnonzero(np.abs(np.asarray(x)) > tol))


def components(graph, s):
    """Connected components of the subgraph induced by ``s``.

    Components are sorted tuples, ordered by their smallest node.
    """
    s = as_support(s, graph.n)
    inside = np.zeros(graph.n, dtype=bool)
    inside[list(s)] = True
    seen = np.zeros(graph.n, dtype=bool)
    indptr, nbr = graph.indptr, graph.nbr
    out = []
    for root in s:
        if seen[root]:
            continue
        seen[root] = True
        comp = [root]
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for w in nbr[indptr[u]:indptr[u + 1]]:
                if inside[w] and not seen[w]:
                    seen[w] = True
                    comp.append(int(w))
                    queue.append(w)
        out.append(tuple(sorted(comp)))
    return out


def gamma(graph, s):
    """Number of connected components of the subgraph induced by ``s``."""
    s = as_support(s, graph.n)
    if not s:
        return 0
    local = {u: i for i, u in enumerate(s)}
    ds = DisjointSet(len(s))
    count = len(s)
    indptr, nbr = graph.indptr, graph.nbr
    for u in s:
        for w in nbr[indptr[u]:indptr[u + 1]]:
            j = local.get(int(w))
            if j is not None and w > u and ds.union(local[u], j):
                count -= 1
    return count


def in_model(graph, s, model):
    """True iff ``|s| <= k`` and ``s`` induces at most ``g`` components."""
    s = as_support(s, graph.n)
    return len(s) <= model.k and gamma(graph, s) <= model.g


def path_graph(n):
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n):
    return Graph(n, [(i, (i + 1) % n) for i in range(n)] if n > 2 else
                 [(i, i + 1) for i in range(n - 1)])


def star_graph(leaves):
    """Center 0 joined to nodes ``1..leaves``."""
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def grid_graph(rows, cols):
    """4-connected grid; node ``r * cols + c`` sits at row ``r``, column ``c``."""
    edges = []
    for r in range(rows):
        for c in range(cols):
            u = r * cols + c
            if c + 1 < cols:
                edges.append((u, u + 1))
            if r + 1 < rows:
                edges.append((u, u + cols))
    return Graph(rows * cols, edges)
