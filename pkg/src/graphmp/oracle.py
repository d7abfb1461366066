"""Brute-force ground truth for small graphs.

Everything here enumerates supports explicitly and is exponential in the
graph size, so graphs are capped at ``MAX_NODES`` nodes.
"""
from itertools import combinations

import numpy as np

from .errors import OracleSizeError
from .graph import SparsityModel, gamma

__all__ = [
    "MAX_NODES",
    "enumerate_connected",
    "enumerate_model_supports",
    "ModelTable",
    "exact_projection",
    "exact_head_opt",
    "exact_best_subgraph",
]

MAX_NODES = 25


def _check_size(graph):
    if graph.n > MAX_NODES:
        raise OracleSizeError(
            f"exact oracle refuses graphs above {MAX_NODES} nodes (got {graph.n})")


def enumerate_connected(graph, k):
    """All connected node sets with ``1 <= |S| <= k``, each exactly once.

    Extension-based enumeration: every set is grown from its smallest node,
    adding only exclusive neighbours larger than that node.
    """
    _check_size(graph)
    nbrs = [set(int(w) for w in graph.neighbors(u)) for u in range(graph.n)]
    out = []

    def extend(sub, closed, ext, v):
        out.append(tuple(sorted(sub)))
        if len(sub) == k:
            return
        ext = sorted(ext)
        while ext:
            w = ext.pop(0)
            fresh = {u for u in nbrs[w] if u > v and u not in closed}
            extend(sub | {w}, closed | nbrs[w] | {w}, ext + sorted(fresh - set(ext)), v)

    for v in range(graph.n):
        extend({v}, nbrs[v] | {v}, {u for u in nbrs[v] if u > v}, v)
    out.sort(key=lambda s: (len(s), s))
    return out


def enumerate_model_supports(graph, model):
    """Every nonempty S with ``|S| <= k`` and at most ``g`` components.

    Ordered by size, then lexicographically.
    """
    _check_size(graph)
    k = min(model.k, graph.n)
    if model.g == 1:
        return enumerate_connected(graph, k)
    out = []
    for size in range(1, k + 1):
        for s in combinations(range(graph.n), size):
            if gamma(graph, s) <= model.g:
                out.append(s)
    return out


class ModelTable:
    """Indicator matrix of all model supports, for many queries on one graph."""

    def __init__(self, graph, model):
        self.graph = graph
        self.model = model
        self.supports = enumerate_model_supports(graph, model)
        ind = np.zeros((len(self.supports), graph.n))
        for r, s in enumerate(self.supports):
            ind[r, list(s)] = 1.0
        self.indicator = ind

    def projection(self, x):
        w2 = np.asarray(x, dtype=np.float64) ** 2
        resid2 = (1.0 - self.indicator) @ w2
        r = int(np.argmin(resid2))
        return self.supports[r], float(np.sqrt(max(resid2[r], 0.0)))

    def head_opt(self, x):
        w2 = np.asarray(x, dtype=np.float64) ** 2
        if not self.supports:
            return 0.0
        return float(np.sqrt(np.max(self.indicator @ w2)))


def exact_projection(graph, x, model):
    """Model support minimizing ``||x - x_S||``, with its residual.

    Ties go to the smaller support, then the lexicographically first.
    """
    return ModelTable(graph, model).projection(x)


def exact_head_opt(graph, x, model):
    """``max ||x_S||`` over the model."""
    return ModelTable(graph, model).head_opt(x)


def exact_best_subgraph(score, graph, k):
    """Connected S with ``|S| <= k`` maximizing ``score(S)``.

    ``score`` maps a sorted node tuple to a real. Ties go to the smaller
    support, then the lexicographically first.
    """
    best, best_val = None, None
    for s in enumerate_model_supports(graph, SparsityModel(min(k, graph.n), 1)):
        val = score(s)
        if best_val is None or val > best_val:
            best, best_val = s, val
    return best, best_val
