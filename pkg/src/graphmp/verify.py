"""Oracle comparison suite on small built-in graphs."""
import math

import numpy as np

from .graph import SparsityModel, cycle_graph, grid_graph, path_graph, star_graph
from .oracle import ModelTable
from .projections import head_approx, tail_approx
from .solver import C_HEAD, C_TAIL

__all__ = ["small_corpus", "factor_check", "run_verify"]

SLACK = 1e-12


def small_corpus():
    """Named graphs with at most 10 nodes, paired with model parameters."""
    return [
        ("path8", path_graph(8), SparsityModel(2, 1)),
        ("path10", path_graph(10), SparsityModel(2, 2)),
        ("cycle9", cycle_graph(9), SparsityModel(2, 1)),
        ("cycle10", cycle_graph(10), SparsityModel(1, 1)),
        ("grid3x3", grid_graph(3, 3), SparsityModel(2, 1)),
        ("grid2x5", grid_graph(2, 5), SparsityModel(3, 2)),
        ("star9", star_graph(9), SparsityModel(2, 1)),
        ("star7", star_graph(7), SparsityModel(3, 2)),
    ]


def factor_check(graph, model, xs):
    """Count head and tail factor violations against the exact optimum.

    Both references are exact optima over M(k, g) itself; returns
    ``(head_violations, tail_violations)``.
    """
    ref = ModelTable(graph, model)
    bad_head = bad_tail = 0
    for x in xs:
        w2 = x * x
        h = head_approx(graph, x, model)
        if math.sqrt(w2[list(h)].sum()) < C_HEAD * ref.head_opt(x) - SLACK:
            bad_head += 1
        t = tail_approx(graph, x, model)
        rest = np.ones(graph.n, dtype=bool)
        rest[list(t)] = False
        resid = math.sqrt(w2[rest].sum())
        if resid > C_TAIL * ref.projection(x)[1] + SLACK:
            bad_tail += 1
    return bad_head, bad_tail


def run_verify(seed=0, trials=25):
    """List of ``(name, passed, detail)`` lines."""
    rng = np.random.default_rng(seed)
    lines = []
    for name, graph, model in small_corpus():
        xs = [rng.standard_normal(graph.n) * (rng.random(graph.n) < 0.6) for _ in range(trials)]
        bh, bt = factor_check(graph, model, xs)
        lines.append((f"{name} head factor", bh == 0, f"{bh}/{trials} violations"))
        lines.append((f"{name} tail factor", bt == 0, f"{bt}/{trials} violations"))
    return lines
