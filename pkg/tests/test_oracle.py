import numpy as np
import pytest

from graphmp.errors import OracleSizeError
from graphmp.graph import (Graph, SparsityModel, cycle_graph, grid_graph, in_model, path_graph,
                           star_graph)
from graphmp.objectives import NodeData, ebp_set_score, ems_set_score
from graphmp.oracle import (ModelTable, enumerate_connected, enumerate_model_supports,
                            exact_best_subgraph, exact_head_opt, exact_projection)


def triangle():
    return Graph(3, [(0, 1), (1, 2), (0, 2)])


def test_enumerate_examples():
    assert enumerate_model_supports(path_graph(3), SparsityModel(2)) == [
        (0,), (1,), (2,), (0, 1), (1, 2)]
    g = grid_graph(2, 3)
    assert enumerate_model_supports(g, SparsityModel(1)) == [(i,) for i in range(6)]
    assert len(enumerate_model_supports(triangle(), SparsityModel(3))) == 7


@pytest.mark.parametrize("graph", [path_graph(7), cycle_graph(8), grid_graph(3, 3),
                                   star_graph(6), triangle(), Graph(5, [(0, 1), (3, 4)])])
@pytest.mark.parametrize("k,g", [(1, 1), (2, 1), (3, 1), (3, 2), (4, 3), (9, 1)])
def test_enumerate_matches_bitmask_recount(graph, k, g):
    if g > k:
        return
    m = SparsityModel(k, g)
    got = enumerate_model_supports(graph, m)
    assert len(got) == len(set(got))
    expected = [s for s in (tuple(i for i in range(graph.n) if mask >> i & 1)
                            for mask in range(1, 1 << graph.n)) if in_model(graph, s, m)]
    assert sorted(got) == sorted(expected)
    assert got == sorted(got, key=lambda s: (len(s), s))


def test_connected_enumeration_reaches_25_nodes():
    g = path_graph(25)
    assert len(enumerate_connected(g, 3)) == 25 + 24 + 23


def test_size_cap():
    with pytest.raises(OracleSizeError, match="25"):
        enumerate_model_supports(path_graph(26), SparsityModel(1))
    with pytest.raises(OracleSizeError):
        exact_projection(path_graph(30), np.ones(30), SparsityModel(1))


def test_projection_examples():
    g = path_graph(4)
    x = np.array([0.0, 1.0, 2.0, 0.0])
    assert exact_projection(g, x, SparsityModel(2)) == ((1, 2), 0.0)
    s, r = exact_projection(g, np.array([5.0, 0, 0, 5.0]), SparsityModel(2))
    assert r == 5.0 and s == (0,)
    assert exact_projection(g, np.zeros(4), SparsityModel(2)) == ((0,), 0.0)


def test_head_examples():
    assert exact_head_opt(path_graph(3), np.array([3.0, 0, 4.0]), SparsityModel(1)) == 4.0
    assert exact_head_opt(path_graph(3), np.zeros(3), SparsityModel(1)) == 0.0
    x = np.array([1.0, -2.0, 0.0, 3.0, 1.0])
    g = Graph(5, [(0, 1), (3, 4)])
    assert exact_head_opt(g, x, SparsityModel(5, 5)) == pytest.approx(np.linalg.norm(x))


def test_projection_identity_and_complement():
    rng = np.random.default_rng(0)
    g = grid_graph(3, 4)
    for m in (SparsityModel(3, 1), SparsityModel(4, 2)):
        table = ModelTable(g, m)
        for _ in range(100):
            x = rng.standard_normal(12)
            s, r = table.projection(x)
            assert r ** 2 + np.sum(x[list(s)] ** 2) == pytest.approx(np.sum(x ** 2))
            assert table.head_opt(x) ** 2 == pytest.approx(np.sum(x ** 2) - r ** 2)


def test_best_subgraph_examples():
    d = NodeData(feature=np.array([0.1, 0.9, 0.9, 0.1]))
    s, v = exact_best_subgraph(lambda s: ems_set_score(d, s), path_graph(4), 2)
    assert s == (1, 2) and v == pytest.approx(1.62)
    d = NodeData(feature=np.array([0.0, 0.0, 0.7, 0.0]))
    assert exact_best_subgraph(lambda s: ems_set_score(d, s), path_graph(4), 1)[0] == (2,)
    d = NodeData(observed=np.array([1.0, 2.0, 3.0]), expected=np.array([1.0, 2.0, 3.0]))
    assert exact_best_subgraph(lambda s: ebp_set_score(d, s), path_graph(3), 2) == ((0,), 0.0)
