import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from graphmp.errors import ParseError, ValidationError
from graphmp.graph import (DisjointSet, Graph, SparsityModel, as_support, components,
                           cycle_graph, gamma, grid_graph, in_model, load_graph, path_graph,
                           serialize_graph, star_graph, support_of)


def test_load_path():
    g, ids = load_graph("0 1\n1 2")
    assert g.n == 3 and g.m == 2
    assert g.canonical_edges() == [(0, 1), (1, 2)]
    assert all(c == 1.0 for _, _, c in g.edges)
    assert list(ids) == [0, 1, 2]


def test_load_empty_is_error():
    with pytest.raises(ValidationError, match="empty"):
        load_graph("")
    with pytest.raises(ValidationError):
        load_graph("# only a comment\n\n")


def test_load_remaps_sorted_ids():
    g, ids = load_graph("5 9\n9 7")
    assert list(ids) == [5, 7, 9]
    # 5->0, 7->1, 9->2: path 0-2-1
    assert g.canonical_edges() == [(0, 2), (1, 2)]


def test_load_errors_carry_line_numbers():
    with pytest.raises(ParseError, match="line 2"):
        load_graph("0 1\n1 x\n")
    with pytest.raises(ParseError, match="line 1"):
        load_graph("0 1 2 3\n")
    with pytest.raises(ValidationError, match="self-loop"):
        load_graph("0 1\n2 2\n")
    with pytest.raises(ValidationError, match="cost"):
        load_graph("0 1 -1\n")


def test_load_comments_and_costs():
    g, _ = load_graph("# header\n0 1 2.5\n\n1 2\n")
    assert g.edges == [(0, 1, 2.5), (1, 2, 1.0)]


def test_graph_rejects_bad_edges():
    with pytest.raises(ValidationError):
        Graph(2, [(0, 2)])
    with pytest.raises(ValidationError):
        Graph(2, [(0, 1), (1, 0)])
    with pytest.raises(ValidationError):
        Graph(2, [(1, 1)])


def test_graph_is_immutable():
    g = path_graph(3)
    with pytest.raises(AttributeError):
        g.n = 4
    with pytest.raises(ValueError):
        g.edge_cost[0] = 5.0


def test_neighbors_sorted():
    g = star_graph(4)
    assert list(g.neighbors(0)) == [1, 2, 3, 4]
    assert g.degree(3) == 1


@pytest.mark.parametrize("s,expected", [((0, 2), 2), ((0, 1, 2), 1), ((), 0)])
def test_gamma_path(s, expected):
    assert gamma(path_graph(3), s) == expected


def test_gamma_cycle():
    assert gamma(cycle_graph(4), {0, 1, 3}) == 1


def test_in_model_examples():
    p = path_graph(3)
    assert not in_model(p, {0, 2}, SparsityModel(2, 1))
    assert in_model(p, {1, 2}, SparsityModel(2, 1))
    assert in_model(star_graph(4), {1, 2}, SparsityModel(3, 2))


def test_support_of_examples():
    assert support_of([0, 0, 0]) == ()
    assert support_of([1e-12, 2, 0], tol=1e-9) == (1,)
    assert support_of([-3, 0, 0.5]) == (0, 2)
    with pytest.raises(ValidationError):
        support_of([1.0], tol=-1)


def test_as_support_validates():
    assert as_support([3, 1, 3]) == (1, 3)
    with pytest.raises(ValidationError):
        as_support([5], n=3)


def test_model_validation():
    with pytest.raises(ValidationError):
        SparsityModel(2, 3)
    with pytest.raises(ValidationError):
        SparsityModel(3, 0)
    m = SparsityModel(4, 2)
    assert (m.k_head, m.k_tail, m.budget) == (8, 20, 2)
    with pytest.raises(ValidationError):
        SparsityModel(5).check(path_graph(3))


def test_grid_layout():
    g = grid_graph(2, 3)
    assert g.n == 6 and g.m == 7
    assert list(g.neighbors(4)) == [1, 3, 5]


def test_disjoint_set():
    ds = DisjointSet(4)
    assert ds.union(0, 1) and ds.union(2, 3)
    assert not ds.union(1, 0)
    assert ds.find(0) == ds.find(1) != ds.find(2)


def _random_graph(rng, n, p):
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p])


def test_gamma_matches_bfs_recount():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        n = int(rng.integers(1, 16))
        g = _random_graph(rng, n, rng.uniform(0.05, 0.5))
        s = [i for i in range(n) if rng.random() < 0.5]
        comps = components(g, s)
        assert gamma(g, s) == len(comps) <= len(s)
        assert sorted(i for c in comps for i in c) == sorted(s)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.integers(1, 6),
       st.integers(0, 4), st.integers(0, 4))
def test_in_model_monotone(seed, k, g, dk, dg):
    rng = np.random.default_rng(seed)
    graph = _random_graph(rng, 10, 0.3)
    s = [i for i in range(10) if rng.random() < 0.4]
    g = min(g, k)
    if in_model(graph, s, SparsityModel(k, g)):
        assert in_model(graph, s, SparsityModel(k + dk, min(g + dg, k + dk)))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_serialize_round_trip(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 12))
    edges = [(i, j, float(rng.choice([1.0, rng.uniform(0, 3)])))
             for i in range(n) for j in range(i + 1, n) if rng.random() < 0.4]
    if not edges:
        edges = [(0, 1, 1.0)]
    ids = np.sort(rng.choice(1000, size=n, replace=False))
    g = Graph(n, edges)
    g2, ids2 = load_graph(serialize_graph(g, ids))
    # nodes without edges vanish from an edge list; compare in original ids
    orig = sorted((int(ids[u]), int(ids[v]), c) for u, v, c in g.edges)
    back = sorted((int(ids2[u]), int(ids2[v]), c) for u, v, c in g2.edges)
    assert orig == back
