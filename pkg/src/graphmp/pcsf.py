"""Prize-collecting Steiner forest by Goemans-Williamson moat growing.

Clusters grow moats at unit rate while they still have prize budget left;
an edge is bought when the moats on its two sides cover its cost. Growth
stops once at most ``target_components`` clusters are active. The forest
of bought edges is then pruned tree by tree to its best net-worth subtree
(prizes kept minus edge cost), and the ``target_components`` trees with the
largest positive net worth are returned.

Edge events are kept per cluster as "edge parts", one per endpoint, in
heaps keyed by the moat the owning cluster must reach before the part has
to be re-examined. Keys are relative to the cluster's creation, and merged
heaps carry a lazy offset, so merging and deactivation never touch
individual entries except when the smaller heap is poured into the larger.
"""
import heapq
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

__all__ = ["PcsfInstance", "Tree", "Forest", "pcsf_gw", "prune_tree", "forest_objective"]

_INF = float("inf")


@dataclass(frozen=True)
class PcsfInstance:
    """A PCSF problem; ``lam`` multiplies every prize."""

    graph: object
    prizes: np.ndarray
    edge_costs: np.ndarray = None
    lam: float = 1.0
    target_components: int = 1

    def __post_init__(self):
        prizes = np.asarray(self.prizes, dtype=np.float64)
        if prizes.shape != (self.graph.n,):
            raise ValidationError("prizes must have one entry per node")
        if not np.all(np.isfinite(prizes)) or np.any(prizes < 0):
            raise ValidationError("prizes must be finite and nonnegative")
        costs = self.graph.edge_cost if self.edge_costs is None else self.edge_costs
        costs = np.asarray(costs, dtype=np.float64)
        if costs.shape != (self.graph.m,) or np.any(costs < 0) or not np.all(np.isfinite(costs)):
            raise ValidationError("edge costs must be finite, nonnegative, one per edge")
        if not (self.lam >= 0 and np.isfinite(self.lam)):
            raise ValidationError("lam must be finite and nonnegative")
        if int(self.target_components) < 1:
            raise ValidationError("target_components must be >= 1")
        object.__setattr__(self, "prizes", prizes)
        object.__setattr__(self, "edge_costs", costs)


@dataclass(frozen=True)
class Tree:
    """Node set and spanning edge set ``(u, v)`` with ``u < v``."""

    nodes: tuple
    edges: tuple = ()

    def prize(self, prizes):
        return float(sum(prizes[i] for i in self.nodes))


@dataclass(frozen=True)
class Forest:
    trees: tuple = field(default_factory=tuple)

    @property
    def nodes(self):
        return tuple(sorted(i for t in self.trees for i in t.nodes))

    @property
    def size(self):
        return sum(len(t.nodes) for t in self.trees)

    def __len__(self):
        return len(self.trees)


def forest_objective(graph, forest, prizes, edge_costs=None):
    """Edge cost bought plus prizes forfeited outside the forest."""
    costs = graph.edge_cost if edge_costs is None else edge_costs
    lookup = {(min(u, v), max(u, v)): i for i, (u, v) in enumerate(zip(graph.edge_u, graph.edge_v))}
    bought = sum(costs[lookup[e]] for t in forest.trees for e in t.edges)
    covered = set(forest.nodes)
    missed = sum(p for i, p in enumerate(prizes) if i not in covered)
    return float(bought + missed)


def pcsf_gw(inst):
    """Solve a prize-collecting Steiner forest instance approximately.

    Returns a :class:`Forest` with at most ``inst.target_components`` trees,
    each with positive net worth. Deterministic for identical input.
    """
    graph = inst.graph
    prizes = inst.prizes * inst.lam
    costs = inst.edge_costs
    if graph.n == 0 or not np.any(prizes > 0):
        return Forest(())
    bought = _grow(graph.n, graph.edge_u.tolist(), graph.edge_v.tolist(),
                   costs.tolist(), prizes.tolist(), int(inst.target_components))
    return _prune_forest(graph, bought, prizes, costs, int(inst.target_components))


def _grow(n, eu, ev, cost, prize, target):
    """Moat-growing phase; returns ids of the bought edges."""
    # node-level union-find whose path sums give the moat total over all
    # finished clusters that ever contained the node
    parent = list(range(n))
    off = [0.0] * n
    usize = [1] * n
    root_cluster = list(range(n))

    created = [0.0] * n
    budget = list(prize)
    active = [p > 0 for p in prize]
    moat_final = [0.0] * n
    alive = [True] * n
    heaps = [[] for _ in range(n)]
    hoff = [0.0] * n
    sched = [_INF] * n
    nactive = sum(active)

    m = len(eu)
    part_ver = [0] * (2 * m)
    for e in range(m):
        u, v, c = eu[e], ev[e], cost[e]
        for p, a, b in ((2 * e, u, v), (2 * e + 1, v, u)):
            if active[a]:
                key = c / 2.0 if active[b] else c
            else:
                key = 0.0
            heaps[a].append((key, p, 0))
    gq = []
    for i in range(n):
        if heaps[i]:
            heapq.heapify(heaps[i])

    def find(x):
        path = []
        while parent[x] != x:
            path.append(x)
            x = parent[x]
        acc = 0.0
        for w in reversed(path):
            acc += off[w]
            off[w] = acc
            parent[w] = x
        below = off[path[0]] if path else 0.0
        return x, below + off[x]

    def moat(c, t):
        return t - created[c] if active[c] else moat_final[c]

    def schedule(c, now):
        h = heaps[c]
        while h and h[0][2] != part_ver[h[0][1]]:
            heapq.heappop(h)
        if not h:
            sched[c] = _INF
            return
        tt = created[c] + h[0][0] + hoff[c]
        if tt < now:
            tt = now
        if tt != sched[c]:
            sched[c] = tt
            heapq.heappush(gq, (tt, 0, c))

    def push_part(c, p, local_key):
        part_ver[p] += 1
        heapq.heappush(heaps[c], (local_key - hoff[c], p, part_ver[p]))

    for i in range(n):
        if active[i]:
            heapq.heappush(gq, (budget[i], 1, i))
            schedule(i, 0.0)

    bought = []
    while nactive > target and gq:
        t, kind, c = heapq.heappop(gq)
        if not alive[c] or not active[c]:
            continue
        if kind == 1:
            active[c] = False
            moat_final[c] = t - created[c]
            nactive -= 1
            sched[c] = _INF
            continue
        if t != sched[c]:
            continue
        _, p, _ = heapq.heappop(heaps[c])
        e = p >> 1
        if p & 1:
            u, v = ev[e], eu[e]
        else:
            u, v = eu[e], ev[e]
        ru, su = find(u)
        rv, sv = find(v)
        if ru == rv:
            sched[c] = _INF
            schedule(c, t)
            continue
        cu, cv = root_cluster[ru], root_cluster[rv]
        rem = cost[e] - (su + moat(cu, t)) - (sv + moat(cv, t))
        if rem <= 1e-10 * max(cost[e], t):
            # buy the edge and merge the two clusters
            for x in (cu, cv):
                if active[x]:
                    active[x] = False
                    moat_final[x] = t - created[x]
                    nactive -= 1
                alive[x] = False
            left = (budget[cu] - moat_final[cu]) + (budget[cv] - moat_final[cv])
            a, b = (ru, rv) if usize[ru] >= usize[rv] else (rv, ru)
            ma, mb = moat_final[root_cluster[a]], moat_final[root_cluster[b]]
            off[a] += ma
            off[b] += mb - off[a]
            parent[b] = a
            usize[a] += usize[b]

            nc = len(created)
            created.append(t)
            budget.append(left)
            is_active = left > 1e-12 * t if t > 0 else left > 0
            active.append(is_active)
            moat_final.append(0.0)
            alive.append(True)
            sched.append(_INF)
            big, small = (cu, cv) if len(heaps[cu]) >= len(heaps[cv]) else (cv, cu)
            h = heaps[big]
            heaps[big] = []
            new_off = hoff[big] - moat_final[big]
            shift = hoff[small] - moat_final[small] - new_off
            for key, q, ver in heaps[small]:
                if ver == part_ver[q]:
                    heapq.heappush(h, (key + shift, q, ver))
            heaps[small] = []
            heaps.append(h)
            hoff.append(new_off)
            root_cluster[a] = nc
            bought.append(e)
            if is_active:
                nactive += 1
                heapq.heappush(gq, (t + left, 1, nc))
                schedule(nc, t)
        elif active[cv]:
            push_part(cu, p, (t - created[cu]) + rem / 2.0)
            push_part(cv, p ^ 1, (t - created[cv]) + rem / 2.0)
            sched[cu] = _INF
            schedule(cu, t)
            schedule(cv, t)
        else:
            push_part(cu, p, (t - created[cu]) + rem)
            # re-examined as soon as the inactive side is reactivated
            push_part(cv, p ^ 1, moat_final[cv])
            sched[cu] = _INF
            schedule(cu, t)
    return bought


def _prune_forest(graph, bought, prizes, costs, target):
    ds_parent = list(range(graph.n))

    def find(x):
        while ds_parent[x] != x:
            ds_parent[x] = ds_parent[ds_parent[x]]
            x = ds_parent[x]
        return x

    adj = {}
    for e in bought:
        u, v = int(graph.edge_u[e]), int(graph.edge_v[e])
        adj.setdefault(u, []).append((v, float(costs[e])))
        adj.setdefault(v, []).append((u, float(costs[e])))
        ds_parent[find(u)] = find(v)
    groups = {}
    for i in range(graph.n):
        if prizes[i] > 0 or i in adj:
            groups.setdefault(find(i), []).append(i)
    candidates = []
    for nodes in groups.values():
        net, tree = _strong_prune(min(nodes), adj, prizes)
        if net > 0:
            candidates.append((net, tree))
    candidates.sort(key=lambda item: (-item[0], -item[1].prize(prizes),
                                      len(item[1].nodes), item[1].nodes[0]))
    trees = [tree for _, tree in candidates[:target]]
    trees.sort(key=lambda t: t.nodes[0])
    return Forest(tuple(trees))


def _strong_prune(root, adj, prizes):
    """Best net-worth connected subtree of the tree containing ``root``."""
    order, par = [root], {root: -1}
    for u in order:
        for w, _ in adj.get(u, ()):
            if w not in par:
                par[w] = u
                order.append(w)
    best = {}
    for u in reversed(order):
        val = float(prizes[u])
        for w, c in adj.get(u, ()):
            if par.get(w) == u:
                gain = best[w] - c
                if gain > 0:
                    val += gain
        best[u] = val
    top = min(order, key=lambda u: (-best[u], u))
    nodes, edges, stack = [], [], [top]
    while stack:
        u = stack.pop()
        nodes.append(u)
        for w, c in adj.get(u, ()):
            if par.get(w) == u and best[w] - c > 0:
                edges.append((min(u, w), max(u, w)))
                stack.append(w)
    return best[top], Tree(tuple(sorted(nodes)), tuple(sorted(edges)))


def prune_tree(tree, prizes, budget):
    """Connected subtree with at most ``budget`` nodes and maximum prize.

    Exact dynamic program over the tree. Ties go to the larger subtree,
    then to the smaller top node.
    """
    table = subtree_table(tree, prizes, budget)
    return table.best(budget)


class subtree_table:
    """Best connected-subtree prize of every size up to ``budget``.

    ``value(s)`` is the largest prize over connected subtrees with exactly
    ``s`` nodes; ``nodes(s)`` reconstructs one such subtree.
    """

    def __init__(self, tree, prizes, budget):
        if budget < 1:
            raise ValidationError("budget must be >= 1")
        nodes = tree.nodes
        adj = {u: [] for u in nodes}
        for u, v in tree.edges:
            adj[u].append(v)
            adj[v].append(u)
        root = nodes[0]
        order, par = [root], {root: -1}
        for u in order:
            for w in sorted(adj[u]):
                if w not in par:
                    par[w] = u
                    order.append(w)
        children = {u: [w for w in sorted(adj[u]) if par[w] == u] for u in nodes}
        neg = -_INF
        f, splits = {}, {}
        for u in reversed(order):
            cur = [neg, float(prizes[u])]
            rec = []
            for w in children[u]:
                fw = f[w]
                new = cur + [neg] * min(len(fw) - 1, budget + 1 - len(cur))
                choice = [0] * len(new)
                for a in range(1, len(cur)):
                    va = cur[a]
                    if va == neg:
                        continue
                    for b in range(1, min(len(fw), budget + 1 - a)):
                        vb = fw[b]
                        if vb == neg:
                            continue
                        if va + vb > new[a + b]:
                            new[a + b] = va + vb
                            choice[a + b] = b
                rec.append((w, choice))
                cur = new
            f[u] = cur
            splits[u] = rec
        self._f, self._splits, self._order = f, splits, order
        self.budget = budget
        vals = [neg] * (budget + 1)
        tops = [None] * (budget + 1)
        for u in sorted(nodes):
            fu = f[u]
            for s in range(1, len(fu)):
                if fu[s] > vals[s]:
                    vals[s] = fu[s]
                    tops[s] = u
        self.values = vals
        self._tops = tops

    def value(self, s):
        return self.values[s] if s < len(self.values) else -_INF

    def nodes(self, s):
        top = self._tops[s]
        out, stack = [], [(top, s)]
        while stack:
            u, size = stack.pop()
            out.append(u)
            for w, choice in reversed(self._splits[u]):
                if size < len(choice):
                    b = choice[size]
                else:
                    b = 0
                if b:
                    stack.append((w, b))
                    size -= b
        return tuple(sorted(out))

    def best(self, budget=None):
        budget = self.budget if budget is None else min(budget, self.budget)
        best_s = None
        for s in range(1, budget + 1):
            v = self.values[s]
            if v == -_INF:
                continue
            if best_s is None or v >= self.values[best_s]:
                best_s = s
        return self.nodes(best_s)
