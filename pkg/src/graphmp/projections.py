"""Approximate projections onto the (k, g) graph sparsity model.

Both oracles use node prizes ``x_i**2`` and search over a prize multiplier
for a PCSF forest whose size falls in a target window. Every forest seen
during the search is a candidate; oversized ones are cut back to the node
budget with an exact tree dynamic program, and the candidate that keeps
the most squared norm wins.
"""
import math

import numpy as np

from .graph import as_support, components, gamma, support_of
from .pcsf import PcsfInstance, pcsf_gw, subtree_table

__all__ = ["head_approx", "tail_approx", "boost_head", "best_forest_support"]

MAX_BISECTIONS = 50
BRACKET_TOL = 1e-6
REFINE_STEPS = 4


def head_approx(graph, x, model):
    """Support in M(2k, g) keeping a constant fraction of the best head value."""
    return best_forest_support(graph, x, model.g, lo=model.k, budget=model.k_head)


def tail_approx(graph, x, model):
    """Support in M(5k, g) whose residual is within a constant of the best."""
    return best_forest_support(graph, x, model.g, lo=model.k, budget=model.k_tail,
                               refine=REFINE_STEPS)


def boost_head(graph, x, model, rounds=1):
    """Repeat the head oracle on what previous rounds left uncovered.

    A round is accepted only if the union still has at most ``g``
    components, or, failing that, if its ``g`` heaviest components keep
    more norm than the current support. Captured norm never decreases.
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    x = np.asarray(x, dtype=np.float64)
    w2 = x * x
    support = head_approx(graph, x, model)
    for _ in range(rounds - 1):
        resid = x.copy()
        resid[list(support)] = 0.0
        if not np.any(resid):
            break
        extra = head_approx(graph, resid, model)
        union = as_support(support + extra)
        if gamma(graph, union) > model.g:
            comps = components(graph, union)
            comps.sort(key=lambda c: (-float(w2[list(c)].sum()), c[0]))
            union = as_support(i for c in comps[:model.g] for i in c)
        if float(w2[list(union)].sum()) <= float(w2[list(support)].sum()):
            break
        support = union
    return support


def best_forest_support(graph, x, g, lo, budget, refine=0):
    """Heaviest forest support found with at most ``budget`` nodes and ``g`` trees."""
    x = np.asarray(x, dtype=np.float64)
    w2 = x * x
    supp = support_of(x)
    if not supp:
        return ()
    if len(supp) <= budget and gamma(graph, supp) <= g:
        return supp

    forests = _lambda_search(graph, w2, g, lo, budget, refine)
    best, best_key = (), None
    oversized = [f for f in forests if f.size > budget]
    fitted = [f.nodes for f in forests if f.size <= budget]
    if oversized:
        fitted.append(_fit_forest(min(oversized, key=lambda f: f.size), w2, budget))
    for nodes in fitted:
        key = (-float(w2[list(nodes)].sum()), len(nodes), nodes)
        if best_key is None or key < best_key:
            best, best_key = nodes, key
    return best


def _lambda_search(graph, w2, g, lo, hi, refine):
    positive = w2[w2 > 0]
    costs = graph.edge_cost
    pos_costs = costs[costs > 0]
    if len(pos_costs) == 0:
        pos_costs = np.ones(1)
    lam_lo = float(pos_costs.min()) / (4.0 * float(positive.max()))
    lam_hi = 2.0 * (float(costs.sum()) + 1.0) / float(positive.min())
    seen = {}

    def run(lam):
        if lam not in seen:
            seen[lam] = pcsf_gw(PcsfInstance(graph, w2, costs, lam, g))
        return seen[lam]

    a, b = math.log(lam_lo), math.log(lam_hi)
    small, large = run(lam_lo), run(lam_hi)
    found = None
    if lo <= small.size <= hi:
        found = a
    elif large.size <= hi:
        found = b
    else:
        for _ in range(MAX_BISECTIONS):
            mid = 0.5 * (a + b)
            size = run(math.exp(mid)).size
            if size < lo:
                a = mid
            elif size > hi:
                b = mid
            else:
                found = mid
                break
            if math.exp(b - a) - 1.0 < BRACKET_TOL:
                break
    if found is not None and refine:
        # push towards larger forests that still fit
        a2, b2 = found, b
        for _ in range(refine):
            if b2 - a2 < BRACKET_TOL:
                break
            mid = 0.5 * (a2 + b2)
            if run(math.exp(mid)).size <= hi:
                a2 = mid
            else:
                b2 = mid
    return list(seen.values())


def _fit_forest(forest, w2, budget):
    """Best choice of one subtree per tree under a total node budget."""
    tables = [subtree_table(t, w2, budget) for t in forest.trees]
    neg = -math.inf
    dp = [0.0] + [neg] * budget
    picks = []
    for tab in tables:
        new = list(dp)
        pick = [0] * (budget + 1)
        for used in range(budget + 1):
            if dp[used] == neg:
                continue
            for s in range(1, budget + 1 - used):
                v = tab.value(s)
                if v == neg:
                    continue
                if dp[used] + v > new[used + s]:
                    new[used + s] = dp[used] + v
                    pick[used + s] = s
        picks.append(pick)
        dp = new
    total = max(range(budget + 1), key=lambda s: (dp[s], -s))
    nodes = []
    for tab, pick in zip(reversed(tables), reversed(picks)):
        s = pick[total]
        if s:
            nodes.extend(tab.nodes(s))
            total -= s
    return as_support(nodes)
