"""Min-degree peeling orientations and the average-degree product inequality."""

from __future__ import annotations

import heapq
import math

import numpy as np

from ..graph import BipartiteMultigraph, SymmetricGraph
from .spectral import bipartite_lambda2


def bounded_outdegree_orientation(g: SymmetricGraph) -> dict:
    """Repeatedly remove a vertex of least remaining degree (smallest index on ties)
    and point its remaining edges away from it."""
    adj = [set(a) for a in g.adjacency]
    deg = [len(a) for a in adj]
    heap = [(deg[v], v) for v in range(g.n)]
    heapq.heapify(heap)
    removed = [False] * g.n
    order, arcs = [], []
    out = np.zeros(g.n, dtype=np.int64)
    while heap:
        d, v = heapq.heappop(heap)
        if removed[v] or d != deg[v]:
            continue
        removed[v] = True
        order.append(v)
        for w in sorted(adj[v]):
            arcs.append((v, w))
            adj[w].discard(v)
            deg[w] -= 1
            heapq.heappush(heap, (deg[w], w))
        out[v] = len(adj[v])
        adj[v] = set()
    return {"arcs": arcs, "order": order, "outdegree": out.tolist(),
            "max_outdegree": int(out.max(initial=0))}


def orientation_check(g: SymmetricGraph, seed: int = 0) -> dict:
    from .spectral import top_eigenvalue
    orient = bounded_outdegree_orientation(g)
    lam = top_eigenvalue(g, seed).lambda_max if g.n else 0.0
    bound = math.ceil(lam - 1e-9)
    return {"max_outdegree": orient["max_outdegree"], "lambda_max": lam,
            "bound": bound, "pass": orient["max_outdegree"] <= bound}


def degree_product_check(g: BipartiteMultigraph, seed: int = 0) -> dict:
    """``(d1 - 1)(d2 - 1) <= lambda^2`` with average degrees over all vertices of
    each side and lambda the top singular value. Edgeless graphs pass vacuously."""
    if g.m == 0:
        return {"d1": 0.0, "d2": 0.0, "lhs": 1.0, "lambda_sq": 0.0, "pass": True, "vacuous": True}
    d1, d2 = g.m / g.n_left, g.m / g.n_right
    lam = bipartite_lambda2(g, seed).lambda_max
    lhs, rhs = (d1 - 1) * (d2 - 1), lam * lam
    return {"d1": d1, "d2": d2, "lhs": lhs, "lambda_sq": rhs,
            "pass": lhs <= rhs * (1 + 1e-12) + 1e-12, "vacuous": False}
