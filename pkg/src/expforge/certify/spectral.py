"""Eigenvalues of adjacency and biadjacency matrices, the bipartite mixing-lemma
interval, and skeleton graphs of structured incidence graphs."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from ..graph import LEFT, BipartiteMultigraph, SymmetricGraph, VertexSet

DENSE_LIMIT = 2000
TOLERANCE = 1e-9
MAX_ITER = 100_000


class NonConvergence(RuntimeError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


@dataclass
class SpectralReport:
    """``lambda_2`` is the largest modulus among the remaining eigenvalues
    (for biadjacency matrices: the second singular value)."""

    lambda_max: float
    lambda_2: float
    method: str
    tolerance: float
    iterations: int
    residual: float
    components: int | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def _power(matvec, n: int, rng, tol: float, max_iter: int, against=None):
    """Top eigenpair of a PSD operator; ``against`` is a unit vector projected out."""
    v = rng.standard_normal(n)
    if against is not None:
        v -= against * (against @ v)
    nv = np.linalg.norm(v)
    if nv == 0:
        return 0.0, v, 0
    v /= nv
    mu = 0.0
    for it in range(1, max_iter + 1):
        w = matvec(v)
        if against is not None:
            w -= against * (against @ w)
        new_mu = float(v @ w)
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0, v, it
        w /= nw
        if abs(new_mu - mu) <= tol * max(abs(new_mu), 1.0) and np.linalg.norm(w - v) <= math.sqrt(tol):
            return new_mu, w, it
        v, mu = w, new_mu
    res = float(np.linalg.norm(matvec(v) - mu * v))
    raise NonConvergence(f"power iteration did not converge in {max_iter} steps", res)


def _sparse_adjacency(g: SymmetricGraph):
    if not g.edges:
        return sp.csr_matrix((g.n, g.n))
    e = np.array(g.edges)
    rows = np.concatenate([e[:, 0], e[:, 1]])
    cols = np.concatenate([e[:, 1], e[:, 0]])
    return sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(g.n, g.n))


def top_eigenvalue(g: SymmetricGraph, seed: int = 0, tol: float = TOLERANCE,
                   max_iter: int = MAX_ITER, dense_limit: int = DENSE_LIMIT) -> SpectralReport:
    """Largest adjacency eigenvalue; dense solve up to ``dense_limit`` vertices,
    shifted power iteration with deflation above it."""
    n = g.n
    if n < 1:
        raise ValueError("graph has no vertices")
    if n <= dense_limit:
        A = g.adjacency_matrix()
        w, V = np.linalg.eigh(A)
        lam, v = float(w[-1]), V[:, -1]
        rest = np.abs(w[:-1])
        res = float(np.linalg.norm(A @ v - lam * v))
        return SpectralReport(lam, float(rest.max()) if n > 1 else 0.0, "dense", tol, 0, res)
    A = _sparse_adjacency(g)
    rng = np.random.default_rng(seed)
    shift = float(g.degrees().max(initial=0))
    mu, v, it1 = _power(lambda x: A @ x + shift * x, n, rng, tol, max_iter)
    lam = mu - shift
    res = float(np.linalg.norm(A @ v - lam * v))
    sq, _, it2 = _power(lambda x: A @ (A @ x), n, rng, tol, max_iter, against=v)
    return SpectralReport(lam, math.sqrt(max(sq, 0.0)), "iterative", tol, it1 + it2, res)


def bipartite_lambda2(g: BipartiteMultigraph, seed: int = 0, tol: float = TOLERANCE,
                      max_iter: int = MAX_ITER, dense_limit: int = DENSE_LIMIT) -> SpectralReport:
    """Top two singular values of the biadjacency matrix (multiplicities as weights)."""
    nl, nr = g.n_left, g.n_right
    if nl + nr < 1:
        raise ValueError("graph has no vertices")
    Bs = sp.csr_matrix((np.ones(g.m), (g.left_array, g.right_array)), shape=(nl, nr))
    full = sp.bmat([[None, Bs], [Bs.T, None]], format="csr") if nl and nr else sp.csr_matrix((nl + nr, nl + nr))
    comps = int(connected_components(full, directed=False)[0])
    if nl == 0 or nr == 0:
        return SpectralReport(0.0, 0.0, "dense", tol, 0, 0.0, comps)
    if nl + nr <= dense_limit:
        B = Bs.toarray()
        U, s, Vt = np.linalg.svd(B)
        res = float(np.linalg.norm(B @ Vt[0] - s[0] * U[:, 0]))
        return SpectralReport(float(s[0]), float(s[1]) if len(s) > 1 else 0.0, "dense", tol, 0, res, comps)
    rng = np.random.default_rng(seed)
    gram = lambda x: Bs.T @ (Bs @ x)
    mu1, v1, it1 = _power(gram, nr, rng, tol, max_iter)
    mu2, _, it2 = _power(gram, nr, rng, tol, max_iter, against=v1)
    s1 = math.sqrt(max(mu1, 0.0))
    u1 = Bs @ v1
    res = float(np.linalg.norm(u1 - s1 * (u1 / (np.linalg.norm(u1) or 1.0))))
    return SpectralReport(s1, math.sqrt(max(mu2, 0.0)), "iterative", tol, it1 + it2, res, comps)


def eml_bound(g: BipartiteMultigraph, A: VertexSet, B: VertexSet, lam: float) -> dict:
    """Interval ``|E|(ab -+ lam/sqrt(cd) sqrt(ab))`` for e(A, B) in a (c, d)-biregular graph."""
    dl, dr = g.degrees(LEFT), g.degrees("right")
    if g.n_left == 0 or g.n_right == 0 or dl.min() != dl.max() or dr.min() != dr.max():
        raise ValueError("mixing-lemma interval needs a biregular graph")
    c, d = int(dl[0]), int(dr[0])
    if A.side != LEFT or B.side != "right":
        raise ValueError("A must be a left set and B a right set")
    E = g.m
    alpha, beta = len(A) / g.n_left, len(B) / g.n_right
    dev = lam / math.sqrt(c * d) * math.sqrt(alpha * beta) if c and d else 0.0
    lo, hi = E * (alpha * beta - dev), E * (alpha * beta + dev)
    inA = np.zeros(g.n_left, dtype=bool)
    inA[list(A.members)] = True
    inB = np.zeros(g.n_right, dtype=bool)
    inB[list(B.members)] = True
    actual = int(np.sum(inA[g.left_array] & inB[g.right_array]))
    slack = 1e-9 * max(1.0, E)
    return {"interval": [lo, hi], "actual": actual, "contained": lo - slack <= actual <= hi + slack,
            "alpha": alpha, "beta": beta, "c": c, "d": d, "lambda": lam}


def skeletonize(sb, side: str = "middle") -> SymmetricGraph:
    """Simple graph joining two vertices that share a neighbor.

    ``sb`` is a StructuredBipartite (faces on the graph's left) or a bare
    BipartiteMultigraph; ``side="middle"`` works on its right side.
    """
    g = getattr(sb, "graph", sb)
    if side in ("middle", "right"):
        groups, n = g.left_adjacency, g.n_right
    elif side in ("outer", "left"):
        groups, n = g.right_adjacency, g.n_left
    else:
        raise ValueError(f"unknown side {side!r}")
    edges = set()
    for grp in groups:
        members = sorted(set(grp))
        for a in range(len(members)):
            for b in range(a + 1, len(members)):
                edges.add((members[a], members[b]))
    return SymmetricGraph(n, tuple(sorted(edges)))


def small_set_skeleton_lambda(skel: SymmetricGraph, U: VertexSet | list, seed: int = 0) -> dict:
    """Top eigenvalue of ``skel[U]`` next to ``lambda_2(skel) + (|U|/n) d_max``,
    where lambda_2 is the second largest (signed) eigenvalue."""
    members = sorted(set(getattr(U, "members", U)))
    sub = skel.induced(members)
    lam_u = top_eigenvalue(sub, seed).lambda_max if members else 0.0
    if skel.n <= DENSE_LIMIT:
        w = np.linalg.eigvalsh(skel.adjacency_matrix())
        lam2 = float(w[-2]) if skel.n > 1 else 0.0
    else:
        lam2 = top_eigenvalue(skel, seed).lambda_2
    d_max = int(skel.degrees().max(initial=0))
    bound = lam2 + len(members) / max(skel.n, 1) * d_max
    return {"size": len(members), "lambda_U": lam_u, "lambda2_skeleton": lam2, "d_max": d_max,
            "comparison_bound": bound}
