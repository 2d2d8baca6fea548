"""Subspaces of F_q^k, Gaussian binomials and the spherical building.

Subspaces are stored by their reduced-row-echelon basis, so two subspaces
are equal exactly when their representations are equal.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

from .finite_field import GF, field
from .graph import BipartiteMultigraph, CliqueComplex

DEFAULT_ENUMERATION_CAP = 500_000


class ResourceCapError(RuntimeError):
    """Raised when an enumeration would exceed its configured cap."""


def q_integer(n: int, q: int) -> int:
    """[n]_q = 1 + q + ... + q^{n-1}."""
    return sum(q ** t for t in range(n))


def q_factorial(n: int, q: int) -> int:
    out = 1
    for t in range(1, n + 1):
        out *= q_integer(t, q)
    return out


@lru_cache(maxsize=None)
def gauss_binom(k: int, i: int, q: int) -> int:
    if q < 2:
        raise ValueError(f"q={q} must be at least 2")
    if not 0 <= i <= k:
        raise ValueError(f"Gaussian binomial needs 0 <= i <= k, got k={k}, i={i}")
    num = q_factorial(k, q)
    den = q_factorial(i, q) * q_factorial(k - i, q)
    assert num % den == 0
    return num // den


@dataclass(frozen=True, order=True)
class Subspace:
    ambient_dim: int
    basis: tuple[tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __repr__(self) -> str:
        rows = ",".join("".join(map(str, r)) for r in self.basis)
        return f"Subspace(k={self.ambient_dim}, [{rows}])"


def rref(rows, F: GF) -> tuple[tuple[int, ...], ...]:
    """Reduced row echelon form over ``F``; zero rows dropped."""
    mat = [list(r) for r in rows]
    if not mat:
        return ()
    ncols = len(mat[0])
    add, mul, inv, neg = F.add, F.mul, F.inv, F.neg
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        s = inv[mat[r][c]]
        mat[r] = [int(mul[s, x]) for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = neg[mat[i][c]]
                mat[i] = [int(add[x, mul[f, y]]) for x, y in zip(mat[i], mat[r])]
        r += 1
        if r == len(mat):
            break
    return tuple(tuple(row) for row in mat[:r])


def span(rows, k: int, q: int) -> Subspace:
    return Subspace(k, rref(rows, field(q)))


def combine(coeffs, basis, F: GF) -> tuple[tuple[int, ...], ...]:
    """Rows ``coeffs @ basis`` over ``F``."""
    out = []
    for c in coeffs:
        acc = [0] * len(basis[0])
        for a, row in zip(c, basis):
            if a:
                acc = [int(F.add[x, F.mul[a, y]]) for x, y in zip(acc, row)]
        out.append(tuple(acc))
    return tuple(out)


def contains(big: Subspace, small: Subspace, q: int) -> bool:
    return len(rref(big.basis + small.basis, field(q))) == big.dim


def enumerate_subspaces(k: int, i: int, q: int, cap: int = DEFAULT_ENUMERATION_CAP) -> list[Subspace]:
    """All i-dimensional subspaces of F_q^k, sorted by their RREF basis."""
    if not 0 < i < k:
        raise ValueError(f"need 0 < i < k, got k={k}, i={i}")
    total = gauss_binom(k, i, q)
    if total > cap:
        raise ResourceCapError(f"{total} subspaces exceeds enumeration cap {cap}")
    field(q)  # validates q
    out = []
    for pivots in itertools.combinations(range(k), i):
        pivset = set(pivots)
        free = [(r, c) for r, p in enumerate(pivots) for c in range(p + 1, k) if c not in pivset]
        for vals in itertools.product(range(q), repeat=len(free)):
            mat = [[0] * k for _ in range(i)]
            for r, p in enumerate(pivots):
                mat[r][p] = 1
            for (r, c), v in zip(free, vals):
                mat[r][c] = v
            out.append(Subspace(k, tuple(tuple(row) for row in mat)))
    out.sort()
    return out


def _check_pair(k: int, i: int, j: int):
    if not 1 <= i < j <= k - 1:
        raise ValueError(f"need 1 <= i < j <= k-1, got k={k}, i={i}, j={j}")


def building_bipartite(k: int, q: int, i: int, j: int) -> BipartiteMultigraph:
    """Containment graph between i-dim (left) and j-dim (right) subspaces of F_q^k."""
    _check_pair(k, i, j)
    F = field(q)
    left = enumerate_subspaces(k, i, q)
    right = enumerate_subspaces(k, j, q)
    index = {w.basis: t for t, w in enumerate(left)}
    coeffs = enumerate_subspaces(j, i, q)
    edges = []
    for col, x in enumerate(right):
        for c in coeffs:
            w = rref(combine(c.basis, x.basis, F), F)
            edges.append((index[w], col))
    edges.sort()
    return BipartiteMultigraph(len(left), len(right), tuple(edges))


def building_complex(k: int, q: int) -> CliqueComplex:
    """Flag complex of F_q^k: parts are dimensions 1..k-1, faces are complete flags.

    Vertex ids run through dimension 1 first, then dimension 2, and so on;
    ``labels`` holds the corresponding subspaces.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    levels = [enumerate_subspaces(k, d, q) for d in range(1, k)]
    offsets = list(itertools.accumulate([0] + [len(lv) for lv in levels]))
    up = []
    for d in range(1, k - 1):
        g = building_bipartite(k, q, d, d + 1)
        up.append(g.left_adjacency)
    faces = []

    def extend(chain):
        if len(chain) == k - 1:
            faces.append(tuple(offsets[t] + v for t, v in enumerate(chain)))
            return
        for nxt in up[len(chain) - 1][chain[-1]]:
            extend(chain + [nxt])

    for v in range(len(levels[0])):
        extend([v])
    part_of = tuple(t for t, lv in enumerate(levels) for _ in lv)
    labels = tuple(s for lv in levels for s in lv)
    return CliqueComplex(k - 1, part_of, tuple(sorted(faces)), labels)


def link_lambda2_formula(k: int, q: int, i: int, j: int) -> float:
    """Second eigenvalue of the (V_i, V_j) containment graph, closed form."""
    _check_pair(k, i, j)
    return math.sqrt(q ** (j - i) * gauss_binom(j - 1, j - i, q) * gauss_binom(k - i - 1, j - i, q))


def chain_extension_count(k: int, q: int, i0: int, i1: int, i2: int) -> int:
    """Complete flags of F_q^k through a fixed pair of nested subspaces.

    The fixed subspaces have dimensions ``i1 - i0`` and ``i2 - i0``; the flag is
    free below, between and above them, so the count is the number of complete
    flags in each of the three gaps.
    """
    if not 0 <= i0 < i1 < i2 < k:
        raise ValueError(f"need 0 <= i0 < i1 < i2 < k, got {(i0, i1, i2)} with k={k}")
    a, b = i1 - i0, i2 - i0
    return q_factorial(a, q) * q_factorial(b - a, q) * q_factorial(k - b, q)
