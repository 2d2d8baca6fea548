"""Tripartite line product and the collision diagnostics around a seed set.

A blue edge joins a middle vertex u to a right vertex reached by exactly one
gadget edge from u's seed ports; red means two or more (multiplicity counted).
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .base.structured import StructuredBipartite
from .graph import LEFT, RIGHT, BipartiteMultigraph, VertexSet, unique_neighbors, validate_biregular


@dataclass(frozen=True, eq=False)
class LineProductInstance:
    g_left: StructuredBipartite
    g_right: StructuredBipartite
    gadget: BipartiteMultigraph
    z: BipartiteMultigraph

    @property
    def k(self) -> int:
        return self.g_left.k

    @property
    def gadget_degrees(self) -> tuple[int, int]:
        dl, dr = self.gadget.degrees(LEFT), self.gadget.degrees(RIGHT)
        return int(dl.max(initial=0)), int(dr.max(initial=0))

    @cached_property
    def biregularity(self):
        d_L, d_R = self.gadget_degrees
        return validate_biregular(self.z, self.k * d_L, self.k * d_R)

    def transposed(self) -> "LineProductInstance":
        """Roles of L and R swapped; the same Z with sides exchanged."""
        return LineProductInstance(self.g_right, self.g_left, self.gadget.transpose(), self.z.transpose())

    @cached_property
    def left_order(self) -> np.ndarray:
        return np.array(self.g_left.nbr_order, dtype=np.int64).reshape(self.g_left.n_middle, -1)

    @cached_property
    def right_order(self) -> np.ndarray:
        return np.array(self.g_right.nbr_order, dtype=np.int64).reshape(self.g_right.n_middle, -1)

    @cached_property
    def left_port(self) -> dict:
        """``(u, l) -> i`` with ``LNbr_u(i) = l``."""
        return {(u, int(l)): i for u, row in enumerate(self.left_order) for i, l in enumerate(row)}


def line_product(g_left: StructuredBipartite, g_right: StructuredBipartite,
                 gadget: BipartiteMultigraph) -> LineProductInstance:
    """Place a copy of the gadget at every middle vertex u: port i on the left is
    ``LNbr_u(i)``, port j on the right is ``RNbr_u(j)``. Edges are tagged ``u:i:j``."""
    if g_left.n_middle != g_right.n_middle:
        raise ValueError(f"middle layers differ: {g_left.n_middle} vs {g_right.n_middle}")
    if g_left.k != g_right.k or tuple(g_left.part_of) != tuple(g_right.part_of):
        raise ValueError("left and right base graphs must share the middle partition")
    if g_left.D != gadget.n_left:
        raise ValueError(f"left base degree {g_left.D} != gadget left size {gadget.n_left}")
    if g_right.D != gadget.n_right:
        raise ValueError(f"right base degree {g_right.D} != gadget right size {gadget.n_right}")
    M = g_left.n_middle
    lo = np.array(g_left.nbr_order, dtype=np.int64).reshape(M, -1)
    ro = np.array(g_right.nbr_order, dtype=np.int64).reshape(M, -1)
    gi, gj = gadget.left_array, gadget.right_array
    zl = lo[:, gi].ravel().tolist()
    zr = ro[:, gj].ravel().tolist()
    tags = [f"{u}:{i}:{j}" for u in range(M) for i, j in gadget.edges]
    z = BipartiteMultigraph(g_left.n_outer, g_right.n_outer, tuple(zip(zl, zr)), tuple(tags))
    return LineProductInstance(g_left, g_right, gadget, z)


def _oriented(inst: LineProductInstance, side: str) -> LineProductInstance:
    if side == LEFT:
        return inst
    if side == RIGHT:
        return inst.transposed()
    raise ValueError(f"side must be {LEFT!r} or {RIGHT!r}, got {side!r}")


@dataclass
class CollisionReport:
    side: str
    S: list
    U: list
    gamma_S: list
    deg_gamma: dict
    threshold: float
    u_low: list
    u_high: list
    blue: dict
    red: dict
    collisions: list
    e_C_total: int
    e_C_low: int
    e_C_low_high: int
    saturation_threshold: float
    u_sat: list
    blue_unique_count: int
    un_z_count: int
    total_blue_edges: int
    skeleton_ok: bool
    multiplicity_checks: list

    @property
    def obs_un_blue_holds(self) -> bool:
        return self.blue_unique_count == self.un_z_count

    @property
    def multiplicity_bound_holds(self) -> bool:
        return all(c["ok"] for c in self.multiplicity_checks)

    def to_dict(self) -> dict:
        ports = lambda d: [{"u": u, "right": v} for u, v in sorted(d.items())]
        return {
            "side": self.side, "S": self.S, "U": self.U,
            "gamma_S": [list(e) for e in self.gamma_S],
            "deg_gamma": [{"u": u, "deg": d} for u, d in sorted(self.deg_gamma.items())],
            "threshold": self.threshold, "u_low": self.u_low, "u_high": self.u_high,
            "blue": ports(self.blue), "red": ports(self.red),
            "C": [list(c) for c in self.collisions],
            "e_C_total": self.e_C_total, "e_C_low": self.e_C_low, "e_C_low_high": self.e_C_low_high,
            "saturation_threshold": self.saturation_threshold, "u_sat": self.u_sat,
            "blue_unique_count": self.blue_unique_count, "un_z_count": self.un_z_count,
            "blue_unique_equals_un": self.obs_un_blue_holds,
            "total_blue_edges": self.total_blue_edges,
            "collision_graph_in_skeleton": self.skeleton_ok,
            "multiplicity_checks": self.multiplicity_checks,
            "multiplicity_bound_holds": self.multiplicity_bound_holds,
        }


def analyze_collisions(inst: LineProductInstance, S: VertexSet, tau: float, delta: float,
                       lam: float, side: str | None = None) -> CollisionReport:
    """Blue/red labels, the collision multigraph C and the saturated set for seed set S.

    C holds a directed triple ``(u, v, mult)`` for u in U_low: ``mult`` counts right
    vertices with a blue edge from u and any edge from v.
    """
    side = S.side if side is None else side
    if S.side != side:
        raise ValueError(f"seed set lies on {S.side!r} but analysis side is {side!r}")
    if min(tau, delta, lam) <= 0:
        raise ValueError("tau, delta and lambda must be positive")
    view = _oriented(inst, side)
    gl, gr, H = view.g_left, view.g_right, view.gadget
    seeds = list(S.members)
    if seeds and not (0 <= seeds[0] and seeds[-1] < gl.n_outer):
        raise ValueError("seed set out of range")

    ports = defaultdict(list)
    gamma = []
    for l in seeds:
        for u in gl.graph.left_adjacency[l]:
            ports[u].append(view.left_port[(u, l)])
            gamma.append((l, u))
    U = sorted(ports)
    deg = {u: len(ports[u]) for u in U}
    threshold = tau / delta
    u_high = [u for u in U if deg[u] > threshold]
    high = set(u_high)
    u_low = [u for u in U if u not in high]

    hadj = H.left_adjacency
    ro = view.right_order
    blue, red, hit = {}, {}, {}
    touched = defaultdict(list)
    for u in U:
        c = Counter(j for i in ports[u] for j in hadj[i])
        hit[u] = c
        blue[u] = sorted(int(ro[u, j]) for j, n in c.items() if n == 1)
        red[u] = sorted(int(ro[u, j]) for j, n in c.items() if n >= 2)
        for j in c:
            touched[int(ro[u, j])].append(u)
    n_blue = Counter(r for u in U for r in blue[u])
    n_red = Counter(r for u in U for r in red[u])
    blue_unique = sum(1 for r, n in n_blue.items() if n == 1 and n_red[r] == 0)
    un_z = len(unique_neighbors(view.z, VertexSet.of(LEFT, seeds)))

    mult = Counter()
    for u in u_low:
        for r in blue[u]:
            for v in touched[r]:
                if v != u:
                    mult[(u, v)] += 1
    collisions = sorted((u, v, m) for (u, v), m in mult.items())
    e_total = sum(mult.values())
    e_low = sum(m for (u, v), m in mult.items() if v not in high)
    e_low_high = e_total - e_low

    radj = gr.graph.right_adjacency
    part = gr.part_of
    families = {key: {frozenset(s) for s in fam} for key, fam in gr.special_sets.items()}
    skeleton_ok = True
    checks = []
    for u, v, m in collisions:
        nv = set(radj[v])
        A = [j for j in range(ro.shape[1]) if int(ro[u, j]) in nv]
        skeleton_ok &= bool(A)
        mass = sum(1 for j in A if hit[u][j] >= 1)
        found = frozenset(A) in families.get((part[u], part[v]), ())
        checks.append({"u": u, "v": v, "multiplicity": m, "special_set": A,
                       "in_family": found, "mass": mass, "ok": m <= mass})

    sat_threshold = lam / delta
    partners = defaultdict(set)
    for u, v, _ in collisions:
        if v in high:
            partners[(u, part[v])].add(v)
    u_sat = sorted({u for (u, b), vs in partners.items() if len(vs) > sat_threshold})

    return CollisionReport(
        side=side, S=seeds, U=U, gamma_S=gamma, deg_gamma=deg, threshold=threshold,
        u_low=u_low, u_high=u_high, blue=blue, red=red, collisions=collisions,
        e_C_total=e_total, e_C_low=e_low, e_C_low_high=e_low_high,
        saturation_threshold=sat_threshold, u_sat=u_sat, blue_unique_count=blue_unique,
        un_z_count=un_z, total_blue_edges=sum(len(b) for b in blue.values()),
        skeleton_ok=skeleton_ok, multiplicity_checks=checks)


def edges_into_low_diagnostic(report: CollisionReport, k: int, delta: float) -> dict:
    """Edge split between U_low and U_high; the ratio against ``(1-4 delta)(k-2)|S|`` is
    reported, never asserted."""
    e_low = sum(report.deg_gamma[u] for u in report.u_low)
    e_high = sum(report.deg_gamma[u] for u in report.u_high)
    target = (1 - 4 * delta) * (k - 2) * len(report.S)
    return {"e_S_low": e_low, "e_S_high": e_high, "k_times_S": k * len(report.S),
            "identity_holds": e_low + e_high == k * len(report.S),
            "ratio": e_low / target if target > 0 else None}


def _segment_starts(sorted_keys: np.ndarray) -> np.ndarray:
    if len(sorted_keys) == 0:
        return np.zeros(0, dtype=np.int64)
    return np.flatnonzero(np.r_[True, sorted_keys[1:] != sorted_keys[:-1]])


class BatchOracle:
    """Vectorised collision checks over many seed sets at once.

    ``blue_unique`` is computed from per-copy gadget counts mapped to R, and
    ``un_z`` straight from the biadjacency of Z: two independent paths.
    """

    def __init__(self, inst: LineProductInstance, side: str = LEFT):
        view = _oriented(inst, side)
        self.view = view
        gl, gr, H = view.g_left, view.g_right, view.gadget
        M, DL, DR = gl.n_middle, H.n_left, H.n_right
        self.M, self.DR = M, DR
        Hmat = H.biadjacency().astype(np.int32)
        # T[l, u, j]: gadget edges from l's port at u to right port j
        T = np.zeros((gl.n_outer, M, DR), dtype=np.int32)
        lo = view.left_order
        for u in range(M):
            T[lo[u], u, :] += Hmat
        self.T = T.reshape(gl.n_outer, M * DR)
        self.inc = np.zeros((gl.n_outer, M), dtype=np.int32)
        for l, nb in enumerate(gl.graph.left_adjacency):
            for u in nb:
                self.inc[l, u] += 1
        ro = view.right_order
        # ports grouped by the right vertex they land on, for segment sums
        flat_r = ro.ravel()
        self.port_perm = np.argsort(flat_r, kind="stable")
        self.port_starts = _segment_starts(flat_r[self.port_perm])
        self.Z = view.z.biadjacency().astype(np.int32)
        # aligned ports of common right neighbours for every directed pair (u, v)
        face_members = gr.graph.left_adjacency
        part = gr.part_of
        families = {key: {frozenset(s) for s in fam} for key, fam in gr.special_sets.items()}
        pos = [{int(r): j for j, r in enumerate(ro[u])} for u in range(M)]
        pu, pv, ju, jv, pid = [], [], [], [], []
        self.pairs, self.in_family = [], []
        for u in range(M):
            shared = defaultdict(list)
            for j, r in enumerate(ro[u]):
                for v in face_members[int(r)]:
                    if v != u:
                        shared[v].append((j, pos[v][int(r)]))
            for v in sorted(shared):
                idx = len(self.pairs)
                self.pairs.append((u, v))
                A = frozenset(j for j, _ in shared[v])
                self.in_family.append(A in families.get((part[u], part[v]), ()))
                for a, b in shared[v]:
                    pu.append(u); pv.append(v); ju.append(a); jv.append(b); pid.append(idx)
        n_pairs = len(self.pairs)
        self.flat_u = np.array(pu, dtype=np.int64) * DR + np.array(ju, dtype=np.int64)
        self.flat_v = np.array(pv, dtype=np.int64) * DR + np.array(jv, dtype=np.int64)
        self.pair_u = np.array([u for u, _ in self.pairs], dtype=np.int64)
        # pid is non-decreasing, so each pair owns one contiguous segment
        self.pair_starts = _segment_starts(np.array(pid, dtype=np.int64))

    def run(self, rows: np.ndarray, tau: float, delta: float) -> dict:
        """Per row of seed indices: blue-unique count, UN_Z count, and the worst
        ``multiplicity - mass`` over collision pairs whose blue end is low."""
        c = self.T[rows].sum(axis=1)
        blue = c == 1
        red = c >= 2
        nb = np.add.reduceat(blue[:, self.port_perm].astype(np.int32), self.port_starts, axis=1)
        nr = np.add.reduceat(red[:, self.port_perm].astype(np.int32), self.port_starts, axis=1)
        blue_unique = ((nb == 1) & (nr == 0)).sum(axis=1)
        un_z = (self.Z[rows].sum(axis=1) == 1).sum(axis=1)
        if len(self.pairs):
            colored = c >= 1
            mult = np.add.reduceat((blue[:, self.flat_u] & colored[:, self.flat_v]).astype(np.int32),
                                   self.pair_starts, axis=1)
            mass = np.add.reduceat(colored[:, self.flat_u].astype(np.int32), self.pair_starts, axis=1)
            low = self.inc[rows].sum(axis=1) <= tau / delta
            active = low[:, self.pair_u] & (mult > 0)
            excess = np.where(active, mult - mass, np.iinfo(np.int32).min).max(axis=1)
            pairs_checked = int(active.sum())
        else:
            excess = np.full(len(rows), np.iinfo(np.int32).min)
            pairs_checked = 0
        return {"blue_unique": blue_unique, "un_z": un_z, "worst_excess": excess,
                "pairs_checked": pairs_checked}
