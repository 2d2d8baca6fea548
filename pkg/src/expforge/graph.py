"""Bipartite multigraphs, clique complexes and their text formats.

Text formats
------------
BGF v1 (bipartite graph)::

    bgf1 <n_L> <n_R> <m>
    <left> <right> [tag]        # m lines, 0-based indices

CXF v1 (k-partite clique complex, maximal faces only)::

    cxf1 <k> <n_0> ... <n_{k-1}> <f>
    <v_0> ... <v_{k-1}>         # f lines, one part-local index per part
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np


class FormatError(ValueError):
    """Malformed BGF/CXF/GTF input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"{message} at line {line}")


LEFT, RIGHT = "left", "right"


def _other(side: str) -> str:
    if side == LEFT:
        return RIGHT
    if side == RIGHT:
        return LEFT
    raise ValueError(f"unknown side {side!r}")


@dataclass(frozen=True)
class VertexSet:
    side: str | int
    members: tuple[int, ...]

    @classmethod
    def of(cls, side, members: Iterable[int]) -> "VertexSet":
        return cls(side, tuple(sorted(set(int(m) for m in members))))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, v) -> bool:
        return v in self._lookup

    @cached_property
    def _lookup(self) -> frozenset:
        return frozenset(self.members)


@dataclass(frozen=True)
class BipartiteMultigraph:
    """Bipartite graph on ``range(n_left) x range(n_right)``; parallel edges allowed."""

    n_left: int
    n_right: int
    edges: tuple[tuple[int, int], ...]
    tags: tuple[str | None, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(a), int(b)) for a, b in self.edges))
        if self.tags is not None:
            object.__setattr__(self, "tags", tuple(self.tags))
            if len(self.tags) != len(self.edges):
                raise ValueError("tags must parallel edges")
        for a, b in self.edges:
            if not (0 <= a < self.n_left):
                raise ValueError(f"left index {a} out of range [0, {self.n_left})")
            if not (0 <= b < self.n_right):
                raise ValueError(f"right index {b} out of range [0, {self.n_right})")

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def left_array(self) -> np.ndarray:
        return np.fromiter((a for a, _ in self.edges), dtype=np.int64, count=self.m)

    @cached_property
    def right_array(self) -> np.ndarray:
        return np.fromiter((b for _, b in self.edges), dtype=np.int64, count=self.m)

    def degrees(self, side: str = LEFT) -> np.ndarray:
        if side == LEFT:
            return np.bincount(self.left_array, minlength=self.n_left)
        return np.bincount(self.right_array, minlength=self.n_right)

    @cached_property
    def left_adjacency(self) -> tuple[tuple[int, ...], ...]:
        """Right neighbors of every left vertex, with multiplicity."""
        adj = [[] for _ in range(self.n_left)]
        for a, b in self.edges:
            adj[a].append(b)
        return tuple(tuple(x) for x in adj)

    @cached_property
    def right_adjacency(self) -> tuple[tuple[int, ...], ...]:
        adj = [[] for _ in range(self.n_right)]
        for a, b in self.edges:
            adj[b].append(a)
        return tuple(tuple(x) for x in adj)

    def adjacency(self, side: str) -> tuple[tuple[int, ...], ...]:
        return self.left_adjacency if side == LEFT else self.right_adjacency

    def size(self, side: str) -> int:
        return self.n_left if side == LEFT else self.n_right

    def biadjacency(self) -> np.ndarray:
        """Dense ``n_left x n_right`` matrix of edge multiplicities."""
        mat = np.zeros((self.n_left, self.n_right), dtype=float)
        np.add.at(mat, (self.left_array, self.right_array), 1.0)
        return mat

    def transpose(self) -> "BipartiteMultigraph":
        return BipartiteMultigraph(self.n_right, self.n_left,
                                   tuple((b, a) for a, b in self.edges), self.tags)

    def edge_multiset(self) -> Counter:
        return Counter(self.edges)

    def same_edges(self, other: "BipartiteMultigraph") -> bool:
        return (self.n_left, self.n_right) == (other.n_left, other.n_right) and \
            self.edge_multiset() == other.edge_multiset()

    def is_simple(self) -> bool:
        return len(set(self.edges)) == self.m


def parse_graph(text: bytes | str) -> BipartiteMultigraph:
    if isinstance(text, bytes):
        text = text.decode()
    lines = text.splitlines()
    if not lines:
        raise FormatError("empty input", 1)
    head = lines[0].split()
    if len(head) != 4 or head[0] != "bgf1":
        raise FormatError("malformed header, expected 'bgf1 <n_L> <n_R> <m>'", 1)
    try:
        n_l, n_r, m = (int(x) for x in head[1:])
    except ValueError:
        raise FormatError("non-integer header field", 1) from None
    if min(n_l, n_r, m) < 0:
        raise FormatError("negative header field", 1)
    body = [(i + 2, ln) for i, ln in enumerate(lines[1:]) if ln.strip()]
    if len(body) > m:
        raise FormatError(f"trailing content after {m} edges", body[m][0])
    edges, tags = [], []
    for lineno, ln in body:
        tok = ln.split()
        if len(tok) not in (2, 3):
            raise FormatError("edge line must be '<left> <right> [tag]'", lineno)
        try:
            a, b = int(tok[0]), int(tok[1])
        except ValueError:
            raise FormatError("non-integer vertex index", lineno) from None
        if not 0 <= a < n_l:
            raise FormatError(f"left index {a} ≥ {n_l}" if a >= 0 else f"left index {a} < 0", lineno)
        if not 0 <= b < n_r:
            raise FormatError(f"right index {b} ≥ {n_r}" if b >= 0 else f"right index {b} < 0", lineno)
        edges.append((a, b))
        tags.append(tok[2] if len(tok) == 3 else None)
    if len(body) < m:
        raise FormatError(f"truncated edge list: expected {m} edges, found {len(body)}",
                          len(lines) + 1)
    has_tags = any(t is not None for t in tags)
    return BipartiteMultigraph(n_l, n_r, tuple(edges), tuple(tags) if has_tags else None)


def write_graph(g: BipartiteMultigraph) -> bytes:
    out = [f"bgf1 {g.n_left} {g.n_right} {g.m}"]
    tags = g.tags or (None,) * g.m
    for (a, b), t in zip(g.edges, tags):
        if t is None:
            out.append(f"{a} {b}")
        else:
            if any(c.isspace() for c in t) or not t:
                raise ValueError(f"tag {t!r} must be non-empty without spaces")
            out.append(f"{a} {b} {t}")
    return ("\n".join(out) + "\n").encode()


@dataclass
class BiregularReport:
    d_left: int
    d_right: int
    left_violations: list[tuple[int, int]]
    right_violations: list[tuple[int, int]]
    handshake_ok: bool

    @property
    def ok(self) -> bool:
        return not self.left_violations and not self.right_violations and self.handshake_ok

    def to_dict(self) -> dict:
        return {"d_left": self.d_left, "d_right": self.d_right, "ok": self.ok,
                "handshake_ok": self.handshake_ok,
                "left_violations": [list(x) for x in self.left_violations],
                "right_violations": [list(x) for x in self.right_violations]}


def validate_biregular(g: BipartiteMultigraph, d_left: int, d_right: int) -> BiregularReport:
    dl, dr = g.degrees(LEFT), g.degrees(RIGHT)
    lv = [(int(v), int(dl[v])) for v in np.nonzero(dl != d_left)[0]]
    rv = [(int(v), int(dr[v])) for v in np.nonzero(dr != d_right)[0]]
    return BiregularReport(d_left, d_right, lv, rv, g.n_left * d_left == g.n_right * d_right)


def unique_neighbors(g: BipartiteMultigraph, s: VertexSet) -> VertexSet:
    """Opposite-side vertices with exactly one edge (counting multiplicity) into ``s``."""
    if s.side not in (LEFT, RIGHT):
        raise ValueError(f"vertex set side {s.side!r} is not a side of a bipartite graph")
    n = g.size(s.side)
    if s.members and not (0 <= s.members[0] and s.members[-1] < n):
        raise ValueError("vertex set out of range")
    adj = g.adjacency(s.side)
    hits = Counter()
    for v in s.members:
        hits.update(adj[v])
    return VertexSet.of(_other(s.side), (w for w, c in hits.items() if c == 1))


def neighborhood(g: BipartiteMultigraph, s: VertexSet) -> VertexSet:
    adj = g.adjacency(s.side)
    return VertexSet.of(_other(s.side), (w for v in s.members for w in adj[v]))


@dataclass(frozen=True)
class SymmetricGraph:
    """Simple undirected graph on ``range(n)``."""

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        clean = set()
        for a, b in self.edges:
            a, b = int(a), int(b)
            if a == b:
                raise ValueError(f"self-loop at {a}")
            if not (0 <= a < self.n and 0 <= b < self.n):
                raise ValueError(f"edge ({a}, {b}) out of range")
            clean.add((min(a, b), max(a, b)))
        object.__setattr__(self, "edges", tuple(sorted(clean)))

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        adj = [[] for _ in range(self.n)]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return tuple(tuple(sorted(x)) for x in adj)

    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self.adjacency], dtype=np.int64)

    def adjacency_matrix(self) -> np.ndarray:
        mat = np.zeros((self.n, self.n))
        for a, b in self.edges:
            mat[a, b] = mat[b, a] = 1.0
        return mat

    def induced(self, members: Sequence[int]) -> "SymmetricGraph":
        idx = {v: i for i, v in enumerate(members)}
        return SymmetricGraph(len(members), tuple((idx[a], idx[b]) for a, b in self.edges
                                                 if a in idx and b in idx))


@dataclass(frozen=True)
class CliqueComplex:
    """k-partite pure complex stored by its maximal faces.

    Vertices are ``range(len(part_of))``; each face lists one vertex per part,
    ordered by part index.
    """

    k: int
    part_of: tuple[int, ...]
    faces: tuple[tuple[int, ...], ...]
    labels: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "part_of", tuple(int(x) for x in self.part_of))
        object.__setattr__(self, "faces", tuple(tuple(int(v) for v in f) for f in self.faces))
        n = len(self.part_of)
        for p in self.part_of:
            if not 0 <= p < self.k:
                raise ValueError(f"part index {p} out of range for k={self.k}")
        for f in self.faces:
            if len(f) != self.k:
                raise ValueError(f"face {f} does not have {self.k} vertices")
            for a, v in enumerate(f):
                if not 0 <= v < n:
                    raise ValueError(f"face {f} has vertex out of range")
                if self.part_of[v] != a:
                    raise ValueError(f"face {f} is not transversal to the partition")

    @property
    def n(self) -> int:
        return len(self.part_of)

    @cached_property
    def parts(self) -> tuple[tuple[int, ...], ...]:
        out = [[] for _ in range(self.k)]
        for v, p in enumerate(self.part_of):
            out[p].append(v)
        return tuple(tuple(x) for x in out)

    @cached_property
    def face_array(self) -> np.ndarray:
        return np.array(self.faces, dtype=np.int64).reshape(len(self.faces), self.k)

    def vertex_degrees(self) -> np.ndarray:
        return np.bincount(self.face_array.ravel(), minlength=self.n)


def parse_complex(text: bytes | str) -> CliqueComplex:
    if isinstance(text, bytes):
        text = text.decode()
    lines = text.splitlines()
    if not lines:
        raise FormatError("empty input", 1)
    head = lines[0].split()
    if len(head) < 3 or head[0] != "cxf1":
        raise FormatError("malformed header, expected 'cxf1 <k> <n_0> ... <n_{k-1}> <f>'", 1)
    try:
        nums = [int(x) for x in head[1:]]
    except ValueError:
        raise FormatError("non-integer header field", 1) from None
    k = nums[0]
    if k < 1 or len(nums) != k + 2:
        raise FormatError(f"header must list k={k} part sizes and a face count", 1)
    sizes, f = nums[1:k + 1], nums[k + 1]
    offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
    part_of = [a for a, s in enumerate(sizes) for _ in range(s)]
    body = [(i + 2, ln) for i, ln in enumerate(lines[1:]) if ln.strip()]
    if len(body) < f:
        raise FormatError(f"truncated face list: expected {f} faces, found {len(body)}",
                          len(lines) + 1)
    if len(body) > f:
        raise FormatError(f"trailing content after {f} faces", body[f][0])
    faces = []
    for lineno, ln in body:
        tok = ln.split()
        if len(tok) != k:
            raise FormatError(f"face line must have {k} indices", lineno)
        try:
            loc = [int(t) for t in tok]
        except ValueError:
            raise FormatError("non-integer vertex index", lineno) from None
        for a, x in enumerate(loc):
            if not 0 <= x < sizes[a]:
                raise FormatError(f"part {a} index {x} ≥ {sizes[a]}", lineno)
        faces.append(tuple(int(offsets[a]) + x for a, x in enumerate(loc)))
    return CliqueComplex(k, tuple(part_of), tuple(faces))


def write_complex(c: CliqueComplex) -> bytes:
    local = {}
    for part in c.parts:
        for i, v in enumerate(part):
            local[v] = i
    sizes = " ".join(str(len(p)) for p in c.parts)
    out = [f"cxf1 {c.k} {sizes} {len(c.faces)}"]
    out += [" ".join(str(local[v]) for v in f) for f in c.faces]
    return ("\n".join(out) + "\n").encode()
