"""Structured bipartite graphs: face-vertex incidence with neighbor orderings
and special-set families, and a verifier for the four structural properties."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

from ..graph import BipartiteMultigraph, CliqueComplex, validate_biregular
from .cayley import CayleySpec, build_cayley_complex, face_generators, translate


@dataclass(frozen=True, eq=False)
class StructuredBipartite:
    """Incidence graph ``(V, M)``: graph left side is V (faces), right side is M (vertices).

    ``nbr_order[u][t]`` is the t-th face around vertex ``u``; ``special_sets[(a, b)]``
    lists the index subsets of ``range(D)`` realised as common neighborhoods.
    """

    graph: BipartiteMultigraph
    k: int
    D: int
    part_of: tuple[int, ...]
    nbr_order: tuple[tuple[int, ...], ...]
    special_sets: dict = field(default_factory=dict)
    complex: CliqueComplex | None = None

    @property
    def n_middle(self) -> int:
        return self.graph.n_right

    @property
    def n_outer(self) -> int:
        return self.graph.n_left

    def s(self, a: int, b: int) -> int:
        return len(self.special_sets.get((a, b), ()))

    def special_family(self, a: int, b: int) -> list[tuple[int, ...]]:
        return list(self.special_sets.get((a, b), ()))

    def to_dict(self) -> dict:
        return {
            "k": self.k, "D": self.D,
            "part_of": list(self.part_of),
            "nbr_order": [list(x) for x in self.nbr_order],
            "special_sets": [{"a": a, "b": b, "sets": [list(s) for s in fam]}
                             for (a, b), fam in sorted(self.special_sets.items())],
        }

    @classmethod
    def from_dict(cls, graph: BipartiteMultigraph, data: dict) -> "StructuredBipartite":
        special = {(d["a"], d["b"]): [tuple(s) for s in d["sets"]] for d in data["special_sets"]}
        return cls(graph, data["k"], data["D"], tuple(data["part_of"]),
                   tuple(tuple(x) for x in data["nbr_order"]), special)


def scan_special_sets(nbr_order, part_of, faces) -> dict:
    """Collect every nonempty common neighborhood, as indices into ``nbr_order[u]``."""
    family: dict = defaultdict(set)
    for u, order in enumerate(nbr_order):
        shared = defaultdict(list)
        for t, f in enumerate(order):
            for v in faces[f]:
                if v != u:
                    shared[v].append(t)
        for v, idx in shared.items():
            family[(part_of[u], part_of[v])].add(tuple(idx))
    return {key: sorted(val) for key, val in sorted(family.items())}


def incidence_graph(complex: CliqueComplex, face_gens=None,
                    spec: CayleySpec | None = None) -> StructuredBipartite:
    """Vertex-face incidence of ``complex`` with orderings and special sets.

    With ``face_gens`` (and ``spec``) the ordering around ``u`` is
    ``t -> u * face_gens[t]``; otherwise faces around ``u`` are sorted
    lexicographically.
    """
    faces = complex.faces
    index = {f: i for i, f in enumerate(faces)}
    edges = [(i, v) for i, f in enumerate(faces) for v in f]
    graph = BipartiteMultigraph(len(faces), complex.n, tuple(edges))
    if face_gens is not None:
        if spec is None:
            raise ValueError("face generators need the Cayley spec to build orderings")
        order = []
        for u in range(complex.n):
            row = []
            for sigma in face_gens:
                f = translate(spec, u, sigma)
                if f not in index:
                    raise ValueError(f"face {f} = {u}*{sigma.elements} is not in the complex")
                row.append(index[f])
            order.append(tuple(row))
        order = tuple(order)
    else:
        order = tuple(tuple(sorted(x, key=faces.__getitem__)) for x in graph.right_adjacency)
    degrees = {len(o) for o in order}
    D = max(degrees) if degrees else 0
    special = scan_special_sets(order, complex.part_of, faces)
    return StructuredBipartite(graph, complex.k, D, complex.part_of, order, special, complex)


def cayley_incidence(spec: CayleySpec, face_gens=None) -> StructuredBipartite:
    if face_gens is None:
        face_gens = face_generators(spec)
    complex = build_cayley_complex(spec, face_gens)
    return incidence_graph(complex, face_gens, spec)


@dataclass
class StructuredReport:
    property1: dict
    property2: dict
    property3: dict
    property4: dict

    @property
    def ok(self) -> bool:
        return all(p["pass"] for p in (self.property1, self.property2, self.property3, self.property4))

    def to_dict(self) -> dict:
        return {"pass": self.ok, "property1": self.property1, "property2": self.property2,
                "property3": self.property3, "property4": self.property4}


def verify_structured(sb: StructuredBipartite, max_listed: int = 50) -> StructuredReport:
    g = sb.graph
    breg = validate_biregular(g, sb.k, sb.D)
    p1 = {"pass": breg.ok, "left_violations": [list(x) for x in breg.left_violations[:max_listed]],
          "right_violations": [list(x) for x in breg.right_violations[:max_listed]]}

    bad_order = []
    for u, order in enumerate(sb.nbr_order):
        nbrs = g.right_adjacency[u]
        if len(order) != sb.D or len(set(order)) != len(order) or set(order) != set(nbrs):
            bad_order.append(u)
    p2 = {"pass": not bad_order, "violations": bad_order[:max_listed]}

    bad_parts = []
    for v, nbrs in enumerate(g.left_adjacency):
        counts = [0] * sb.k
        for u in nbrs:
            counts[sb.part_of[u]] += 1
        if any(c != 1 for c in counts):
            bad_parts.append(v)
    p3 = {"pass": not bad_parts, "violations": bad_parts[:max_listed]}

    families = {key: {frozenset(s) for s in fam} for key, fam in sb.special_sets.items()}
    mismatches = []
    for u, order in enumerate(sb.nbr_order):
        shared = defaultdict(set)
        for t, f in enumerate(order):
            for v in g.left_adjacency[f]:
                if v != u:
                    shared[v].add(t)
        for v, idx in shared.items():
            a, b = sb.part_of[u], sb.part_of[v]
            if a != b and frozenset(idx) not in families.get((a, b), ()):
                mismatches.append([u, v])
    pairs = []
    window_ok = True
    for (a, b), fam in sorted(sb.special_sets.items()):
        if a == b or not fam:
            continue
        s = len(fam)
        sizes = [len(x) for x in fam]
        lo, hi = sb.D / (2 * s), 2 * sb.D / s
        in_window = lo <= min(sizes) and max(sizes) <= hi
        window_ok &= in_window
        pairs.append({"a": a, "b": b, "s": s, "min_size": min(sizes), "max_size": max(sizes),
                      "window": [lo, hi], "in_window": in_window})
    p4 = {"pass": not mismatches and window_ok, "matches_family": not mismatches,
          "window_ok": window_ok, "mismatches": mismatches[:max_listed], "pairs": pairs}
    return StructuredReport(p1, p2, p3, p4)
