"""Faces meeting a vertex set in three or more vertices, and triangles inside it."""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from math import comb

import numpy as np

from ..base.bounds import tau_lambda_formulas
from ..enumeration import DEFAULT_EXHAUSTIVE_BUDGET, iter_subsets, sample_subsets, size_plan
from ..graph import CliqueComplex


@dataclass
class TriangleReport:
    size: int
    faces_with_triangle: int
    triangles: dict
    bound_exponent: str | None

    @property
    def ratio(self) -> float:
        return self.faces_with_triangle / self.size if self.size else 0.0

    def to_dict(self) -> dict:
        return {"size": self.size, "faces_with_triangle": self.faces_with_triangle,
                "ratio": self.ratio, "bound_exponent": self.bound_exponent,
                "triangles": [{"parts": list(t), "count": c} for t, c in sorted(self.triangles.items())]}


def _members(U) -> list[int]:
    return sorted(set(getattr(U, "members", U)))


def triangle_face_count(complex: CliqueComplex, U) -> TriangleReport:
    members = _members(U)
    mask = np.zeros(complex.n, dtype=bool)
    mask[members] = True
    faces = complex.face_array
    if len(faces):
        hits = mask[faces].sum(axis=1)
        heavy = faces[hits >= 3]
    else:
        heavy = np.zeros((0, complex.k), dtype=np.int64)
    tri = set()
    for f in heavy:
        inside = [int(v) for v in f if mask[v]]
        tri.update(itertools.combinations(inside, 3))
    per = defaultdict(int)
    for t in tri:
        per[tuple(sorted(complex.part_of[v] for v in t))] += 1
    expo = str(tau_lambda_formulas(complex.k)["tau_exponent"]) if complex.k >= 3 else None
    return TriangleReport(len(members), int(len(heavy)), dict(per), expo)


def naive_triangle_face_count(complex: CliqueComplex, U) -> tuple[int, dict]:
    """Independent slow count: face-by-face membership and triple-by-triple lookups."""
    Uset = set(_members(U))
    total = 0
    for f in complex.faces:
        if sum(1 for v in f if v in Uset) >= 3:
            total += 1
    incident = defaultdict(set)
    for idx, f in enumerate(complex.faces):
        for v in f:
            incident[v].add(idx)
    per = defaultdict(int)
    for a, b, c in itertools.combinations(sorted(Uset), 3):
        parts = (complex.part_of[a], complex.part_of[b], complex.part_of[c])
        if len(set(parts)) < 3:
            continue
        if incident[a] & incident[b] & incident[c]:
            per[tuple(sorted(parts))] += 1
    return total, dict(per)


def triangle_expander_tau(complex: CliqueComplex, sample_budget: int = 2000, size_cap: int = 6,
                          seed: int = 0, exhaustive_budget: int = DEFAULT_EXHAUSTIVE_BUDGET) -> dict:
    """Max of ``|F^{k,3}(U)| / |U|`` over vertex sets U with ``|U| <= size_cap``."""
    n = complex.n
    faces = complex.face_array
    inc = np.zeros((n, len(faces)), dtype=np.int16)
    for col in range(faces.shape[1] if len(faces) else 0):
        inc[faces[:, col], np.arange(len(faces))] += 1
    rng = np.random.default_rng(seed)
    sizes = [s for s in range(3, min(size_cap, n) + 1)]
    plan = size_plan(n, sizes, exhaustive_budget, sample_budget)
    best, witness = 0.0, []
    per_size = []
    for s, mode, count in plan:
        chunks = iter_subsets(n, s, max_rows=2048) if mode == "exhaustive" \
            else sample_subsets(rng, n, s, count, batch=2048)
        size_best, size_wit = -1, []
        for rows in chunks:
            if len(faces) == 0:
                vals = np.zeros(len(rows), dtype=np.int64)
            else:
                vals = (inc[rows].sum(axis=1) >= 3).sum(axis=1)
            j = int(np.argmax(vals))
            if vals[j] > size_best:
                size_best, size_wit = int(vals[j]), rows[j].tolist()
        ratio = size_best / s
        per_size.append({"size": s, "mode": mode, "count": count, "max_faces": size_best,
                         "ratio": ratio, "witness": size_wit})
        if ratio > best:
            best, witness = ratio, size_wit
    modes = {p["mode"] for p in per_size}
    return {"tau": best, "witness": witness, "per_size": per_size, "size_cap": size_cap,
            "mode": modes.pop() if len(modes) == 1 else ("mixed" if modes else "exhaustive"),
            "seed": seed, "sample_budget": sample_budget}


def exhaustive_feasible(n: int, size_cap: int, budget: int = DEFAULT_EXHAUSTIVE_BUDGET) -> bool:
    return sum(comb(n, s) for s in range(3, size_cap + 1)) <= budget
