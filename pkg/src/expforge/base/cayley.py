"""Cayley clique complexes from a group table and a generator partition.

Convention: ``m`` is adjacent to ``m * s`` for ``s`` in S, so a face
generator ``sigma = (id, s_1, ..., s_{k-1})`` yields the faces ``m * sigma``
and requires ``s_a^{-1} s_b`` in S for every pair of slots.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..graph import CliqueComplex
from .groups import GroupTable, cyclic_group, direct_product

DEFAULT_WORK_CAP = 50_000_000


class CayleyError(ValueError):
    pass


class DegreeNotRealizable(ValueError):
    pass


@dataclass(frozen=True)
class CayleySpec:
    group: GroupTable
    generator_parts: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        parts = tuple(tuple(sorted(int(x) for x in p)) for p in self.generator_parts)
        object.__setattr__(self, "generator_parts", parts)
        g, e = self.group, self.group.identity
        seen = {}
        for i, part in enumerate(parts, start=1):
            for s in part:
                if not 0 <= s < g.order:
                    raise CayleyError(f"generator {s} is not a group element")
                if s == e:
                    raise CayleyError("identity must not be a generator")
                if s in seen:
                    raise CayleyError(f"generator {s} appears in S_{seen[s]} and S_{i}")
                seen[s] = i
        k = self.k
        for s, i in seen.items():
            j = seen.get(int(g.inv[s]))
            if j is None:
                raise CayleyError(f"generator set is not symmetric: inverse of {s} missing")
            if j != (k - i) % k:
                raise CayleyError(f"inverse of {s} (in S_{i}) lies in S_{j}, expected S_{k - i}")

    @property
    def k(self) -> int:
        return len(self.generator_parts) + 1

    @cached_property
    def slot_of(self) -> dict[int, int]:
        out = {self.group.identity: 0}
        for i, part in enumerate(self.generator_parts, start=1):
            for s in part:
                out[s] = i
        return out

    @cached_property
    def generators(self) -> frozenset:
        return frozenset(s for part in self.generator_parts for s in part)

    @cached_property
    def part_labels(self) -> np.ndarray:
        """Part index of every element: the label rises by i along each S_i step.

        Raises CayleyError when no such k-colouring exists.
        """
        g, k = self.group, self.k
        labels = np.full(g.order, -1, dtype=np.int64)
        steps = [(s, i) for i, part in enumerate(self.generator_parts, start=1) for s in part]
        for root in range(g.order):
            if labels[root] >= 0:
                continue
            labels[root] = 0
            queue = deque([root])
            while queue:
                m = queue.popleft()
                for s, i in steps:
                    x = int(g.mul[m, s])
                    want = (labels[m] + i) % k
                    if labels[x] < 0:
                        labels[x] = want
                        queue.append(x)
                    elif labels[x] != want:
                        raise CayleyError(
                            f"generator partition admits no consistent {k}-partition "
                            f"(conflict at element {x})")
        labels.setflags(write=False)
        return labels


@dataclass(frozen=True, order=True)
class FaceGenerator:
    """``elements[i]`` lies in S_i; ``elements[0]`` is the identity."""

    elements: tuple[int, ...]

    def __iter__(self):
        return iter(self.elements)


def face_generators(spec: CayleySpec, work_cap: int = DEFAULT_WORK_CAP) -> list[FaceGenerator]:
    g, gens = spec.group, spec.generators
    parts = spec.generator_parts
    if any(len(p) == 0 for p in parts):
        return []
    out = []
    work = 0

    def extend(chosen):
        nonlocal work
        i = len(chosen)
        if i == spec.k:
            out.append(FaceGenerator(tuple(chosen)))
            return
        for s in parts[i - 1]:
            work += 1
            if work > work_cap:
                raise CayleyError(f"face generator search exceeded work cap {work_cap}")
            if all(int(g.mul[g.inv[t], s]) in gens for t in chosen[1:]):
                extend(chosen + [s])

    extend([g.identity])
    out.sort()
    return out


def translate(spec: CayleySpec, m: int, sigma: FaceGenerator) -> tuple[int, ...]:
    """The face ``m * sigma`` ordered by part index."""
    g, k = spec.group, spec.k
    labels = spec.part_labels
    face = [0] * k
    base = int(labels[m])
    for i, s in enumerate(sigma.elements):
        face[(base + i) % k] = int(g.mul[m, s])
    return tuple(face)


def build_cayley_complex(spec: CayleySpec, face_gens=None,
                         work_cap: int = DEFAULT_WORK_CAP) -> CliqueComplex:
    """All faces ``m * sigma``; with ``face_gens`` given this is the truncated complex."""
    n = spec.group.order
    est = n * max(1, len(spec.generators)) ** (spec.k - 1)
    if face_gens is None:
        if est > work_cap:
            raise CayleyError(f"estimated work {est} exceeds cap {work_cap}")
        face_gens = face_generators(spec, work_cap)
    labels = spec.part_labels
    faces = {translate(spec, m, sigma) for m in range(n) for sigma in face_gens}
    return CliqueComplex(spec.k, tuple(int(x) for x in labels), tuple(sorted(faces)))


def shift(spec: CayleySpec, sigma: FaceGenerator, slot: int) -> FaceGenerator | None:
    """``s^{-1} sigma`` for ``s = sigma[slot]``, or None if that is not a face generator."""
    g = spec.group
    s_inv = int(g.inv[sigma.elements[slot]])
    out = [None] * spec.k
    for t in sigma.elements:
        x = int(g.mul[s_inv, t])
        i = spec.slot_of.get(x)
        if i is None or out[i] is not None:
            return None
        out[i] = x
    return FaceGenerator(tuple(out))


def equivalence_classes(gens, spec: CayleySpec) -> list[list[FaceGenerator]]:
    """Partition ``gens`` under ``sigma ~ s^{-1} sigma`` (s in S)."""
    pool = set(gens)
    done = set()
    classes = []
    for sigma in sorted(pool):
        if sigma in done:
            continue
        cls = {sigma}
        for slot in range(1, spec.k):
            other = shift(spec, sigma, slot)
            if other is not None and other in pool:
                cls.add(other)
        done |= cls
        classes.append(sorted(cls))
    classes.sort()
    return classes


def truncate_to_degree(classes, D: int, total_generators: int | None = None,
                       k: int | None = None) -> list[FaceGenerator]:
    """Pick ``D/j`` whole classes of a common size ``j``.

    ``j`` is the admissible class size (``j | D`` and enough members) holding the
    most generators; classes are taken in lexicographic order. Passing
    ``total_generators`` and ``k`` additionally enforces ``D <= |F(S)|/k``.
    """
    if D <= 0:
        raise ValueError("target degree must be positive")
    if total_generators is not None and k is not None and D * k > total_generators:
        raise DegreeNotRealizable(f"D={D} exceeds |F(S)|/k = {total_generators}/{k}")
    by_size: dict[int, list] = {}
    for cls in sorted(sorted(c) for c in classes):
        by_size.setdefault(len(cls), []).append(cls)
    totals = {j: j * len(v) for j, v in by_size.items()}
    admissible = [j for j in by_size if D % j == 0 and totals[j] >= D]
    if not admissible:
        sizes = ", ".join(f"j={j} ({totals[j]} generators)" for j in sorted(by_size))
        raise DegreeNotRealizable(
            f"degree {D} not realizable: no class size divides D with enough members; "
            f"available class sizes: {sizes or 'none'}")
    j = max(admissible, key=lambda t: (totals[t], -t))
    return [sigma for cls in by_size[j][:D // j] for sigma in cls]


# Worked examples -----------------------------------------------------------

def _cyclic_shift_spec(k: int, m: int, offsets) -> CayleySpec:
    """Z_k x Z_m with S_i = {(i, t) : t in offsets}; offsets must be symmetric."""
    group = direct_product(cyclic_group(k), cyclic_group(m))
    offs = sorted({t % m for t in offsets})
    parts = tuple(tuple(i * m + t for t in offs) for i in range(1, k))
    return CayleySpec(group, parts)


def complete_partite_spec(k: int, m: int) -> CayleySpec:
    """Complex whose faces are all transversals of k parts of size m."""
    return _cyclic_shift_spec(k, m, range(m))


def window_spec(k: int, m: int) -> CayleySpec:
    """Z_k x Z_m with S_i = {(i, -1), (i, 0), (i, 1)}; needs m >= 4 to stay non-complete."""
    return _cyclic_shift_spec(k, m, (-1, 0, 1))
