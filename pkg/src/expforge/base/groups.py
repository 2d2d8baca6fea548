"""Finite groups given by full multiplication tables, plus the GTF v1 format.

GTF v1::

    gtf1 <n>
    <n rows of n indices>       # row u, column v holds u*v
    <inverse list>
    <identity index>

Generator partition file::

    gens <k-1>
    <indices of S_1>
    ...
    <indices of S_{k-1}>        # a blank line is an empty S_i
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from ..graph import FormatError


@dataclass(frozen=True, eq=False)
class GroupTable:
    mul: np.ndarray
    inv: np.ndarray
    identity: int

    @property
    def order(self) -> int:
        return int(self.mul.shape[0])

    def __post_init__(self):
        mul = np.asarray(self.mul, dtype=np.int64)
        inv = np.asarray(self.inv, dtype=np.int64)
        n = mul.shape[0]
        if mul.shape != (n, n) or inv.shape != (n,):
            raise ValueError("multiplication table must be n x n and inverse list length n")
        if n and (mul.min() < 0 or mul.max() >= n or inv.min() < 0 or inv.max() >= n):
            raise ValueError("group table entries out of range")
        if not 0 <= self.identity < n:
            raise ValueError("identity index out of range")
        mul.setflags(write=False)
        inv.setflags(write=False)
        object.__setattr__(self, "mul", mul)
        object.__setattr__(self, "inv", inv)

    def __eq__(self, other):
        return isinstance(other, GroupTable) and self.identity == other.identity and \
            np.array_equal(self.mul, other.mul) and np.array_equal(self.inv, other.inv)

    def __hash__(self):
        return hash((self.order, self.identity, self.mul.tobytes()))


def check_group_axioms(g: GroupTable) -> list[str]:
    """Exhaustive identity/inverse/associativity check; returns the violations found."""
    n = g.order
    e = g.identity
    problems = []
    r = np.arange(n)
    if not (np.array_equal(g.mul[e], r) and np.array_equal(g.mul[:, e], r)):
        problems.append("identity law fails")
    if not (np.all(g.mul[r, g.inv] == e) and np.all(g.mul[g.inv, r] == e)):
        problems.append("inverse law fails")
    for a in range(n):
        # (a*b)*c == a*(b*c) for all b, c
        if not np.array_equal(g.mul[g.mul[a]], g.mul[a][g.mul]):
            problems.append(f"associativity fails with left factor {a}")
            break
    return problems


def cyclic_group(n: int) -> GroupTable:
    r = np.arange(n)
    return GroupTable((r[:, None] + r[None, :]) % n, (-r) % n, 0)


def direct_product(g: GroupTable, h: GroupTable) -> GroupTable:
    """G x H with element ``(a, b)`` encoded as ``a * |H| + b``."""
    m = h.order
    n = g.order * m
    a, b = np.divmod(np.arange(n), m)
    mul = g.mul[a[:, None], a[None, :]] * m + h.mul[b[:, None], b[None, :]]
    inv = g.inv[a] * m + h.inv[b]
    return GroupTable(mul, inv, g.identity * m + h.identity)


def symmetric_group(n: int) -> GroupTable:
    """S_n acting on the left; element index is the lexicographic rank of the permutation."""
    perms = list(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    size = len(perms)
    mul = np.zeros((size, size), dtype=np.int64)
    for i, p in enumerate(perms):
        for j, s in enumerate(perms):
            mul[i, j] = index[tuple(p[s[t]] for t in range(n))]
    inv = np.zeros(size, dtype=np.int64)
    for i, p in enumerate(perms):
        ip = [0] * n
        for t, x in enumerate(p):
            ip[x] = t
        inv[i] = index[tuple(ip)]
    return GroupTable(mul, inv, index[tuple(range(n))])


def _ints(tokens, lineno):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise FormatError("non-integer entry", lineno) from None


def parse_group(text: bytes | str) -> GroupTable:
    if isinstance(text, bytes):
        text = text.decode()
    lines = text.splitlines()
    head = lines[0].split() if lines else []
    if len(head) != 2 or head[0] != "gtf1":
        raise FormatError("malformed header, expected 'gtf1 <n>'", 1)
    n = _ints(head[1:], 1)[0]
    if len(lines) < n + 3:
        raise FormatError(f"truncated table: expected {n + 3} lines", len(lines) + 1)
    rows = []
    for t in range(n):
        row = _ints(lines[1 + t].split(), t + 2)
        if len(row) != n:
            raise FormatError(f"row has {len(row)} entries, expected {n}", t + 2)
        if any(not 0 <= x < n for x in row):
            raise FormatError(f"entry out of range [0, {n})", t + 2)
        rows.append(row)
    inv = _ints(lines[n + 1].split(), n + 2)
    if len(inv) != n or any(not 0 <= x < n for x in inv):
        raise FormatError(f"inverse list must hold {n} indices in range", n + 2)
    ident = _ints(lines[n + 2].split(), n + 3)
    if len(ident) != 1 or not 0 <= ident[0] < n:
        raise FormatError("identity line must hold one index in range", n + 3)
    return GroupTable(np.array(rows, dtype=np.int64).reshape(n, n), np.array(inv, dtype=np.int64), ident[0])


def write_group(g: GroupTable) -> bytes:
    out = [f"gtf1 {g.order}"]
    out += [" ".join(map(str, row)) for row in g.mul.tolist()]
    out.append(" ".join(map(str, g.inv.tolist())))
    out.append(str(g.identity))
    return ("\n".join(out) + "\n").encode()


def parse_generators(text: bytes | str) -> list[list[int]]:
    if isinstance(text, bytes):
        text = text.decode()
    lines = text.splitlines()
    head = lines[0].split() if lines else []
    if len(head) != 2 or head[0] != "gens":
        raise FormatError("malformed header, expected 'gens <k-1>'", 1)
    count = _ints(head[1:], 1)[0]
    parts = []
    for t in range(count):
        ln = lines[1 + t] if 1 + t < len(lines) else ""
        parts.append(_ints(ln.split(), t + 2))
    return parts


def write_generators(parts) -> bytes:
    out = [f"gens {len(parts)}"] + [" ".join(map(str, p)) for p in parts]
    return ("\n".join(out) + "\n").encode()
