"""Unique-neighbor expansion profiles of small vertex sets."""

from __future__ import annotations

import math

import numpy as np

from ..enumeration import (DEFAULT_EXHAUSTIVE_BUDGET, default_workers, iter_subsets, ordered_map,
                           sample_subsets, size_plan)
from ..graph import LEFT, RIGHT, BipartiteMultigraph


def _incidence(z: BipartiteMultigraph, side: str) -> np.ndarray:
    if side == LEFT:
        return z.biadjacency().astype(np.int32)
    if side == RIGHT:
        return z.biadjacency().T.astype(np.int32).copy()
    raise ValueError(f"side must be {LEFT!r} or {RIGHT!r}")


def measure_une(z: BipartiteMultigraph, side: str = LEFT, size_cap: int = 4,
                sample_budget: int = 2000, seed: int = 0,
                exhaustive_budget: int = DEFAULT_EXHAUSTIVE_BUDGET,
                workers: int | None = None) -> dict:
    """Per size s <= size_cap, min ``|UN(S)|/|S|`` over S on ``side``; exhaustive while
    the running subset count fits ``exhaustive_budget``, seeded samples after."""
    B = _incidence(z, side)
    n = B.shape[0]
    workers = default_workers() if workers is None else workers
    rng = np.random.default_rng(seed)
    plan = size_plan(n, range(1, min(size_cap, n) + 1), exhaustive_budget, sample_budget)
    step = max(1, (1 << 22) // max(1, B.shape[1] * max(1, size_cap)))

    def scan(rows):
        best = (math.inf, None)
        for a in range(0, len(rows), step):
            part = rows[a:a + step]
            un = (B[part].sum(axis=1) == 1).sum(axis=1)
            j = int(np.argmin(un))
            if un[j] < best[0]:
                best = (int(un[j]), part[j])
        return best

    profile = []
    for s, mode, count in plan:
        chunks = iter_subsets(n, s) if mode == "exhaustive" else sample_subsets(rng, n, s, count)
        best = (math.inf, None)
        for val, row in ordered_map(scan, chunks, workers):
            if val < best[0]:
                best = (val, row)
        profile.append({"size": s, "mode": mode, "count": count, "min_unique": best[0],
                        "min_ratio": best[0] / s, "witness": best[1].tolist()})
    glob = min(profile, key=lambda p: p["min_ratio"]) if profile else None
    modes = {p["mode"] for p in profile}
    return {"side": side, "size_cap": size_cap, "seed": seed, "sample_budget": sample_budget,
            "mode": modes.pop() if len(modes) == 1 else ("mixed" if modes else "exhaustive"),
            "profile": profile,
            "global_min_ratio": glob["min_ratio"] if glob else None,
            "global_witness": glob["witness"] if glob else None}
