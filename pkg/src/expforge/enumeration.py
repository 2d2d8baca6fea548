"""Chunked subset enumeration, seeded subset sampling and ordered parallel maps.

Subsets come out in lexicographic order as rows of an int array, so a
``first max`` reduction over chunks gives the same witness for any worker count.
"""

from __future__ import annotations

import os
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from math import comb

import numpy as np

DEFAULT_MAX_ROWS = 1 << 17
DEFAULT_EXHAUSTIVE_BUDGET = 20_000_000


def default_workers() -> int:
    raw = os.environ.get("EXPFORGE_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"EXPFORGE_WORKERS must be an integer, got {raw!r}") from None


def _combos(lo: int, n: int, t: int) -> np.ndarray:
    """All t-subsets of ``range(lo, n)`` as rows, lexicographic."""
    if t == 0:
        return np.zeros((1, 0), dtype=np.int32)
    rows = np.arange(lo, n, dtype=np.int32)[:, None]
    for _ in range(t - 1):
        last = rows[:, -1].astype(np.int64)
        cnt = n - 1 - last
        rep = np.repeat(np.arange(len(rows)), cnt)
        starts = np.cumsum(cnt) - cnt
        new = last[rep] + 1 + (np.arange(int(cnt.sum())) - starts[rep])
        rows = np.hstack([rows[rep], new[:, None].astype(np.int32)])
    return rows


def iter_subsets(n: int, size: int, max_rows: int = DEFAULT_MAX_ROWS, prefix=()):
    """Yield all ``size``-subsets of ``range(n)`` in lexicographic chunks."""
    if size > n:
        return
    lo = prefix[-1] + 1 if prefix else 0
    t = size - len(prefix)
    if t == 0:
        yield np.array([prefix], dtype=np.int32)
        return
    if t == 1 or comb(n - lo, t) <= max_rows:
        tail = _combos(lo, n, t)
        if prefix:
            head = np.broadcast_to(np.array(prefix, dtype=np.int32), (len(tail), len(prefix)))
            tail = np.hstack([head, tail])
        for a in range(0, len(tail), max_rows):
            yield tail[a:a + max_rows]
        return
    for f in range(lo, n - t + 1):
        yield from iter_subsets(n, size, max_rows, prefix + (f,))


def sample_subsets(rng: np.random.Generator, n: int, size: int, count: int,
                   batch: int = 4096):
    """Yield ``count`` uniform random ``size``-subsets (sorted rows), in batches."""
    done = 0
    while done < count:
        b = min(batch, count - done)
        keys = rng.random((b, n))
        rows = np.sort(np.argpartition(keys, size - 1, axis=1)[:, :size], axis=1) \
            if size < n else np.tile(np.arange(n), (b, 1))
        yield rows.astype(np.int32)
        done += b


def size_plan(n: int, sizes, budget: int, samples: int):
    """Per size, ``("exhaustive", C(n,s))`` while the running total fits ``budget``,
    else ``("sampled", samples)``."""
    plan = []
    used = 0
    for s in sizes:
        c = comb(n, s)
        if used + c <= budget:
            plan.append((s, "exhaustive", c))
            used += c
        else:
            plan.append((s, "sampled", samples))
    return plan


def ordered_map(fn, items, workers: int = 1):
    """``map(fn, items)`` with at most ``2*workers`` chunks in flight, results in order."""
    if workers <= 1:
        for it in items:
            yield fn(it)
        return
    with ThreadPoolExecutor(workers) as ex:
        pending = deque()
        for it in items:
            pending.append(ex.submit(fn, it))
            if len(pending) >= 2 * workers:
                yield pending.popleft().result()
        while pending:
            yield pending.popleft().result()


def neighbor_masks(n_items: int, n_targets: int, pairs) -> np.ndarray:
    """``masks[a]`` is the bitset (uint64 words) of targets adjacent to item ``a``."""
    words = max(1, (n_targets + 63) // 64)
    masks = np.zeros((n_items, words), dtype=np.uint64)
    for a, b in pairs:
        masks[a, b >> 6] |= np.uint64(1) << np.uint64(b & 63)
    return masks


def union_masks(masks: np.ndarray, rows: np.ndarray) -> np.ndarray:
    out = masks[rows[:, 0]].copy()
    for c in range(1, rows.shape[1]):
        out |= masks[rows[:, c]]
    return out


def popcount(masks: np.ndarray) -> np.ndarray:
    return np.bitwise_count(masks).sum(axis=-1, dtype=np.int64)
