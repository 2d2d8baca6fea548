"""Random biregular gadgets and the two pseudorandomness checks (bucket spread,
lossless expansion), plus the seeded search for a good gadget.

Logs are natural. ``D`` in the bucket-spread bound is ``D_L + D_R``.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import asdict, dataclass, field

import numpy as np

from .enumeration import (DEFAULT_EXHAUSTIVE_BUDGET, default_workers, iter_subsets,
                          neighbor_masks, ordered_map, popcount, sample_subsets,
                          size_plan, union_masks)
from .graph import BipartiteMultigraph, parse_graph, validate_biregular, write_graph

CERTIFICATE_SCHEMA = "gadget-certificate/v1"


class GadgetSearchError(RuntimeError):
    def __init__(self, message: str, tries: list):
        super().__init__(message)
        self.tries = tries


def _check_handshake(D_L, D_R, d_L, d_R):
    if min(D_L, D_R, d_L, d_R) <= 0:
        raise ValueError("gadget sizes and degrees must be positive")
    if D_L * d_L != D_R * d_R:
        raise ValueError(f"handshake fails: {D_L}*{d_L} != {D_R}*{d_R}")


@dataclass(frozen=True)
class GadgetParams:
    """``right_families`` are bucket families over ``[D_R]`` (checked on H);
    ``left_families`` are over ``[D_L]`` (checked on H^T)."""

    D_L: int
    D_R: int
    d_L: int
    d_R: int
    right_families: tuple = ()
    left_families: tuple = ()
    shrink: float = 0.9
    subset_cap: int = 8
    bucket_cap: int = 8
    sample_count: int = 2000
    seed: int = 0
    simple: bool = True
    exhaustive_budget: int = DEFAULT_EXHAUSTIVE_BUDGET

    def __post_init__(self):
        _check_handshake(self.D_L, self.D_R, self.d_L, self.d_R)
        if not 0 < self.shrink < 1:
            raise ValueError("shrink must lie in (0, 1)")
        norm = lambda fams: tuple(tuple(tuple(sorted(int(x) for x in b)) for b in fam) for fam in fams)
        object.__setattr__(self, "right_families", norm(self.right_families))
        object.__setattr__(self, "left_families", norm(self.left_families))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["right_families"] = [[list(b) for b in fam] for fam in self.right_families]
        d["left_families"] = [[list(b) for b in fam] for fam in self.left_families]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GadgetParams":
        return cls(**d)


def equal_buckets(n: int, r: int) -> tuple:
    """``range(n)`` cut into ``r`` contiguous buckets of near-equal size."""
    bounds = [round(i * n / r) for i in range(r + 1)]
    return tuple(tuple(range(bounds[i], bounds[i + 1])) for i in range(r))


def sample_biregular(D_L: int, D_R: int, d_L: int, d_R: int, seed, simple: bool = False,
                     max_repairs: int = 100_000) -> BipartiteMultigraph:
    """Configuration model: left half-edges matched to a seeded permutation of right ones.

    With ``simple`` every parallel edge is removed by degree-preserving swaps with
    a random other edge (so the output is simple but not exactly uniform).
    """
    _check_handshake(D_L, D_R, d_L, d_R)
    rng = np.random.default_rng(seed)
    left = np.repeat(np.arange(D_L), d_L)
    right = rng.permutation(np.repeat(np.arange(D_R), d_R))
    if simple:
        if d_L > D_R or d_R > D_L:
            raise ValueError("no simple biregular graph with these degrees")
        right = _repair_parallel(left, right, rng, max_repairs)
    return BipartiteMultigraph(D_L, D_R, tuple(zip(left.tolist(), right.tolist())))


def _repair_parallel(left, right, rng, max_repairs):
    right = right.copy()
    m = len(left)
    count = Counter(zip(left.tolist(), right.tolist()))
    for _ in range(max_repairs):
        dup = [e for e in range(m) if count[(left[e], right[e])] > 1]
        if not dup:
            return right
        e = dup[int(rng.integers(len(dup)))]
        f = int(rng.integers(m))
        a, b, c, d = int(left[e]), int(right[e]), int(left[f]), int(right[f])
        # swap right endpoints: (a,b),(c,d) -> (a,d),(c,b)
        if a == c or b == d or count[(a, d)] or count[(c, b)]:
            continue
        count[(a, b)] -= 1
        count[(c, d)] -= 1
        count[(a, d)] += 1
        count[(c, b)] += 1
        right[e], right[f] = d, b
    raise RuntimeError(f"could not remove parallel edges within {max_repairs} swaps")


def validate_family(family, n: int, strict: bool):
    if not family:
        raise ValueError("bucket family is empty")
    r = len(family)
    for i, b in enumerate(family):
        if not b:
            raise ValueError(f"bucket {i} is empty")
        if min(b) < 0 or max(b) >= n:
            raise ValueError(f"bucket {i} has an index outside [0, {n})")
        if strict and not (n / (2 * r) <= len(b) <= 2 * n / r):
            raise ValueError(f"bucket {i} has size {len(b)} outside [{n / (2 * r):g}, {2 * n / r:g}]")


def _plan_mode(plan) -> str:
    modes = {m for _, m, _ in plan}
    if not modes:
        return "exhaustive"
    return modes.pop() if len(modes) == 1 else "mixed"


def _subset_chunks(n, size, mode, samples, rng):
    if mode == "exhaustive":
        return iter_subsets(n, size)
    return sample_subsets(rng, n, size, samples)


def check_bucket_spread(h: BipartiteMultigraph, family, r: int | None = None, cap: int = 8,
                        samples: int = 2000, seed: int = 0, w_cap: int | None = None,
                        budget: int = DEFAULT_EXHAUSTIVE_BUDGET, strict: bool = True,
                        workers: int | None = None) -> dict:
    """Worst ratio of ``sum_{i in W} |N(S) & A_i|`` to ``32|W| max(d_L|S|/r, ln D)``.

    For fixed S and |W| = w the worst W is the w fullest buckets, so W is
    covered exactly by sorting; S runs over all sets up to ``cap`` (or samples).
    """
    D_L, D_R = h.n_left, h.n_right
    d_L = int(h.degrees()[0]) if D_L else 0
    validate_family(family, D_R, strict)
    r = len(family) if r is None else r
    w_cap = cap if w_cap is None else w_cap
    workers = default_workers() if workers is None else workers
    logD = math.log(D_L + D_R)
    s_max = D_R // d_L if d_L else 0
    w_lo = max(1, math.ceil(r * logD / d_L - 1e-12)) if d_L else 1
    w_hi = min(len(family), w_cap)
    ws = np.arange(w_lo, w_hi + 1)
    masks = neighbor_masks(D_L, D_R, h.edges)
    bucket_masks = neighbor_masks(len(family), D_R, [(i, x) for i, b in enumerate(family) for x in b])

    exhaustive_sizes = list(range(1, min(cap, s_max) + 1))
    sampled_sizes = list(range(min(cap, s_max) + 1, s_max + 1))
    plan = size_plan(D_L, exhaustive_sizes, budget, samples) + \
        [(s, "sampled", samples) for s in sampled_sizes]
    rng = np.random.default_rng(seed)

    worst, witness = 0.0, {"S": [], "W": []}
    per_size = []
    if len(ws) == 0:
        plan = []
    for s, mode, count in plan:
        M = max(d_L * s / r, logD)

        def scan(rows, s=s, M=M):
            ns = union_masks(masks, rows)
            counts = np.stack([popcount(ns & bucket_masks[i]) for i in range(len(family))], axis=1)
            prefix = np.cumsum(-np.sort(-counts, axis=1), axis=1)
            ratios = prefix[:, ws - 1] / (32.0 * ws * M)
            row_worst = ratios.max(axis=1)
            j = int(np.argmax(row_worst))
            return float(row_worst[j]), rows[j], counts[j], int(np.argmax(ratios[j]))

        size_worst = -1.0
        for val, row, cnt, wi in ordered_map(scan, _subset_chunks(D_L, s, mode, count, rng), workers):
            if val > size_worst:
                size_worst = val
            if val > worst:
                order = np.argsort(-cnt, kind="stable")
                worst = val
                witness = {"S": row.tolist(), "W": sorted(order[:int(ws[wi])].tolist())}
        per_size.append({"size": s, "mode": mode, "count": count, "worst_ratio": size_worst})
    return {
        "check": "bucket_spread", "mode": _plan_mode(plan), "cap": cap, "w_cap": w_cap,
        "samples": samples, "seed": seed, "r": r, "buckets": len(family),
        "w_range": [int(w_lo), int(w_hi)], "s_max": s_max,
        "worst_ratio": worst, "witness": witness, "per_size": per_size,
        "pass": worst <= 1.0,
    }


def lossless_range(D_R: int, d_L: int, shrink: float) -> int:
    """Largest |S| judged for lossless expansion: ``(1 - shrink) * D_R / d_L``, at least 1."""
    return max(1, math.floor((1 - shrink) * D_R / d_L + 1e-12))


def check_lossless(h: BipartiteMultigraph, shrink: float = 0.9, cap: int = 8, samples: int = 2000,
                   seed: int = 0, budget: int = DEFAULT_EXHAUSTIVE_BUDGET,
                   workers: int | None = None) -> dict:
    """Min ``|N(S)| / (d_L |S|)`` per size; passes iff it is ``>= shrink`` for all
    sizes up to ``lossless_range``. Sizes up to ``cap`` are profiled regardless."""
    D_L, D_R = h.n_left, h.n_right
    d_L = int(h.degrees()[0]) if D_L else 0
    workers = default_workers() if workers is None else workers
    limit = min(lossless_range(D_R, d_L, shrink), D_L)
    top = min(max(cap, limit), D_L)
    masks = neighbor_masks(D_L, D_R, h.edges)
    plan = size_plan(D_L, range(1, min(cap, D_L) + 1), budget, samples) + \
        [(s, "sampled", samples) for s in range(min(cap, D_L) + 1, top + 1)]
    rng = np.random.default_rng(seed)

    def scan(rows):
        sizes = popcount(union_masks(masks, rows))
        j = int(np.argmin(sizes))
        return int(sizes[j]), rows[j]

    worst, witness, judged = 1.0, [], 1.0
    per_size = []
    for s, mode, count in plan:
        best = None
        for val, row in ordered_map(scan, _subset_chunks(D_L, s, mode, count, rng), workers):
            if best is None or val < best[0]:
                best = (val, row)
        ratio = best[0] / (d_L * s)
        per_size.append({"size": s, "mode": mode, "count": count, "min_ratio": ratio,
                         "witness": best[1].tolist()})
        if ratio < worst:
            worst, witness = ratio, best[1].tolist()
        if s <= limit:
            judged = min(judged, ratio)
    return {
        "check": "lossless", "mode": _plan_mode(plan), "cap": cap, "samples": samples, "seed": seed,
        "shrink": shrink, "judged_max_size": limit, "worst_ratio": worst, "witness": {"S": witness},
        "judged_min_ratio": judged, "per_size": per_size, "pass": judged >= shrink,
    }


def _side_checks(h, families, params: GadgetParams, workers) -> dict:
    spread = [check_bucket_spread(h, fam, None, params.subset_cap, params.sample_count,
                                  params.seed, params.bucket_cap, params.exhaustive_budget,
                                  workers=workers)
              for fam in families]
    lossless = check_lossless(h, params.shrink, params.subset_cap, params.sample_count,
                              params.seed, params.exhaustive_budget, workers=workers)
    ok = lossless["pass"] and all(e["pass"] for e in spread)
    return {"bucket_spread": spread, "lossless": lossless, "pass": ok}


def certify_gadget(h: BipartiteMultigraph, params: GadgetParams, workers: int | None = None) -> dict:
    """All four checks: spread and lossless on H, and on H^T with the left families."""
    return {"H": _side_checks(h, params.right_families, params, workers),
            "H^T": _side_checks(h.transpose(), params.left_families, params, workers)}


@dataclass
class GadgetCertificate:
    params: GadgetParams
    gadget: BipartiteMultigraph
    checks: dict
    try_index: int
    sample_seed: list
    tries: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.checks["H"]["pass"] and self.checks["H^T"]["pass"]

    def to_dict(self) -> dict:
        return {
            "schema": CERTIFICATE_SCHEMA,
            "params": self.params.to_dict(),
            "try_index": self.try_index,
            "sample_seed": list(self.sample_seed),
            "gadget_bgf": write_graph(self.gadget).decode(),
            "checks": self.checks,
            "tries": self.tries,
            "pass": self.ok,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "GadgetCertificate":
        if d.get("schema") != CERTIFICATE_SCHEMA:
            raise ValueError(f"not a gadget certificate (schema {d.get('schema')!r})")
        return cls(GadgetParams.from_dict(d["params"]), parse_graph(d["gadget_bgf"]),
                   d["checks"], d["try_index"], d["sample_seed"], d.get("tries", []))


def _worst_ratios(checks: dict) -> dict:
    out = {}
    for side in ("H", "H^T"):
        out[side] = {"bucket_spread": [e["worst_ratio"] for e in checks[side]["bucket_spread"]],
                     "lossless": checks[side]["lossless"]["judged_min_ratio"],
                     "lossless_profile_min": checks[side]["lossless"]["worst_ratio"],
                     "pass": checks[side]["pass"]}
    return out


def replay_certificate(cert: GadgetCertificate, workers: int | None = None) -> dict:
    """Recompute every check from the stored gadget; ``match`` demands equal floats."""
    fresh = certify_gadget(cert.gadget, cert.params, workers)
    stored, now = _worst_ratios(cert.checks), _worst_ratios(fresh)
    breg = validate_biregular(cert.gadget, cert.params.d_L, cert.params.d_R)
    return {"match": stored == now and breg.ok, "stored": stored, "replayed": now,
            "biregular": breg.ok}


def search_good_gadget(params: GadgetParams, max_tries: int = 20,
                       workers: int | None = None) -> GadgetCertificate:
    """Sample with seeds ``[seed, t]`` for t = 0, 1, ... and return the first good gadget."""
    tries = []
    for t in range(max_tries):
        sample_seed = [params.seed, t]
        h = sample_biregular(params.D_L, params.D_R, params.d_L, params.d_R,
                             sample_seed, simple=params.simple)
        checks = certify_gadget(h, params, workers)
        summary = _worst_ratios(checks)
        tries.append({"try": t, **summary})
        cert = GadgetCertificate(params, h, checks, t, sample_seed, list(tries))
        if cert.ok:
            return cert
    raise GadgetSearchError(f"no good gadget within {max_tries} tries", tries)


def un_lower_bound_formula(d1: int, p: float, n1: int, s: int) -> float:
    """``max(0, d1 (1-p)^(s-1) - sqrt(4 p (1-p)^(s-1) n1 ln n1))``, the o(d1) term dropped."""
    if not 0 < p < 1 or s < 1:
        raise ValueError("need 0 < p < 1 and s >= 1")
    keep = (1 - p) ** (s - 1)
    return max(0.0, d1 * keep - math.sqrt(4 * p * keep * n1 * math.log(n1)))


def min_unique_ratio(h: BipartiteMultigraph, size: int, samples: int = 2000, seed: int = 0,
                     budget: int = DEFAULT_EXHAUSTIVE_BUDGET) -> tuple[float, list, str]:
    """Min ``|UN(S)|/|S|`` over left sets of one size, exhaustive within ``budget``."""
    from .certify.expansion import measure_une
    prof = measure_une(h, "left", size, samples, seed, budget)["profile"][-1]
    return prof["min_ratio"], prof["witness"], prof["mode"]


def un_bound_comparison(D_L, D_R, d_L, d_R, size: int, n_gadgets: int = 200, seed: int = 0,
                        simple: bool = False, samples: int = 2000) -> dict:
    """Predicted per-vertex unique-neighbor bound vs the measured minimum over sampled gadgets."""
    p = d_R / D_L
    predicted = un_lower_bound_formula(d_L, p, D_L, size)
    measured = []
    for t in range(n_gadgets):
        h = sample_biregular(D_L, D_R, d_L, d_R, [seed, t], simple=simple)
        measured.append(min_unique_ratio(h, size, samples, seed)[0])
    return {"d1": d_L, "p": p, "n1": D_L, "size": size, "predicted": predicted,
            "measured_min": min(measured), "measured_mean": float(np.mean(measured)),
            "gadgets": n_gadgets, "bound_respected": min(measured) >= predicted}
