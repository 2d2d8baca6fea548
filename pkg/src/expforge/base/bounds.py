"""Exponents of q in the base-graph parameter bounds (constants in k dropped)."""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb


def _triple_pairs(k: int, i0: int, i1: int, i2: int):
    return [(i1 - i0, i2 - i0), (i2 - i1, k + i0 - i1), (k + i0 - i2, k + i1 - i2)]


def _pair_exponent(k: int, i: int, j: int) -> Fraction:
    return Fraction((i - j + 2) ** 2 + (k - i - j) ** 2, 8)


def tau_lambda_formulas(k: int) -> dict:
    """Exponents for tau, lambda, D and the special-set count s, as exact fractions.

    tau's exponent is ``C(k,2) - k^2/8 - 1/2`` plus a max over part triples of a
    min over three rotated index pairs; ``per_triple`` records each triple's min.
    """
    if k < 3:
        raise ValueError("triangle bounds need k >= 3")
    per_triple = {}
    for t in itertools.combinations(range(k), 3):
        per_triple[t] = min(_pair_exponent(k, i, j) for i, j in _triple_pairs(k, *t))
    worst = max(per_triple, key=lambda t: (per_triple[t], tuple(-x for x in t)))
    base = Fraction(comb(k, 2)) - Fraction(k * k, 8) - Fraction(1, 2)
    return {
        "k": k,
        "tau_exponent": base + per_triple[worst],
        "lambda_exponent": Fraction(k * k // 4, 2),
        "D_exponent": Fraction(comb(k, 2)),
        "s_exponent_range": (Fraction(k - 1), Fraction(k * k // 4)),
        "argmax_triple": worst,
        "per_triple": per_triple,
    }


def triangle_bound_exponent(k: int) -> Fraction:
    """Exponent of q in the bound on faces meeting a small set in >= 3 vertices, per |U|."""
    return tau_lambda_formulas(k)["tau_exponent"]


def as_json(report: dict) -> dict:
    """Fractions rendered as strings like ``"13/2"`` for JSON output."""
    def conv(x):
        if isinstance(x, Fraction):
            return str(x)
        if isinstance(x, tuple):
            return [conv(y) for y in x]
        return x
    out = {key: conv(val) for key, val in report.items() if key != "per_triple"}
    out["per_triple"] = {",".join(map(str, t)): str(v) for t, v in report["per_triple"].items()}
    return out
