"""Parameter preconditions of the unique-neighbor theorem, numerically and as
exact exponent arithmetic in q."""

from __future__ import annotations

import math
from fractions import Fraction


def _ineq(name: str, lhs: float, rhs: float) -> dict:
    ok = lhs <= rhs
    if math.isinf(lhs) or math.isinf(rhs):
        slack = rhs - lhs if not (math.isinf(lhs) and math.isinf(rhs)) else 0.0
    else:
        slack = rhs - lhs
    return {"name": name, "lhs": lhs, "rhs": rhs, "pass": ok, "slack": slack}


def validate_parameters(k: int, q: float | None, d_L: float, d_R: float, D: float, tau: float,
                        lam: float, s_min: float, s_max: float, delta: float) -> dict:
    """Each inequality with natural logs; ``slack = rhs - lhs``. The degree window is
    ``[max(lam, sqrt(s_max)) ln^2 D / delta, delta D / (tau ln D)]``."""
    logD = math.log(D)
    inv_delta = math.inf if delta == 0 else 1 / delta
    lower = max(lam, math.sqrt(s_max)) * logD ** 2 * inv_delta
    upper = delta * D / (tau * logD)
    checks = [
        _ineq("inverse_lambda_le_delta", 1 / lam, delta),
        _ineq("delta_le_inverse_2k", delta, 1 / (2 * k)),
        _ineq("degree_lower_left", lower, d_L),
        _ineq("degree_lower_right", lower, d_R),
        _ineq("degree_upper_left", d_L, upper),
        _ineq("degree_upper_right", d_R, upper),
        _ineq("lambda_le_delta_sq_s_min", lam, delta * delta * s_min),
    ]
    return {"mode": "numeric", "k": k, "q": q, "checks": checks,
            "window": [lower, upper], "window_empty": lower > upper,
            "pass": all(c["pass"] for c in checks)}


def validate_exponents(k: int, D_exp, tau_exp, lambda_exp, s_min_exp, s_max_exp,
                       d_exp=None) -> dict:
    """Same preconditions with every quantity written as ``q^e`` and q unbounded.

    ``delta = q^-x`` with x > 0. Hidden constants and log factors make every
    comparison strict, so the conditions are::

        x < lambda_exp,  2x < s_min_exp - lambda_exp,
        max(lambda_exp, s_max_exp/2) + x < d_exp < D_exp - tau_exp - x

    The degree window (as x -> 0) is ``(max(lambda_exp, s_max_exp/2), D_exp - tau_exp)``.
    """
    D, t, lam = Fraction(D_exp), Fraction(tau_exp), Fraction(lambda_exp)
    smin, smax = Fraction(s_min_exp), Fraction(s_max_exp)
    lo = max(lam, smax / 2)
    hi = D - t
    out = {"mode": "exponent", "k": k, "window": [str(lo), str(hi)], "window_empty": lo >= hi,
           "delta_exponent_bounds": {"lambda": str(lam), "lambda_vs_s_min": str((smin - lam) / 2)}}
    caps = [lam, (smin - lam) / 2]
    if d_exp is not None:
        ds = d_exp if isinstance(d_exp, (tuple, list)) else (d_exp, d_exp)
        ds = [Fraction(x) for x in ds]
        for d in ds:
            caps += [d - lo, hi - d]
        out["d_exponents"] = [str(d) for d in ds]
        out["d_in_window"] = all(lo < d < hi for d in ds)
    x_max = min(caps)
    out["delta_exponent_range"] = ["0", str(x_max)]
    out["satisfiable"] = x_max > 0 and not out["window_empty"] and out.get("d_in_window", True)
    return out
