"""Small finite fields F_q with table-driven arithmetic.

Elements are the integers ``0 .. q-1``. For a prime field the integer is the
residue itself; for ``q = p^f`` with ``f > 1`` the integer encodes the
coefficient vector ``c_0 + c_1 p + ... + c_{f-1} p^{f-1}`` of a polynomial
reduced modulo a fixed Conway polynomial.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

MAX_FIELD_SIZE = 64

# Conway polynomials, low-degree coefficient first, leading 1 omitted.
CONWAY = {
    (2, 2): (1, 1),              # x^2 + x + 1
    (2, 3): (1, 1, 0),           # x^3 + x + 1
    (2, 4): (1, 1, 0, 0),        # x^4 + x + 1
    (2, 5): (1, 0, 1, 0, 0),     # x^5 + x^2 + 1
    (2, 6): (1, 1, 0, 1, 1, 0),  # x^6 + x^4 + x^3 + x + 1
    (3, 2): (2, 2),              # x^2 + 2x + 2
    (3, 3): (1, 2, 0),           # x^3 + 2x + 1
    (5, 2): (2, 4),              # x^2 + 4x + 2
    (7, 2): (3, 6),              # x^2 + 6x + 3
}


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def factor_prime_power(q: int) -> tuple[int, int]:
    """Return ``(p, f)`` with ``q = p**f``; raise ValueError otherwise."""
    if q < 2:
        raise ValueError(f"q={q} is not a prime power")
    p = 2
    while q % p:
        p += 1
    f, r = 0, q
    while r % p == 0:
        r //= p
        f += 1
    if r != 1 or not _is_prime(p):
        raise ValueError(f"q={q} is not a prime power")
    return p, f


class GF:
    """The finite field with ``q`` elements.

    Arithmetic goes through precomputed ``add``/``mul`` tables, so only
    desk-scale fields (``q <= 64``) are supported.
    """

    def __init__(self, q: int):
        p, f = factor_prime_power(q)
        if q > MAX_FIELD_SIZE:
            raise ValueError(f"field size {q} exceeds supported maximum {MAX_FIELD_SIZE}")
        if f > 1 and (p, f) not in CONWAY:
            raise ValueError(f"no Conway polynomial tabulated for q={q}")
        self.q, self.p, self.f = q, p, f
        self.modulus = CONWAY.get((p, f))
        self.add, self.mul = self._build_tables()
        self.neg = np.array([int(np.nonzero(self.add[a] == 0)[0][0]) for a in range(q)])
        self.inv = np.zeros(q, dtype=np.int64)
        for a in range(1, q):
            self.inv[a] = int(np.nonzero(self.mul[a] == 1)[0][0])

    def _digits(self, a: int) -> list[int]:
        out = []
        for _ in range(self.f):
            out.append(a % self.p)
            a //= self.p
        return out

    def _encode(self, coeffs) -> int:
        v = 0
        for c in reversed(coeffs):
            v = v * self.p + c
        return v

    def _polymul(self, a: int, b: int) -> int:
        p, f = self.p, self.f
        x, y = self._digits(a), self._digits(b)
        prod = [0] * (2 * f - 1)
        for i, xi in enumerate(x):
            if xi:
                for j, yj in enumerate(y):
                    prod[i + j] = (prod[i + j] + xi * yj) % p
        # reduce using x^f = -(c_0 + c_1 x + ... )
        for d in range(2 * f - 2, f - 1, -1):
            c = prod[d]
            if c:
                prod[d] = 0
                for t, m in enumerate(self.modulus):
                    prod[d - f + t] = (prod[d - f + t] - c * m) % p
        return self._encode(prod[:f])

    def _build_tables(self):
        q, p = self.q, self.p
        add = np.zeros((q, q), dtype=np.int64)
        mul = np.zeros((q, q), dtype=np.int64)
        if self.f == 1:
            r = np.arange(q)
            add[:] = (r[:, None] + r[None, :]) % q
            mul[:] = (r[:, None] * r[None, :]) % q
            return add, mul
        digits = [self._digits(a) for a in range(q)]
        for a in range(q):
            for b in range(q):
                add[a, b] = self._encode([(x + y) % p for x, y in zip(digits[a], digits[b])])
                mul[a, b] = self._polymul(a, b)
        return add, mul

    def sub(self, a: int, b: int) -> int:
        return int(self.add[a, self.neg[b]])

    def __repr__(self) -> str:
        return f"GF({self.q})"


@lru_cache(maxsize=None)
def field(q: int) -> GF:
    return GF(q)
