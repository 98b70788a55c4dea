"""Arithmetic in GF(p^m) for the small fields the Paley constructions need.

Elements are encoded as integers ``0 .. q-1`` whose base-``p`` digits are
polynomial coefficients (lowest degree first).  Only subtraction and the
quadratic character are used downstream, so the class keeps full
difference and square tables; ``q`` stays below a few hundred.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product

import numpy as np


def prime_power(q: int) -> tuple[int, int] | None:
    """Return ``(p, m)`` with ``q == p**m`` for prime ``p``, else ``None``."""
    if q < 2:
        return None
    p = next(d for d in range(2, q + 1) if q % d == 0)
    m = 0
    while q % p == 0:
        q //= p
        m += 1
    return (p, m) if q == 1 else None


def _poly_mulmod(a, b, modulus, p):
    # a, b: coefficient lists of length m; modulus: monic, length m + 1
    m = len(a)
    prod = [0] * (2 * m - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    for d in range(len(prod) - 1, m - 1, -1):
        c = prod[d]
        if c:
            for j in range(m + 1):
                prod[d - m + j] = (prod[d - m + j] - c * modulus[j]) % p
    return prod[:m]


def _is_irreducible(modulus, p):
    # trial division by every monic polynomial of degree <= m/2
    m = len(modulus) - 1
    for deg in range(1, m // 2 + 1):
        for coeffs in product(range(p), repeat=deg):
            divisor = list(coeffs) + [1]
            rem = list(modulus)
            for d in range(m, deg - 1, -1):
                c = rem[d]
                if c:
                    for j in range(deg + 1):
                        rem[d - deg + j] = (rem[d - deg + j] - c * divisor[j]) % p
            if not any(rem[:deg]):
                return False
    return True


class GaloisField:
    def __init__(self, q: int):
        pm = prime_power(q)
        if pm is None:
            raise ValueError(f"{q} is not a prime power")
        self.q, (self.p, self.m) = q, pm
        p, m = self.p, self.m
        self.digits = np.array(
            [[(x // p**i) % p for i in range(m)] for x in range(q)], dtype=np.int64
        )
        weights = p ** np.arange(m)
        diff = (self.digits[:, None, :] - self.digits[None, :, :]) % p
        self.sub = diff @ weights

        if m == 1:
            squares = {(x * x) % p for x in range(1, p)}
        else:
            self.modulus = self._find_modulus()
            squares = set()
            for x in range(1, q):
                d = list(self.digits[x])
                sq = _poly_mulmod(d, d, self.modulus, p)
                squares.add(int(np.dot(sq, weights)))
        chi = np.full(q, -1, dtype=np.int64)
        chi[0] = 0
        chi[list(squares)] = 1
        self.chi = chi

    def _find_modulus(self):
        for coeffs in product(range(self.p), repeat=self.m):
            modulus = list(coeffs) + [1]
            if modulus[0] and _is_irreducible(modulus, self.p):
                return modulus
        raise ArithmeticError(f"no irreducible polynomial of degree {self.m} over GF({self.p})")

    def jacobsthal(self) -> np.ndarray:
        """``Q[a, b] = chi(a - b)``."""
        return self.chi[self.sub]


@lru_cache(maxsize=None)
def field(q: int) -> GaloisField:
    return GaloisField(q)
