"""Hadamard matrices and the square designs derived from them.

Orders are reached by a small planner over four routes:

* Sylvester doubling for powers of two,
* Paley I, order ``q + 1`` for a prime power ``q = 3 (mod 4)``,
* Paley II, order ``2 (q + 1)`` for a prime power ``q = 1 (mod 4)``,
* Kronecker products of two reachable orders.

Up to 128 this reaches every multiple of four except 92 and 116.

A normalized Hadamard matrix of order ``N + 1`` with its first row and
column deleted, mapped ``-1 -> 1`` and ``+1 -> 0``, is an ``N x N`` 0/1
matrix with ``B^T B = ((N+1)/4)(I + J)``: the same information matrix as
the full ``C(N, (N+1)/2)``-row design, from only ``N`` rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidDesignError, UnsupportedOrderError
from .finite_field import field, prime_power
from .model import Design

_H2 = np.array([[1, 1], [1, -1]], dtype=np.int64)


def is_hadamard(matrix) -> bool:
    """True iff ``matrix`` is square, has only +-1 entries and ``H^T H = n I`` exactly."""
    h = np.asarray(matrix)
    if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] == 0:
        return False
    if not np.all((h == 1) | (h == -1)):
        return False
    h = h.astype(np.int64)
    n = h.shape[0]
    return bool(np.array_equal(h.T @ h, n * np.eye(n, dtype=np.int64)))


@dataclass(frozen=True, eq=False)
class HadamardMatrix:
    order: int
    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=np.int64, copy=True)
        if entries.shape != (self.order, self.order) or not is_hadamard(entries):
            raise ValueError(f"not a Hadamard matrix of order {self.order}")
        entries.flags.writeable = False
        object.__setattr__(self, "entries", entries)


@dataclass(frozen=True)
class CoreDesign:
    design: Design
    source_order: int


# --- construction routes ---------------------------------------------------

def _sylvester(order: int) -> np.ndarray:
    h = np.ones((1, 1), dtype=np.int64)
    while h.shape[0] < order:
        h = np.kron(_H2, h)
    return h


def _paley1(q: int) -> np.ndarray:
    Q = field(q).jacobsthal()
    s = np.zeros((q + 1, q + 1), dtype=np.int64)
    s[0, 1:] = 1
    s[1:, 0] = -1
    s[1:, 1:] = Q
    return s + np.eye(q + 1, dtype=np.int64)


def _paley2(q: int) -> np.ndarray:
    Q = field(q).jacobsthal()
    s = np.zeros((q + 1, q + 1), dtype=np.int64)
    s[0, 1:] = 1
    s[1:, 0] = 1
    s[1:, 1:] = Q
    a = np.array([[1, -1], [-1, -1]], dtype=np.int64)
    return np.kron(s, _H2) + np.kron(np.eye(q + 1, dtype=np.int64), a)


@lru_cache(maxsize=None)
def construction_plan(order: int) -> tuple | None:
    """Nested tuple describing how ``order`` is built, or ``None`` if unreachable."""
    if order in (1, 2):
        return ("base", order)
    if order < 1 or order % 4:
        return None
    if order & (order - 1) == 0:
        return ("sylvester", order)
    pm = prime_power(order - 1)
    if pm is not None and (order - 1) % 4 == 3:
        return ("paley1", order - 1)
    q = order // 2 - 1
    pm = prime_power(q)
    if pm is not None and q % 4 == 1:
        return ("paley2", q)
    for a in range(2, math.isqrt(order) + 1):
        if order % a == 0:
            left, right = construction_plan(a), construction_plan(order // a)
            if left is not None and right is not None:
                return ("kronecker", left, right)
    return None


def _build(plan: tuple) -> np.ndarray:
    kind = plan[0]
    if kind == "base":
        return _sylvester(plan[1])
    if kind == "sylvester":
        return _sylvester(plan[1])
    if kind == "paley1":
        return _paley1(plan[1])
    if kind == "paley2":
        return _paley2(plan[1])
    return np.kron(_build(plan[1]), _build(plan[2]))


def smallest_unreachable_order(limit: int = 10_000) -> int | None:
    for order in range(4, limit + 1, 4):
        if construction_plan(order) is None:
            return order
    return None


@lru_cache(maxsize=None)
def hadamard(order: int) -> HadamardMatrix:
    """A verified Hadamard matrix of the given order.

    Results are memoized; the returned arrays are read-only, so sharing
    them between threads is safe.
    """
    plan = construction_plan(order)
    if plan is None:
        if order < 1 or (order > 2 and order % 4):
            reason = "Hadamard orders are 1, 2 or multiples of 4"
        else:
            reason = (
                "no Sylvester, Paley or Kronecker route reaches it; the smallest such "
                f"order is {smallest_unreachable_order()} (Williamson-type constructions "
                "are not provided)"
            )
        raise UnsupportedOrderError(f"order {order} is not supported: {reason}")
    return HadamardMatrix(order, _build(plan))


def is_supported_order(order: int) -> bool:
    return construction_plan(order) is not None


def normalize(h: HadamardMatrix) -> HadamardMatrix:
    """Flip row and column signs so the first row and column are all +1."""
    e = h.entries * h.entries[:, :1]
    e = e * e[:1, :]
    return HadamardMatrix(h.order, e)


# --- designs ---------------------------------------------------------------

def core_matrix(order: int) -> np.ndarray:
    """0/1 core of the normalized Hadamard matrix of ``order`` (size ``order - 1``)."""
    h = normalize(hadamard(order)).entries
    return (1 - h[1:, 1:]) // 2


def core_design(n: int) -> CoreDesign:
    """Square 0/1 design from a Hadamard matrix of order ``n + 1``, equal unit times."""
    if n < 1:
        raise InvalidDesignError("n must be >= 1")
    order = n + 1
    if order != 2 and order % 4:
        raise UnsupportedOrderError(
            f"core design needs n + 1 to be a Hadamard order; {order} is not (n must be 1 or 3 mod 4)"
        )
    b = core_matrix(order)
    return CoreDesign(Design(n, b, np.ones(n)), order)


def next_core_size(n: int) -> int:
    """Smallest ``n' >= n`` with ``n' + 1`` a multiple of four."""
    return 4 * math.ceil((n + 1) / 4) - 1


def truncated_core_design(n: int) -> CoreDesign:
    """Core design of size ``n' = next_core_size(n)`` with its rightmost ``n' - n`` columns removed.

    The result has ``M = n'`` rows, each observed for ``n / M`` seconds, and
    ``B^T B`` is the leading ``n x n`` block of ``((n'+1)/4)(I + J)``.
    """
    if n < 2:
        raise InvalidDesignError("truncated core design needs n >= 2")
    size = next_core_size(n)
    order = size + 1
    b = core_matrix(order)[:, :n]
    return CoreDesign(Design(n, b, np.full(size, n / size)), order)


def truncated_core_mse(n: int) -> float:
    """Closed-form ``Tr C^-1`` of :func:`truncated_core_design`.

    ``C = (n / n') ((n'+1)/4) (I + J_n)``.
    """
    size = next_core_size(n)
    scale = n / size * (size + 1) / 4
    return (n - 1) / scale + 1.0 / (scale * (n + 1))
