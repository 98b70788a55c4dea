"""Generators for the design families and their closed-form costs.

Closed forms are evaluated in exact rational arithmetic and rounded once,
so e.g. ``single_k_mse(20, 10)`` is exactly the float nearest 3.62.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Mapping

import numpy as np

from .errors import EnumerationCapError, InvalidDesignError
from .model import Design, Spectrum

ENUMERATION_CAP = 2_000_000


def _check_k(n: int, k: int) -> None:
    if not 1 <= k <= n - 1:
        raise InvalidDesignError(f"k must satisfy 1 <= k <= n-1, got n={n}, k={k}")


@dataclass(frozen=True)
class SingleKParams:
    n: int
    k: int

    def __post_init__(self):
        _check_k(self.n, self.k)


@dataclass(frozen=True)
class MultiKWeights:
    """Time fractions ``alpha_k`` for k = 1..N, stored densely."""

    alphas: tuple[float, ...]

    def __post_init__(self):
        alphas = tuple(float(a) for a in self.alphas)
        if not alphas:
            raise InvalidDesignError("weights must have length N >= 1")
        if any(not math.isfinite(a) or a < 0.0 for a in alphas):
            raise InvalidDesignError("weights must be non-negative")
        if abs(math.fsum(alphas) - 1.0) > 1e-12:
            raise InvalidDesignError(f"weights sum to {math.fsum(alphas)!r}, expected 1")
        object.__setattr__(self, "alphas", alphas)

    @classmethod
    def from_mapping(cls, n: int, weights: Mapping[int, float]) -> "MultiKWeights":
        alphas = [0.0] * n
        for k, a in weights.items():
            if not 1 <= k <= n:
                raise InvalidDesignError(f"k={k} outside 1..{n}")
            alphas[k - 1] += float(a)
        return cls(tuple(alphas))

    @property
    def n(self) -> int:
        return len(self.alphas)

    def items(self):
        """Yield ``(k, alpha_k)`` for the nonzero weights."""
        for k, a in enumerate(self.alphas, start=1):
            if a > 0.0:
                yield k, a


def identity_design(n: int) -> Design:
    """Each sensor alone for one second: ``B = I``, ``T = I``."""
    if n < 1:
        raise InvalidDesignError("n must be >= 1")
    return Design(n, np.eye(n, dtype=np.int64), np.ones(n))


def complement_design(n: int) -> Design:
    """All switches closed except one: ``B = J - I``, ``T = I``."""
    if n < 2:
        raise InvalidDesignError("complement design needs n >= 2")
    return Design(n, np.ones((n, n), dtype=np.int64) - np.eye(n, dtype=np.int64), np.ones(n))


def complement_mse(n: int) -> float:
    """``Tr C^-1`` for the complement design: ``C = I + (n-2) J``."""
    if n < 2:
        raise InvalidDesignError("complement design needs n >= 2")
    return float((n - 1) + Fraction(1, (n - 1) ** 2))


def individual_plus_joint(n: int, beta: float) -> Design:
    """Identity rows for ``1 - beta`` seconds each, then the all-ones row for ``n beta``.

    ``C = (1 - beta) I + n beta J``.  At ``beta = 0`` the joint row is
    dropped rather than given zero time.
    """
    if n < 2:
        raise InvalidDesignError("individual + joint needs n >= 2")
    if not 0.0 <= beta < 1.0:
        raise InvalidDesignError(f"beta must lie in [0, 1), got {beta}")
    rows = np.eye(n, dtype=np.int64)
    times = np.full(n, 1.0 - beta)
    if beta > 0.0:
        rows = np.vstack([rows, np.ones((1, n), dtype=np.int64)])
        times = np.append(times, n * beta)
    return Design(n, rows, times)


def individual_plus_joint_mse(n: int, beta: float) -> float:
    """Exact cost of :func:`individual_plus_joint`.

    The eigenvalue ``1 - beta`` has multiplicity ``n - 1`` and the joint
    direction carries ``1 + (n^2 - 1) beta``.
    """
    if not 0.0 <= beta < 1.0:
        raise InvalidDesignError(f"beta must lie in [0, 1), got {beta}")
    return (n - 1) / (1.0 - beta) + 1.0 / (1.0 + (n * n - 1) * beta)


def _subset_rows(n: int, k: int) -> np.ndarray:
    m = math.comb(n, k)
    idx = np.fromiter(
        (i for combo in combinations(range(n), k) for i in combo),
        dtype=np.int64,
        count=m * k,
    ).reshape(m, k)
    rows = np.zeros((m, n), dtype=np.int64)
    rows[np.arange(m)[:, None], idx] = 1
    return rows


def single_k_design(n: int, k: int, cap: int = ENUMERATION_CAP) -> Design:
    """Every k-subset of the n switches, lexicographic order, equal times ``n / C(n, k)``."""
    _check_k(n, k)
    m = math.comb(n, k)
    if m > cap:
        raise EnumerationCapError(
            f"C({n},{k}) = {m} rows exceeds the enumeration cap {cap}; "
            "use single_k_mse for the closed form"
        )
    return Design(n, _subset_rows(n, k), np.full(m, n / m))


def single_k_fraction(n: int, k: int) -> Fraction:
    _check_k(n, k)
    return Fraction((n - 1) ** 2, k * (n - k)) + Fraction(1, k * k)


def single_k_mse(n: int, k: int) -> float:
    """``(N-1)^2 / (k (N-k)) + 1 / k^2``."""
    return float(single_k_fraction(n, k))


def multi_k_spectrum(n: int, weights: MultiKWeights) -> Spectrum:
    """Eigenvalues of ``sum_k alpha_k C_k`` for equal-time single-k blocks.

    ``sum alpha_k k (N-k)/(N-1)`` with multiplicity ``N - 1`` and
    ``sum alpha_k k^2`` once.
    """
    if weights.n != n:
        raise InvalidDesignError(f"weights have length {weights.n}, expected {n}")
    if n < 2:
        raise InvalidDesignError("multi-k spectrum needs n >= 2")
    small = math.fsum(a * k * (n - k) / (n - 1) for k, a in weights.items())
    large = math.fsum(a * k * k for k, a in weights.items())
    if small == large:
        return Spectrum(((small, n),))
    return Spectrum(((small, n - 1), (large, 1)))


def multi_k_design(n: int, weights: MultiKWeights, cap: int = ENUMERATION_CAP) -> Design:
    """Stack the single-k blocks with nonzero weight.

    Block k gets total time ``alpha_k n`` spread evenly over its
    ``C(n, k)`` rows; ``k = n`` contributes the single all-ones row.
    """
    if weights.n != n:
        raise InvalidDesignError(f"weights have length {weights.n}, expected {n}")
    blocks = list(weights.items())
    total = sum(math.comb(n, k) for k, _ in blocks)
    if total > cap:
        raise EnumerationCapError(f"{total} rows exceeds the enumeration cap {cap}")
    rows, times = [], []
    for k, a in blocks:
        m = math.comb(n, k)
        rows.append(_subset_rows(n, k))
        times.append(np.full(m, a * n / m))
    return Design(n, np.vstack(rows), np.concatenate(times))


def parse_weights(text: str, n: int) -> MultiKWeights:
    """Parse ``"k:alpha,k:alpha"`` (e.g. ``"1:0.5,10:0.5"``); alphas may be fractions."""
    weights: dict[int, float] = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            k, a = part.split(":")
            weights[int(k)] = weights.get(int(k), 0.0) + float(Fraction(a.strip()))
        except ValueError as exc:
            raise InvalidDesignError(f"cannot parse weight {part!r}; expected k:alpha") from exc
    return MultiKWeights.from_mapping(n, weights)
