"""Observation model, Fisher information and the ML estimator.

A design is a binary switch-schedule matrix ``B`` (one row per switch
configuration) together with the time ``t_i`` spent in each configuration.
Observations satisfy ``X ~ N(T B mu, sigma^2 T)`` with ``T = diag(t)``, the
ML estimate is ``(B^T T B)^-1 B^T X`` and its covariance is
``C^-1 = (B^T T B)^-1`` (taking ``sigma^2 = 1``).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidDesignError, SingularDesignError
from .linalg import PIVOT_RTOL, jacobi_eigenvalues, spd_inverse, spd_solve, spd_trace_inverse

TIME_RTOL = 1e-12
STRUCTURE_ATOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Design:
    """Switch schedule ``B`` (M x N, entries 0/1) and per-row times.

    Construction only checks shapes; the remaining invariants are reported
    by :func:`validate_design` and enforced by the operations that need
    them.
    """

    n_params: int
    rows: np.ndarray
    times: np.ndarray

    def __post_init__(self):
        rows = np.array(self.rows, dtype=np.int64, copy=True)
        times = np.array(self.times, dtype=float, copy=True).reshape(-1)
        if rows.ndim == 1 and rows.size == 0:
            rows = rows.reshape(0, self.n_params)
        if rows.ndim != 2:
            raise InvalidDesignError("rows must form a two-dimensional array")
        object.__setattr__(self, "n_params", int(self.n_params))
        object.__setattr__(self, "rows", _frozen(rows))
        object.__setattr__(self, "times", _frozen(times))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], times: Sequence[float] | None = None,
                  n: int | None = None) -> "Design":
        """Build a design, defaulting every time to ``N / M``."""
        rows = [list(r) for r in rows]
        if n is None:
            if not rows:
                raise InvalidDesignError("cannot infer N from an empty row list")
            n = len(rows[0])
        if any(len(r) != n for r in rows):
            raise InvalidDesignError(f"every row must have length {n}")
        if times is None:
            times = [n / len(rows)] * len(rows) if rows else []
        return cls(n, np.array(rows, dtype=np.int64).reshape(len(rows), n), times)

    @property
    def m(self) -> int:
        return self.rows.shape[0]

    def __repr__(self):
        return f"Design(n_params={self.n_params}, m={self.m})"


@dataclass(frozen=True, eq=False)
class FisherInfo:
    """Information matrix ``C = B^T T B``.

    ``structure`` is ``(a, b)`` when ``C = (a - b) I + b J``; in that case
    ``matrix`` is rebuilt from ``(a, b)`` so the tag and the entries agree
    exactly.
    """

    matrix: np.ndarray
    structure: tuple[float, float] | None = None

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float, copy=True)
        if self.structure is not None:
            a, b = (float(v) for v in self.structure)
            m = np.full_like(m, b)
            np.fill_diagonal(m, a)
            object.__setattr__(self, "structure", (a, b))
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues with multiplicities, ascending."""

    entries: tuple[tuple[float, int], ...]

    def __post_init__(self):
        entries = tuple(sorted((float(v), int(m)) for v, m in self.entries))
        if any(m < 1 for _, m in entries):
            raise ValueError("multiplicities must be positive")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_eigenvalues(cls, values: Iterable[float], rtol: float = 1e-9) -> "Spectrum":
        """Group numerically equal eigenvalues (within ``rtol`` of the largest magnitude)."""
        vals = np.sort(np.asarray(list(values), dtype=float))
        if vals.size == 0:
            return cls(())
        tol = rtol * max(1.0, float(np.abs(vals).max()))
        groups: list[list[float]] = [[vals[0]]]
        for v in vals[1:]:
            if v - groups[-1][0] <= tol:
                groups[-1].append(v)
            else:
                groups.append([v])
        return cls(tuple((float(np.mean(g)), len(g)) for g in groups))

    @property
    def size(self) -> int:
        return sum(m for _, m in self.entries)

    def eigenvalues(self) -> np.ndarray:
        return np.array([v for v, m in self.entries for _ in range(m)])

    def total(self) -> float:
        return math.fsum(v * m for v, m in self.entries)

    @property
    def max(self) -> float:
        return self.entries[-1][0]

    def trace_inverse(self) -> float:
        """Sum of reciprocal eigenvalues; raises if any eigenvalue is not positive."""
        if not self.entries or self.entries[0][0] <= 0.0:
            raise SingularDesignError("spectrum contains a non-positive eigenvalue")
        return math.fsum(m / v for v, m in self.entries)


@dataclass(frozen=True)
class Observation:
    """Integrator outputs ``X_1 .. X_M``, one per design row."""

    values: tuple[float, ...]

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...]
    rank: int
    identifiable: bool

    @property
    def valid(self) -> bool:
        return not self.violations


def validate_design(design: Design) -> ValidationReport:
    """List every violated design invariant, plus rank(B) and identifiability."""
    B, t, n = design.rows, design.times, design.n_params
    violations = []
    if n < 1:
        violations.append("n must be positive")
    if B.shape[1] != n:
        violations.append(f"row length: rows have {B.shape[1]} entries, expected {n}")
    if t.shape[0] != B.shape[0]:
        violations.append(f"row/time count mismatch: {B.shape[0]} rows, {t.shape[0]} times")
    if B.shape[0] == 0:
        violations.append("design has no rows")
    if np.any((B != 0) & (B != 1)):
        violations.append("non-binary switch entry")
    if B.shape[0] and np.any(B.sum(axis=1) == 0):
        violations.append("all-zero row")
    if B.shape[0] > 1 and np.unique(B, axis=0).shape[0] != B.shape[0]:
        violations.append("duplicate switch configuration")
    if not np.all(np.isfinite(t)) or np.any(t <= 0.0):
        violations.append("non-positive time")
    elif abs(math.fsum(t) - n) > TIME_RTOL * max(n, 1):
        violations.append(f"time budget: times sum to {math.fsum(t)!r}, expected {n}")

    rank = int(np.linalg.matrix_rank(B.T @ B)) if B.size else 0
    return ValidationReport(tuple(violations), rank, rank == n and n > 0)


def require_valid(design: Design) -> None:
    report = validate_design(design)
    if not report.valid:
        raise InvalidDesignError("; ".join(report.violations))


def _detect_structure(c: np.ndarray) -> tuple[float, float] | None:
    n = c.shape[0]
    diag = np.diag(c)
    if np.ptp(diag) > STRUCTURE_ATOL:
        return None
    if n == 1:
        return float(diag[0]), 0.0
    off = c[~np.eye(n, dtype=bool)]
    if np.ptp(off) > STRUCTURE_ATOL:
        return None
    return float(np.mean(diag)), float(np.mean(off))


def fisher_information(design: Design) -> FisherInfo:
    """``C = B^T T B`` with the ``aI + bJ`` tag attached when it applies."""
    require_valid(design)
    B = design.rows.astype(float)
    c = (B.T * design.times) @ B
    c = 0.5 * (c + c.T)
    return FisherInfo(c, _detect_structure(c))


def ai_bj_trace_inverse(a: float, b: float, n: int) -> float:
    """``Tr(((a-b) I + b J)^-1) = (n-1)/(a-b) + 1/(a+(n-1)b)``."""
    small, large = a - b, a + (n - 1) * b
    threshold = PIVOT_RTOL * max(abs(a), 1e-300)
    if (n > 1 and small <= threshold) or large <= threshold:
        raise SingularDesignError(f"aI+bJ matrix with a={a}, b={b} is not positive definite")
    return (n - 1) / small + 1.0 / large


def trace_inverse(c: FisherInfo) -> float:
    """``Tr C^-1``, the total MSE of the ML estimator (sigma^2 = 1)."""
    if c.structure is None:
        return spd_trace_inverse(c.matrix)
    a, b = c.structure
    closed = ai_bj_trace_inverse(a, b, c.n)
    if __debug__:
        dense = spd_trace_inverse(c.matrix)
        assert math.isclose(closed, dense, rel_tol=1e-8), (closed, dense)
    return closed


def ml_estimate(design: Design, x: "Observation | Sequence[float]") -> np.ndarray:
    """Solve ``(B^T T B) mu = B^T x``."""
    require_valid(design)
    x = np.asarray(x.values if isinstance(x, Observation) else x, dtype=float)
    if x.shape[0] != design.m:
        raise InvalidDesignError(f"observation has {x.shape[0]} values, design has {design.m} rows")
    c = fisher_information(design).matrix
    return spd_solve(c, design.rows.T.astype(float) @ x)


def estimator_covariance(design: Design) -> np.ndarray:
    """Covariance of the ML estimate, ``C^-1``."""
    return spd_inverse(fisher_information(design).matrix)


def spectrum_ai_bj(a: float, b: float, n: int) -> Spectrum:
    small, large = a - b, a + (n - 1) * b
    if n == 1:
        return Spectrum(((a, 1),))
    if small == large:
        return Spectrum(((small, n),))
    return Spectrum(((small, n - 1), (large, 1)))


def dense_spectrum(c: FisherInfo | np.ndarray, rtol: float = 1e-9) -> Spectrum:
    """Spectrum from the Jacobi eigensolver, independent of any closed form."""
    m = c.matrix if isinstance(c, FisherInfo) else np.asarray(c, dtype=float)
    return Spectrum.from_eigenvalues(jacobi_eigenvalues(m), rtol=rtol)


# --- JSON design files -----------------------------------------------------

def _parse_time(v) -> float:
    if isinstance(v, str):
        return float(Fraction(v))
    return float(v)


def design_to_dict(design: Design) -> dict:
    return {
        "n": design.n_params,
        "rows": design.rows.tolist(),
        "times": [float(t) for t in design.times],
    }


def design_from_dict(data: dict) -> Design:
    try:
        n = int(data["n"])
        rows = data["rows"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidDesignError(f"malformed design document: {exc}") from exc
    times = data.get("times")
    if times is not None:
        times = [_parse_time(v) for v in times]
    return Design.from_rows(rows, times, n=n)


def write_design(design: Design, path: str | Path) -> None:
    # json emits the shortest repr that round-trips each float
    Path(path).write_text(json.dumps(design_to_dict(design)) + "\n")


def read_design(path: str | Path) -> Design:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidDesignError(f"{path}: not valid JSON ({exc})") from exc
    return design_from_dict(data)
