"""Small dense symmetric linear algebra.

Everything here works on matrices of at most a few hundred rows, so the
routines favour clarity over blocking.  The Cholesky factorization is
hand-rolled because the singularity rule (pivot below ``1e-12`` times the
largest diagonal entry) is part of the public contract; triangular solves
are delegated to SciPy.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_triangular

from .errors import SingularDesignError

PIVOT_RTOL = 1e-12


def cholesky(a: np.ndarray, rtol: float = PIVOT_RTOL) -> np.ndarray:
    """Lower-triangular ``L`` with ``L @ L.T == a``.

    Raises
    ------
    SingularDesignError
        If any pivot falls below ``rtol * max(diag(a))``.
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if n == 0:
        return np.zeros((0, 0))
    scale = float(np.max(np.diag(a)))
    if not scale > 0.0:
        raise SingularDesignError("information matrix has no positive diagonal entry")
    threshold = rtol * scale

    L = np.zeros_like(a)
    for j in range(n):
        row = L[j, :j]
        pivot = a[j, j] - row @ row
        if pivot < threshold:
            raise SingularDesignError(
                f"pivot {pivot:.3e} at column {j} is below {threshold:.3e}; "
                "the design is not identifiable"
            )
        d = np.sqrt(pivot)
        L[j, j] = d
        if j + 1 < n:
            L[j + 1 :, j] = (a[j + 1 :, j] - L[j + 1 :, :j] @ row) / d
    return L


def spd_solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``a x = b`` for symmetric positive definite ``a``."""
    L = cholesky(a)
    y = solve_triangular(L, b, lower=True)
    return solve_triangular(L.T, y, lower=False)


def spd_inverse(a: np.ndarray) -> np.ndarray:
    L = cholesky(a)
    linv = solve_triangular(L, np.eye(L.shape[0]), lower=True)
    inv = linv.T @ linv
    return 0.5 * (inv + inv.T)


def spd_trace_inverse(a: np.ndarray) -> float:
    """``Tr(a^-1)`` as the squared Frobenius norm of ``L^-1``.

    ``L^-1`` is obtained column by column from N triangular solves against
    the identity; the inverse itself is never formed.
    """
    L = cholesky(a)
    linv = solve_triangular(L, np.eye(L.shape[0]), lower=True)
    return float(np.sum(linv * linv))


def jacobi_eigenvalues(
    a: np.ndarray, tol: float = 1e-14, max_sweeps: int = 60
) -> np.ndarray:
    """Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.

    Sweeps visit every (p, q) pair in row order and stop once the
    off-diagonal Frobenius norm drops below ``tol`` times the full norm.
    Returns the eigenvalues sorted ascending.
    """
    A = np.array(a, dtype=float, copy=True)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.allclose(A, A.T, rtol=1e-12, atol=1e-12 * max(1.0, np.abs(A).max(initial=0.0))):
        raise ValueError("matrix is not symmetric")
    A = 0.5 * (A + A.T)
    total = np.linalg.norm(A)
    if n < 2 or total == 0.0:
        return np.sort(np.diag(A))

    for _ in range(max_sweeps):
        if np.linalg.norm(A - np.diag(np.diag(A))) <= tol * total:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                app, aqq = A[p, p], A[q, q]
                theta = (aqq - app) / (2.0 * apq)
                t = np.copysign(1.0, theta) / (abs(theta) + np.hypot(1.0, theta))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                ap = A[:, p].copy()
                aq = A[:, q]
                A[:, p] = c * ap - s * aq
                A[:, q] = s * ap + c * aq
                rp = A[p, :].copy()
                rq = A[q, :]
                A[p, :] = c * rp - s * rq
                A[q, :] = s * rp + c * rq
                A[p, q] = A[q, p] = 0.0
    else:
        raise RuntimeError("Jacobi iteration did not converge")
    return np.sort(np.diag(A))
