"""Optimality results: best single k, convex-combination sweeps, and the
majorization certificate for arbitrary time allocations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import minimize_scalar

from .designs import (
    MultiKWeights,
    individual_plus_joint,
    individual_plus_joint_mse,
    multi_k_spectrum,
    single_k_design,
    single_k_mse,
)
from .errors import InvalidDesignError, SingularDesignError
from .model import Design, Spectrum, dense_spectrum, fisher_information, require_valid, trace_inverse


def optimal_k(n: int) -> int:
    """Integer minimizer of ``single_k_mse(n, k)``."""
    if n < 2:
        raise InvalidDesignError("optimal_k needs n >= 2")
    if n == 2:
        return 1
    return n // 2 if n % 2 == 0 else (n + 1) // 2


@dataclass(frozen=True)
class KCurvePoint:
    k: int
    mse: float


def mse_vs_k_curve(n: int) -> list[KCurvePoint]:
    if n < 2:
        raise InvalidDesignError("curve needs n >= 2")
    return [KCurvePoint(k, single_k_mse(n, k)) for k in range(1, n)]


def _spectrum_cost(spectrum: Spectrum) -> float:
    try:
        return spectrum.trace_inverse()
    except SingularDesignError:
        return math.inf


def convex_combination_sweep(n: int, k1: int, k2: int, grid_size: int = 101) -> list[tuple[float, float]]:
    """Cost of weight ``1 - beta`` on block ``k1`` and ``beta`` on ``k2``, beta uniform on [0, 1].

    Points where the combined information matrix is singular (e.g. all
    weight on ``k = n``) report ``inf``.
    """
    if not (1 <= k1 <= n and 1 <= k2 <= n):
        raise InvalidDesignError(f"k1, k2 must lie in 1..{n}")
    if grid_size < 2:
        raise InvalidDesignError("grid_size must be >= 2")
    out = []
    for beta in np.linspace(0.0, 1.0, grid_size):
        beta = float(beta)
        weights = MultiKWeights.from_mapping(n, {k1: 1.0} if k1 == k2 else {k1: 1.0 - beta, k2: beta})
        out.append((beta, _spectrum_cost(multi_k_spectrum(n, weights))))
    return out


def plotted_beta_cost(n: int, beta: float) -> float:
    """``n/(1-beta) + 1/(1+(n^2-1) beta)``.

    This is the individual + joint curve in its commonly plotted form,
    which counts the ``1 - beta`` eigenvalue ``n`` times instead of
    ``n - 1``; it exceeds the true cost by exactly ``1/(1 - beta)``.
    """
    return n / (1.0 - beta) + 1.0 / (1.0 + (n * n - 1) * beta)


@dataclass(frozen=True)
class BetaSweep:
    n: int
    betas: np.ndarray
    mses: np.ndarray
    grid_argmin: float
    grid_min: float
    argmin: float
    minimum: float


def _refine(f, lo: float, hi: float, tol: float = 1e-10) -> tuple[float, float]:
    res = minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": tol})
    return float(res.x), float(res.fun)


def beta_sweep(n: int, grid_size: int = 1001, cost: str = "plotted") -> BetaSweep:
    """Individual + joint cost over a uniform beta grid on [0, 1), plus a refined minimizer.

    ``cost="plotted"`` evaluates :func:`plotted_beta_cost`; ``cost="exact"``
    uses the true design cost :func:`individual_plus_joint_mse`.
    """
    if n < 2:
        raise InvalidDesignError("beta sweep needs n >= 2")
    if grid_size < 2:
        raise InvalidDesignError("grid_size must be >= 2")
    f = {"plotted": plotted_beta_cost, "exact": individual_plus_joint_mse}.get(cost)
    if f is None:
        raise ValueError(f"unknown cost {cost!r}")
    betas = np.linspace(0.0, 1.0, grid_size, endpoint=False)
    mses = np.array([f(n, float(b)) for b in betas])
    i = int(np.argmin(mses))
    step = betas[1] - betas[0]
    lo, hi = max(0.0, betas[i] - step), min(betas[i] + step, 1.0 - 1e-12)
    x, fx = _refine(lambda b: f(n, b), lo, hi)
    if mses[i] < fx:
        x, fx = float(betas[i]), float(mses[i])
    return BetaSweep(n, betas, mses, float(betas[i]), float(mses[i]), x, fx)


# --- majorization certificate ------------------------------------------------

def block_weights(design: Design) -> MultiKWeights:
    """``alpha_k`` = total time on rows with ``k`` closed switches, divided by N."""
    n = design.n_params
    counts = design.rows.sum(axis=1)
    alphas = [math.fsum(design.times[counts == k]) / n for k in range(1, n + 1)]
    total = math.fsum(alphas)
    return MultiKWeights(tuple(a / total for a in alphas))


@dataclass(frozen=True)
class MajorizationCertificate:
    """Evidence that equalizing eigenvalues can only lower ``Tr C^-1``.

    ``transformed_spectrum`` keeps ``Tr C`` and replaces the top eigenvalue
    by ``u^T C u`` (``u`` the normalized all-ones vector) and the rest by
    their common average; it is the spectrum of the equal-time multi-k
    design with the same block weights.
    """

    original_spectrum: Spectrum
    transformed_spectrum: Spectrum
    quadratic_form_bound: float
    trace_original: float
    trace_inverse_original: float
    trace_inverse_transformed: float
    lambda_max: float
    weights: MultiKWeights


def majorization_certificate(design: Design) -> MajorizationCertificate:
    require_valid(design)
    n = design.n_params
    info = fisher_information(design)
    c = info.matrix
    weights = block_weights(design)

    u = np.full(n, 1.0 / math.sqrt(n))
    q = float(u @ c @ u)
    q_blocks = math.fsum(a * k * k for k, a in weights.items())
    assert math.isclose(q, q_blocks, rel_tol=1e-10), (q, q_blocks)

    original = dense_spectrum(info)
    lam_max = original.max
    # the Rayleigh quotient never exceeds the top eigenvalue
    assert q <= lam_max * (1 + 1e-9) + 1e-12, (q, lam_max)

    tr = float(np.trace(c))
    t_orig = trace_inverse(info)
    if n == 1:
        transformed = original
        t_new = t_orig
    else:
        # (a) lower lambda_max to q, (b) hand the excess to the others,
        # (c) average those N - 1 values
        avg = (tr - q) / (n - 1)
        transformed = Spectrum(((avg, n - 1), (q, 1))) if avg != q else Spectrum(((q, n),))
        t_new = _spectrum_cost(transformed)
    return MajorizationCertificate(
        original_spectrum=original,
        transformed_spectrum=transformed,
        quadratic_form_bound=q,
        trace_original=tr,
        trace_inverse_original=t_orig,
        trace_inverse_transformed=t_new,
        lambda_max=lam_max,
        weights=weights,
    )


# --- global optimum ------------------------------------------------------------

@dataclass(frozen=True)
class GlobalOptimum:
    """Best design for ``n`` sensors.

    For ``n >= 3`` this is every ``k*``-subset observed for ``n / C(n, k*)``
    seconds.  ``n = 2`` is the exception: both sensors alone plus the joint
    row, with the joint time fraction ``beta`` optimized.
    """

    n: int
    family: str
    mse: float
    k: int | None = None
    rows: int | None = None
    time_per_row: Fraction | None = None
    beta: float | None = None

    def design(self) -> Design:
        if self.family == "single-k":
            return single_k_design(self.n, self.k)
        return individual_plus_joint(self.n, self.beta)


def global_optimum(n: int) -> GlobalOptimum:
    if n < 2:
        raise InvalidDesignError("global optimum needs n >= 2")
    if n == 2:
        sweep = beta_sweep(2, cost="exact")
        return GlobalOptimum(2, "individual+joint", sweep.minimum, beta=sweep.argmin, rows=3)
    k = optimal_k(n)
    m = math.comb(n, k)
    return GlobalOptimum(n, "single-k", single_k_mse(n, k), k=k, rows=m, time_per_row=Fraction(n, m))
