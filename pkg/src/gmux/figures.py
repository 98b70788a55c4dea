"""Tabular data behind the four cost plots."""

from __future__ import annotations

import csv
import io
import logging
from typing import Sequence

import numpy as np

from .analysis import beta_sweep, convex_combination_sweep, mse_vs_k_curve, optimal_k
from .designs import single_k_mse
from .errors import UnsupportedOrderError
from .hadamard import truncated_core_design
from .model import fisher_information, trace_inverse

log = logging.getLogger(__name__)

DEFAULT_N = {1: 20, 2: 20, 3: 20, 4: 100}


def fig1(max_n: int = 20, grid_size: int = 1001, cost: str = "plotted"):
    """``(n, beta, mse)`` for n = 2..max_n; each curve also carries its refined minimizer."""
    rows = []
    for n in range(2, max_n + 1):
        sweep = beta_sweep(n, grid_size, cost=cost)
        pts = list(zip(sweep.betas.tolist(), sweep.mses.tolist()))
        if sweep.argmin not in sweep.betas:
            pts.append((sweep.argmin, sweep.minimum))
        rows.extend((n, b, m) for b, m in sorted(pts))
    return ("n", "beta", "mse"), rows


def fig2(n: int = 20):
    return ("k", "mse"), [(p.k, p.mse) for p in mse_vs_k_curve(n)]


def fig3(n: int = 20, grid_size: int = 101):
    """Sweeps from the best single k toward every other k in 1..n-1."""
    k_star = optimal_k(n)
    rows = []
    for k2 in range(1, n):
        if k2 == k_star:
            continue
        rows.extend((k2, b, m) for b, m in convex_combination_sweep(n, k_star, k2, grid_size))
    return ("k2", "beta", "mse"), rows


def hadamard_mse(n: int) -> float:
    return trace_inverse(fisher_information(truncated_core_design(n).design))


def fig4(cap: int = 100):
    """Even n from 2 to ``cap``: optimal single-k cost vs the truncated Hadamard design."""
    rows = []
    for n in range(2, cap + 1, 2):
        try:
            had = hadamard_mse(n)
        except UnsupportedOrderError as exc:
            log.warning("n=%d: %s", n, exc)
            had = None
        rows.append((n, single_k_mse(n, n // 2), had))
    return ("n", "mse_optimal", "mse_hadamard"), rows


def emit_figure_data(which: int, n: int | None = None, **kwargs):
    builders = {1: fig1, 2: fig2, 3: fig3, 4: fig4}
    if which not in builders:
        raise ValueError(f"figure must be one of 1..4, got {which}")
    return builders[which](DEFAULT_N[which] if n is None else n, **kwargs)


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def to_csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()
