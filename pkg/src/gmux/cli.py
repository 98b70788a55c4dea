"""``gmux`` command line entry point.

Exit status is 0 on success, 1 on a library error (a one-line JSON object
with ``error`` and ``message`` goes to stderr) and 2 when the arguments
cannot be parsed.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import designs as dz
from .analysis import global_optimum
from .errors import GmuxError, InvalidDesignError
from .figures import emit_figure_data, to_csv
from .hadamard import core_design, core_matrix, hadamard, is_supported_order, truncated_core_design
from .model import design_to_dict, fisher_information, read_design, trace_inverse, validate_design
from .simulator import SimConfig, default_mu, simulate

FAMILIES = ("identity", "complement", "individual-joint", "single-k", "multi-k", "hadamard")


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _need(args, name):
    if getattr(args, name) is None:
        raise GmuxError(f"--{name.replace('_', '-')} is required for family {args.family}")
    return getattr(args, name)


def build_design(args):
    n, family = args.n, args.family
    if family == "identity":
        return dz.identity_design(n)
    if family == "complement":
        return dz.complement_design(n)
    if family == "individual-joint":
        return dz.individual_plus_joint(n, _need(args, "beta"))
    if family == "single-k":
        return dz.single_k_design(n, _need(args, "k"))
    if family == "multi-k":
        return dz.multi_k_design(n, dz.parse_weights(_need(args, "weights"), n))
    return truncated_core_design(n).design


def cmd_evaluate(args) -> None:
    d = read_design(args.design)
    report = validate_design(d)
    if not report.valid:
        raise InvalidDesignError("; ".join(report.violations))
    info = fisher_information(d)
    out = {
        "trace_inverse": trace_inverse(info),
        "rank": report.rank,
        "structured": list(info.structure) if info.structure else None,
    }
    print(json.dumps(out))


def cmd_design(args) -> None:
    _write(json.dumps(design_to_dict(build_design(args))) + "\n", args.out)


def cmd_optimize(args) -> None:
    opt = global_optimum(args.n)
    out = {"n": opt.n, "family": opt.family, "mse": opt.mse, "rows": opt.rows}
    if opt.family == "single-k":
        out.update(k=opt.k, time_per_row=float(opt.time_per_row), time_per_row_exact=f"{opt.n}/{opt.rows}")
        if (opt.n + 1) % 4 == 0 and is_supported_order(opt.n + 1):
            out["hadamard"] = {"rows": opt.n, "time_per_row": 1.0}
    else:
        out.update(beta=opt.beta, time_per_row=[1.0 - opt.beta, 1.0 - opt.beta, opt.n * opt.beta])
    print(json.dumps(out))


def _parse_mu(text: str | None, n: int) -> np.ndarray:
    if text is None:
        return default_mu(n)
    try:
        return np.array([float(Fraction(v)) for v in text.split(",")])
    except ValueError as exc:
        raise GmuxError(f"cannot parse --mu {text!r}") from exc


def cmd_simulate(args) -> None:
    d = read_design(args.design)
    cfg = SimConfig(d, _parse_mu(args.mu, d.n_params), args.trials, args.seed, args.sigma2)
    report = simulate(cfg, partitions=args.partitions)
    _write(json.dumps(report.to_dict()) + "\n", args.out)


def cmd_figures(args) -> None:
    kwargs = {}
    if args.grid is not None and args.which in (1, 3):
        kwargs["grid_size"] = args.grid
    if args.which == 1:
        kwargs["cost"] = args.cost
    header, rows = emit_figure_data(args.which, args.n, **kwargs)
    _write(to_csv(header, rows), args.out)


def cmd_hadamard(args) -> None:
    if args.emit == "matrix":
        m = hadamard(args.order).entries
    elif args.emit == "core":
        m = core_matrix(args.order)
    else:
        _write(json.dumps(design_to_dict(core_design(args.order - 1).design)) + "\n", args.out)
        return
    _write("".join(",".join(str(int(v)) for v in row) + "\n" for row in m), args.out)


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gmux", description="Gaussian multiplex channel designs and costs.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("evaluate", help="print Tr C^-1, rank and aI+bJ structure of a design file")
    s.add_argument("design", help="design JSON file")
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("design", help="generate a design and write it as JSON")
    s.add_argument("--family", choices=FAMILIES, required=True)
    s.add_argument("--n", type=int, required=True, help="number of sensors")
    s.add_argument("--k", type=int, help="closed switches per row (single-k)")
    s.add_argument("--beta", type=float, help="joint time fraction (individual-joint)")
    s.add_argument("--weights", help="k:alpha pairs, e.g. 1:0.5,10:0.5 (multi-k)")
    s.add_argument("--out", help="output path (default stdout)")
    s.set_defaults(func=cmd_design)

    s = sub.add_parser("optimize", help="print the optimal design summary for n sensors")
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(func=cmd_optimize)

    s = sub.add_parser("simulate", help="Monte Carlo check of a design file")
    s.add_argument("--design", required=True)
    s.add_argument("--trials", type=int, default=100_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--mu", help="comma-separated true parameters (default i/N)")
    s.add_argument("--sigma2", type=float, default=1.0, help="noise variance")
    s.add_argument("--partitions", type=int, default=1, help="independent substreams")
    s.add_argument("--out", help="report path (default stdout)")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("figures", help="emit CSV data for one of the four cost plots")
    s.add_argument("--which", type=int, choices=(1, 2, 3, 4), required=True)
    s.add_argument("--n", type=int, help="N for figures 2 and 3; largest N for 1 and 4")
    s.add_argument("--grid", type=int, help="beta grid size (figures 1 and 3)")
    s.add_argument("--cost", choices=("plotted", "exact"), default="plotted",
                   help="figure 1 curve: plotted form or exact design cost")
    s.add_argument("--out", help="CSV path (default stdout)")
    s.set_defaults(func=cmd_figures)

    s = sub.add_parser("hadamard", help="print a Hadamard matrix, its 0/1 core, or the core design")
    s.add_argument("--order", type=int, required=True)
    s.add_argument("--emit", choices=("matrix", "core", "design"), default="matrix")
    s.add_argument("--out")
    s.set_defaults(func=cmd_hadamard)
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = make_parser().parse_args(argv)
    try:
        args.func(args)
    except GmuxError as exc:
        print(json.dumps({"error": exc.kind, "message": str(exc)}), file=sys.stderr)
        return 1
    except OSError as exc:
        print(json.dumps({"error": "io", "message": str(exc)}), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
