"""Command-line front end.

Subcommands:

    solve        integrate a problem file and emit a t,y[,...] CSV
    convergence  refinement study over several steps, h,sup_error,order CSV
    apply        run one fractional operator over a t,value CSV
    verify       run the built-in property battery

Exit codes: 0 success, 1 usage, 2 unreadable or invalid input,
3 numerical failure.  CSV values are written with 17 significant digits,
so re-reading and re-emitting a CSV reproduces it byte for byte.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .decompose import Babenko, DirectVolterra
from .errors import (
    NonzeroOriginError,
    SingularInversionError,
    SingularOriginError,
    UnsupportedProblemError,
)
from .operators import OperatorOrder, SampleSeries, apply_operator
from .oracle import convergence_study
from .problemfile import ParseError, parse_problem
from .stepper import SolverConfig, solve
from .verify import run_verify

__all__ = ["main"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; route everything through
    # one exception so usage problems map to exit code 1 instead.
    def error(self, message):
        raise _UsageError(message)


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _write_lines(path: str | None, lines) -> None:
    text = "\n".join(lines) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _read_problem(path: str):
    with open(path) as fh:
        return parse_problem(fh.read())


def _build_parser() -> _Parser:
    parser = _Parser(prog="fodesolve",
                     description="fractional-order ODE solver")
    sub = parser.add_subparsers(dest="command", metavar="command")

    p_solve = sub.add_parser("solve", help="integrate a problem file")
    p_solve.add_argument("--problem", required=True, metavar="FILE")
    p_solve.add_argument("--step", type=float, required=True)
    p_solve.add_argument("--t-end", type=float, required=True)
    p_solve.add_argument("--inversion", choices=["babenko", "direct"],
                         default="direct")
    p_solve.add_argument("--babenko-terms", type=int, default=30,
                         metavar="K")
    p_solve.add_argument("--derivatives", action="store_true",
                         help="also emit z1 and derivative columns")
    p_solve.add_argument("--out", metavar="CSV", default=None)

    p_conv = sub.add_parser("convergence", help="refinement study")
    p_conv.add_argument("--problem", required=True, metavar="FILE")
    p_conv.add_argument("--steps", required=True,
                        help="comma-separated list, e.g. 0.01,0.005,0.0025")
    p_conv.add_argument("--t-end", type=float, required=True)
    p_conv.add_argument("--oracle", choices=["gl", "self"], default="self")
    p_conv.add_argument("--inversion", choices=["babenko", "direct"],
                        default="direct")
    p_conv.add_argument("--babenko-terms", type=int, default=30, metavar="K")
    p_conv.add_argument("--out", metavar="CSV", default=None)

    p_apply = sub.add_parser("apply",
                             help="apply one operator to a sampled CSV")
    p_apply.add_argument("--in", dest="infile", required=True, metavar="CSV")
    p_apply.add_argument("--order", type=float, required=True,
                         help="signed order: negative integrates")
    p_apply.add_argument("--out", metavar="CSV", default=None)

    p_verify = sub.add_parser("verify", help="run the property battery")
    p_verify.add_argument("--json", action="store_true")

    return parser


def _inversion_from(args):
    if args.inversion == "babenko":
        if args.babenko_terms < 1:
            raise _UsageError("--babenko-terms must be at least 1")
        return Babenko(terms=args.babenko_terms)
    return DirectVolterra()


def _cmd_solve(args) -> int:
    if args.step <= 0:
        raise _UsageError("--step must be positive")
    if args.t_end <= 0:
        raise _UsageError("--t-end must be positive")
    inversion = _inversion_from(args)
    problem = _read_problem(args.problem)
    cfg = SolverConfig(h=args.step, t_end=args.t_end, inversion=inversion,
                       output_derivatives=args.derivatives)
    traj = solve(problem, cfg)
    cols = [("t", traj.y.times), ("y", traj.y.values)]
    if args.derivatives:
        cols.append(("z1", traj.z1.values))
        for k, dser in enumerate(traj.y_derivs or (), start=1):
            cols.append((f"dy{k}", dser.values[: len(traj.y)]))
    header = ",".join(name for name, _ in cols)
    rows = [header]
    for i in range(len(traj.y)):
        rows.append(",".join(_fmt(vals[i]) for _, vals in cols))
    _write_lines(args.out, rows)
    if traj.diagnostics.nan_node is not None:
        node = traj.diagnostics.nan_node
        sys.stderr.write(
            f"numerical failure at node {node} (t = {node * traj.h:g});"
            " wrote the nodes before it\n"
        )
        return 3
    return 0


def _cmd_convergence(args) -> int:
    try:
        steps = [float(tok) for tok in args.steps.split(",") if tok.strip()]
    except ValueError:
        raise _UsageError(f"--steps must be numbers, got {args.steps!r}")
    if len(set(steps)) < 2:
        raise _UsageError("--steps needs at least two distinct values")
    if any(s <= 0 for s in steps):
        raise _UsageError("--steps must all be positive")
    if args.t_end <= 0:
        raise _UsageError("--t-end must be positive")
    inversion = _inversion_from(args)
    problem = _read_problem(args.problem)
    rows = convergence_study(problem, steps, args.t_end,
                             oracle=args.oracle, inversion=inversion)
    lines = ["h,sup_error,observed_order"]
    for row in rows:
        order = "" if row.observed_order is None else _fmt(row.observed_order)
        lines.append(f"{_fmt(row.h)},{_fmt(row.sup_error)},{order}")
    _write_lines(args.out, lines)
    return 0


def _read_csv_pairs(path: str):
    with open(path) as fh:
        raw = [ln.strip() for ln in fh if ln.strip()]
    if not raw:
        raise ValueError("input CSV is empty")
    start = 0
    first = raw[0].split(",")
    try:
        float(first[0])
    except ValueError:
        start = 1
    t, v = [], []
    for ln in raw[start:]:
        parts = ln.split(",")
        if len(parts) < 2:
            raise ValueError(f"expected two CSV columns, got {ln!r}")
        t.append(float(parts[0]))
        v.append(float(parts[1]))
    if len(t) < 2:
        raise ValueError("need at least two samples")
    return np.asarray(t), np.asarray(v)


def _cmd_apply(args) -> int:
    try:
        order = OperatorOrder(args.order)
    except ValueError as exc:
        raise _UsageError(str(exc))
    t, v = _read_csv_pairs(args.infile)
    h = t[1] - t[0]
    if h <= 0:
        raise ValueError("time column must be increasing")
    if abs(t[0]) > 1e-12 * max(1.0, h):
        raise ValueError("time column must start at t = 0")
    gaps = np.diff(t)
    if np.max(np.abs(gaps - h)) > 1e-9 * h:
        raise ValueError("time column must be uniformly spaced")
    out = apply_operator(SampleSeries(float(h), v), order)
    lines = ["t,value"]
    for ti, vi in zip(t, out.values):
        lines.append(f"{_fmt(ti)},{_fmt(vi)}")
    _write_lines(args.out, lines)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise _UsageError("a subcommand is required")
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "convergence":
            return _cmd_convergence(args)
        if args.command == "apply":
            return _cmd_apply(args)
        if args.command == "verify":
            return run_verify(json_output=args.json)
        raise _UsageError(f"unknown command {args.command!r}")
    except _UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 1
    except ParseError as exc:
        sys.stderr.write(f"problem file: {exc}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"cannot read input: {exc}\n")
        return 2
    except (UnsupportedProblemError, NonzeroOriginError,
            SingularOriginError) as exc:
        sys.stderr.write(f"unsupported input: {exc}\n")
        return 2
    except ValueError as exc:
        sys.stderr.write(f"invalid input: {exc}\n")
        return 2
    except (SingularInversionError, ArithmeticError) as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
