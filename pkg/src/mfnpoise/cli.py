"""
Command-line front end.

Subcommands: gen, lagrange, lambda, sweep, verify, solve. Tables go to
standard output (or ``--out``) as an aligned text table, CSV or JSON.
Exit codes: 0 success, 1 verification failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .core import check_order
from .lagrange import lagrange_polynomials_numeric, powell_lagrange_all
from .poisedness import lambda_row, sweep_lambda_vs_m, verify_grid
from .powell import powell_initial_set
from .solver import SolverOptions, history_to_csv, solve
from .testfuncs import NAMES, get_function


class UsageError(Exception):
    pass


def _fmt_machine(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(float(v), ".17g")
    return str(v)


def _fmt_human(v):
    if isinstance(v, (float, np.floating)) and math.isfinite(v):
        return format(float(v), ".6g")
    return _fmt_machine(v)


def _json_value(v):
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_json_value(x) for x in v]
    return v


def render(command, header, rows, fmt, seed=None, csv_header=True):
    if fmt == "json":
        meta = {"command": command, "version": __version__, "seed": seed}
        payload = {"meta": meta, "rows": [{k: _json_value(v) for k, v in zip(header, r)} for r in rows]}
        return json.dumps(payload, indent=1) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if csv_header:
            writer.writerow(header)
        for r in rows:
            writer.writerow([";".join(_fmt_machine(x) for x in v) if isinstance(v, (list, tuple)) else _fmt_machine(v) for v in r])
        return buf.getvalue()
    cells = [[str(h) for h in header]]
    for r in rows:
        cells.append([" ".join(_fmt_human(x) for x in v) if isinstance(v, (list, tuple)) else _fmt_human(v) for v in r])
    widths = [max(len(c[j]) for c in cells) for j in range(len(header))]
    return "".join("  ".join(c.rjust(w) for c, w in zip(line, widths)).rstrip() + "\n" for line in cells)


# ----------------------------------------------------------- validation

def _positive_int(flag, value, minimum=1):
    if value is None or value < minimum:
        raise UsageError(f"{flag} must be an integer >= {minimum}, got {value}")
    return value


def _check_m(n, m):
    if m is None:
        return 2 * n + 1
    if not n + 2 <= m <= 2 * n + 1:
        raise UsageError(f"--m must lie in [n+2, 2n+1] = [{n + 2}, {2 * n + 1}], got {m}")
    return m


def _check_delta(flag, delta):
    if not (delta > 0 and math.isfinite(delta)):
        raise UsageError(f"{flag} must be a positive finite number, got {delta}")
    return delta


def _parse_p(text):
    try:
        return check_order(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"must be a number in [1, inf] or 'inf', got {text!r}")


def _parse_x0(flag, text, n):
    if text is None:
        return None
    try:
        x0 = np.array([float(t) for t in text.split(",")])
    except ValueError:
        raise UsageError(f"{flag} must be a comma-separated list of numbers, got {text!r}")
    if x0.size != n:
        raise UsageError(f"{flag} must have n = {n} entries, got {x0.size}")
    return x0


# ------------------------------------------------------------ commands

def cmd_gen(args):
    n = _positive_int("--n", args.n)
    m = _check_m(n, args.m)
    delta = _check_delta("--delta", args.delta)
    xset = powell_initial_set(n, m, delta, _parse_x0("--x0", args.x0, n))
    header = [f"x{j + 1}" for j in range(n)]
    rows = [list(map(float, y)) for y in xset.points]
    # one point per row, no header, so the output is directly loadable as a matrix
    return render("gen", header, rows, args.format, csv_header=False), 0


def cmd_lagrange(args):
    n = _positive_int("--n", args.n)
    m = _check_m(n, args.m)
    delta = _check_delta("--delta", args.delta)
    x0 = _parse_x0("--x0", args.x0, n)
    base = np.zeros(n) if x0 is None else x0
    if args.mode == "closed":
        polys = powell_lagrange_all(n, m, delta, x0)
    else:
        polys = lagrange_polynomials_numeric(powell_initial_set(n, m, delta, x0))
    iu = np.triu_indices(n)
    header = ["i", "c"] + [f"g{j + 1}" for j in range(n)] + [f"h{a + 1}{b + 1}" if n < 10 else f"h{a + 1}_{b + 1}" for a, b in zip(*iu)]
    rows = []
    for i, L in enumerate(polys):
        L = L.rebase(base)
        rows.append([i, L.c] + list(map(float, L.g)) + list(map(float, L.H[iu])))
    return render("lagrange", header, rows, args.format), 0


LAMBDA_HEADER = ["n", "m", "p", "delta", "lambda_closed", "lambda_numeric", "abs_diff", "method", "witness"]


def _lambda_cells(row):
    return [row.n, row.m, row.p, row.delta, row.closed, row.numeric, row.abs_diff, row.method, list(row.witness)]


def _lambda_failed(row, tol):
    return row.abs_diff is not None and row.abs_diff > tol * max(1.0, abs(row.closed))


def cmd_lambda(args):
    n = _positive_int("--n", args.n)
    m = _check_m(n, args.m)
    delta = _check_delta("--delta", args.delta)
    row = lambda_row(n, m, args.p, delta, args.mode)
    if args.mode == "closed" and row.closed is None:
        print(f"note: no closed form is known for n={n}, m={m}, p={_fmt_machine(args.p)}", file=sys.stderr)
    code = 1 if _lambda_failed(row, args.tol) else 0
    return render("lambda", LAMBDA_HEADER, [_lambda_cells(row)], args.format, args.seed), code


def cmd_sweep(args):
    n = _positive_int("--n", args.n)
    delta = _check_delta("--delta", args.delta)
    rows = sweep_lambda_vs_m(n, args.p, delta, args.mode)
    code = 1 if any(_lambda_failed(r, args.tol) for r in rows) else 0
    return render("sweep", LAMBDA_HEADER, [_lambda_cells(r) for r in rows], args.format, args.seed), code


def cmd_verify(args):
    n_min = _positive_int("--n-min", args.n_min)
    n_max = _positive_int("--n-max", args.n_max, n_min)
    delta = _check_delta("--delta", args.delta)
    if not args.tol > 0:
        raise UsageError(f"--tol must be positive, got {args.tol}")
    checks = verify_grid(n_max, args.tol, delta, n_min)
    header = ["n", "m", "p", "delta", "check", "expected", "observed", "error", "method", "pass"]
    rows = [[c.n, c.m, c.p, c.delta, c.name, c.expected, c.observed, c.error, c.method, c.passed] for c in checks]
    failed = sum(not c.passed for c in checks)
    print(f"verify: {len(checks) - failed}/{len(checks)} checks passed", file=sys.stderr)
    return render("verify", header, rows, args.format, args.seed), 1 if failed else 0


def cmd_solve(args):
    n = _positive_int("--n", args.n)
    if args.function == "rosenbrock" and n < 2:
        raise UsageError("--n must be >= 2 for rosenbrock")
    problem = get_function(args.function, n, seed=args.seed)
    x0 = _parse_x0("--x0", args.x0, n)
    if x0 is None:
        x0 = np.zeros(n)
    m = _check_m(n, args.m)
    delta0 = _check_delta("--delta0", args.delta0)
    if args.max_evals < m:
        raise UsageError(f"--max-evals must be at least m = {m}, got {args.max_evals}")
    res = solve(problem.fun, x0, SolverOptions(m=m, delta0=delta0, max_evals=args.max_evals, gtol=args.gtol))
    if args.history:
        with open(args.history, "w") as fh:
            fh.write(history_to_csv(res.history))
    header = ["function", "n", "status", "evaluations", "best_value", "known_minimum", "x"]
    rows = [[problem.name, n, res.status, res.nfev, res.fun, problem.minimum, list(map(float, res.x))]]
    return render("solve", header, rows, args.format, args.seed), 0


# --------------------------------------------------------------- parser

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("table", "csv", "json"), default="table")
    common.add_argument("--out", metavar="PATH", help="write output to PATH instead of stdout")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized experiments")

    parser = argparse.ArgumentParser(prog="mfnpoise", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def setdims(p, with_m=True):
        p.add_argument("--n", type=int, required=True, help="dimension")
        if with_m:
            p.add_argument("--m", type=int, help="number of points in [n+2, 2n+1] (default 2n+1)")
        p.add_argument("--delta", type=float, default=1.0, help="radius / step length")

    p = sub.add_parser("gen", parents=[common], help="Powell's initial interpolation set")
    setdims(p)
    p.add_argument("--x0", help="starting point, comma-separated")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("lagrange", parents=[common], help="Lagrange polynomial coefficients of Powell's set")
    setdims(p)
    p.add_argument("--x0", help="starting point, comma-separated")
    p.add_argument("--mode", choices=("numeric", "closed"), default="numeric")
    p.set_defaults(func=cmd_lagrange)

    for name, func, with_m, help_ in (
        ("lambda", cmd_lambda, True, "well-poisedness constant of Powell's set"),
        ("sweep", cmd_sweep, False, "well-poisedness constant for every m"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_)
        setdims(p, with_m)
        p.add_argument("--p", type=_parse_p, default=2.0, help="ball order in [1, inf]; 'inf' accepted")
        p.add_argument("--mode", choices=("closed", "numeric", "both"), default="both")
        p.add_argument("--tol", type=float, default=1e-6, help="relative tolerance for closed/numeric agreement")
        p.set_defaults(func=func)

    p = sub.add_parser("verify", parents=[common], help="check closed forms and bounds over a grid")
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("solve", parents=[common], help="run the demonstration solver on a test function")
    p.add_argument("--function", choices=NAMES, default="rosenbrock")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--x0", help="starting point, comma-separated (default origin)")
    p.add_argument("--m", type=int)
    p.add_argument("--delta0", type=float, default=1.0)
    p.add_argument("--max-evals", type=int, default=500)
    p.add_argument("--gtol", type=float, default=1e-6)
    p.add_argument("--history", metavar="PATH", help="write the iteration history as CSV")
    p.set_defaults(func=cmd_solve)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text, code = args.func(args)
    except UsageError as exc:
        parser.exit(2, f"{parser.prog} {args.command}: error: {exc}\n")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
