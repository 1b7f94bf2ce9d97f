"""Command line front end.

Exit codes: 0 success, 1 usage or parse error, 2 numeric budget failure,
3 periodicity gate failure.
"""

from __future__ import annotations

import argparse
import io
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import expr as ex
from .errors import BudgetExceeded, JpError
from .fourier import DEFAULT_CUTOFF, DEFAULT_NQUAD
from .korovkin import gamma, theorem1_errors, theorem2_bound_check
from .paper_example import (classical_failure_table, closed_error, closed_gamma_series,
                            paper_operator)
from .periodic import Grid2D, sin_sin, sup_norm
from .summability import MethodPoint, family

EXIT_OK, EXIT_USAGE, EXIT_BUDGET, EXIT_PERIODIC = 0, 1, 2, 3

CSV_HEADER = ("r,s,err0,err1,err2,err3,err4,gamma,"
              "closed_err0,closed_err1,closed_err2,closed_err3,closed_err4,closed_gamma")


class UsageError(Exception):
    pass


@dataclass
class SweepSpec:
    weights: str = "abel"
    points: list = field(default_factory=list)
    grid: int = 128
    tol: float = 1e-10
    cutoff: int = DEFAULT_CUTOFF
    n_quad: int = DEFAULT_NQUAD
    out: str = "sweep.csv"
    serial: bool = True

    def validate(self) -> None:
        if self.grid <= 0 or self.grid % 4:
            raise UsageError(f"grid resolution must be a positive multiple of 4, got {self.grid}")
        if not self.tol > 0:
            raise UsageError("tolerance must be positive")
        for r, s in self.points:
            try:
                MethodPoint(r, s)
            except ValueError as err:
                raise UsageError(str(err)) from None
        try:
            family(self.weights)
        except ValueError as err:
            raise UsageError(str(err)) from None


def parse_points(text: str) -> list[tuple[float, float]]:
    points = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(",")
        if len(parts) != 2:
            raise UsageError(f"point {chunk!r} must look like r,s")
        try:
            points.append((float(parts[0]), float(parts[1])))
        except ValueError:
            raise UsageError(f"point {chunk!r} is not numeric") from None
    return points


def _fmt(v: float) -> str:
    return "nan" if math.isnan(v) else f"{v:.12g}"


def _sweep_row(spec: SweepSpec, point) -> str:
    r, s = point
    w = family(spec.weights)
    L = paper_operator(spec.cutoff, spec.n_quad)
    grid = Grid2D.square(spec.grid)
    errs = theorem1_errors(L, w, point, grid, spec.tol)
    g = gamma(L, w, point, grid, spec.tol)
    if w.kind == "abel":
        closed = [closed_error(i, r, s) for i in range(5)] + [closed_gamma_series(r, s, spec.tol)]
    else:
        # the closed forms describe Abel weights only
        closed = [math.nan] * 6
    return ",".join(_fmt(v) for v in (r, s, *errs, g, *closed))


def run_sweep(spec: SweepSpec) -> str:
    """Write the sweep CSV to ``spec.out``; the file is removed if any point fails."""
    spec.validate()
    try:
        if spec.serial:
            rows = [_sweep_row(spec, p) for p in spec.points]
        else:
            with ThreadPoolExecutor() as pool:
                rows = list(pool.map(lambda p: _sweep_row(spec, p), spec.points))
    except JpError:
        if os.path.exists(spec.out):
            os.remove(spec.out)
        raise
    with open(spec.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        for row in rows:
            fh.write(row + "\n")
    return spec.out


def run_demo(grid_size: int = 64) -> str:
    out = io.StringIO()
    w = family("abel")
    L = paper_operator()
    grid = Grid2D.square(grid_size)

    table = classical_failure_table(20)
    print("Example operator L_mn = (1 + (-1)^(m+n)) T_mn, Abel weights", file=out)
    print(f"classical errors ||L_mn(f0) - f0|| on 0 <= m, n < 20: "
          f"min {table.errors.min():.12g}, max {table.errors.max():.12g}", file=out)
    verdict = "no verdict" if not table.probe.converged else f"converged to {table.probe.limit}"
    print(f"Pringsheim probe on L_mn(f0): {verdict}", file=out)
    print("", file=out)

    ladder = (0.5, 0.9, 0.99, 0.999)
    print("J_1 errors along r = s", file=out)
    print(f"{'r':>6} " + " ".join(f"{'err' + str(i):>14}" for i in range(5))
          + f" {'gamma':>14}", file=out)
    for r in ladder:
        errs = theorem1_errors(L, w, (r, r), grid)
        g = gamma(L, w, (r, r), grid)
        print(f"{r:>6} " + " ".join(f"{e:>14.8g}" for e in errs) + f" {g:>14.8g}", file=out)
    print("", file=out)

    f = sin_sin()
    print("Modulus bound check for f = sin x sin y", file=out)
    for r in (0.9, 0.99):
        chk = theorem2_bound_check(f, L, w, (r, r), grid)
        print(f"  r = s = {r}: lhs {chk.lhs:.8g} <= rhs {chk.rhs:.8g}: "
              f"{'holds' if chk.holds else 'FAILS'}", file=out)
    return out.getvalue()


def run_check(text: str, spec: SweepSpec) -> tuple[int, str]:
    """Periodicity gate plus the modulus bound check for an expression ``f``."""
    e = ex.parse(text)
    gate = ex.periodicity_gate(e)
    if not gate.passed:
        x, y = gate.worst_point
        return EXIT_PERIODIC, (f"periodicity gate failed for {text!r}: mismatch "
                               f"{gate.worst:.3g} at ({x:.6g}, {y:.6g})")
    spec.validate()
    f = ex.to_function(e, text)
    grid = Grid2D.square(spec.grid)
    f = type(f)(f.eval, f.name, sup_norm(f, grid))
    w = family(spec.weights)
    L = paper_operator(spec.cutoff, spec.n_quad)
    lines = []
    for r, s in spec.points:
        chk = theorem2_bound_check(f, L, w, (r, s), grid, spec.tol)
        lines.append(f"r={r:g} s={s:g} lhs={chk.lhs:.12g} rhs={chk.rhs:.12g} "
                     f"holds={'yes' if chk.holds else 'no'}")
    return EXIT_OK, "\n".join(lines)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_numeric(p):
    p.add_argument("--weights", default="abel", choices=("abel", "log"))
    p.add_argument("--points", default="0.5,0.5;0.9,0.9;0.99,0.99")
    p.add_argument("--grid", type=int, default=128)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--cutoff", type=int, default=DEFAULT_CUTOFF)
    p.add_argument("--nquad", type=int, default=DEFAULT_NQUAD)
    p.add_argument("--serial", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="jpkorovkin", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    sweep = sub.add_parser("sweep", help="error and gamma sweep over method points, as CSV")
    _add_numeric(sweep)
    sweep.add_argument("--out", required=True)
    sub.add_parser("demo", help="print the Abel-Poisson example report")
    check = sub.add_parser("check", help="periodicity gate and modulus bound for f(x, y)")
    check.add_argument("expression")
    _add_numeric(check)
    return parser


def _spec(args, out="-") -> SweepSpec:
    return SweepSpec(weights=args.weights, points=parse_points(args.points), grid=args.grid,
                     tol=args.tol, cutoff=args.cutoff, n_quad=args.nquad, out=out,
                     serial=args.serial)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "demo":
            sys.stdout.write(run_demo())
            return EXIT_OK
        if args.command == "sweep":
            run_sweep(_spec(args, args.out))
            return EXIT_OK
        code, text = run_check(args.expression, _spec(args))
        if code == EXIT_OK:
            print(text)
        else:
            print(text, file=sys.stderr)
        return code
    except (UsageError, ex.ParseError, ZeroDivisionError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as err:
        print(f"numeric budget failure: {err}", file=sys.stderr)
        return EXIT_BUDGET
    except JpError as err:
        print(f"numeric failure: {err}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
