"""Command-line front end: ``fwerbound <command> [options]``.

Exit codes: 0 success, 1 input or I/O error, 2 explicitly requested bound is
not applicable, 3 a verification check failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import certify, svg, verify
from .equicorrelated import BOUNDS, TestProblem, best_bound
from .errors import DomainError, MatrixError
from .general import BOUNDS_GENERAL, CorrelationMatrix, best_bound_general
from .montecarlo import DEFAULT_REPS, DEFAULT_SEED, DEFAULT_GRID, default_threads, estimate_fwer, fmt, sweep, sweep_to_csv

EXIT_OK, EXIT_INPUT, EXIT_INAPPLICABLE, EXIT_VERIFY = 0, 1, 2, 3


class InputError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which is reserved here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _round(obj):
    """Floats to ten significant digits, recursively."""
    if isinstance(obj, float):
        return float(fmt(obj))
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def dumps(obj) -> str:
    return json.dumps(_round(obj), indent=2)


def parse_grid(spec: str) -> list[float]:
    """``start:end:step`` with both ends inclusive."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise InputError(f"grid must look like start:end:step, got {spec!r}")
    try:
        start, end, step = (float(p) for p in parts)
    except ValueError:
        raise InputError(f"grid values must be numbers, got {spec!r}") from None
    if not step > 0:
        raise InputError("grid step must be positive")
    if end < start:
        raise InputError("grid end must not be below its start")
    count = int((end - start) / step + 1e-9)
    grid = [round(start + k * step, 12) for k in range(count + 1)]
    if any(not (0.0 <= r <= 1.0) for r in grid):
        raise InputError("grid values must lie in [0, 1]")
    return grid


def _method_lookup(table: dict, name: str):
    if name == "auto":
        return None
    for key, fn in table.items():
        if key.lower() == name.lower():
            return fn
    raise InputError(f"unknown method {name!r}; choose auto or one of {', '.join(table)}")


def _emit(text: str, output: str | None) -> None:
    if output:
        try:
            Path(output).write_text(text)
        except OSError as exc:
            raise InputError(f"cannot write {output}: {exc}") from None
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _problem(args) -> TestProblem:
    if args.n is None or args.alpha is None:
        raise InputError("--n and --alpha are required")
    return TestProblem(args.n, args.alpha)


def _matrix(path: str) -> CorrelationMatrix:
    try:
        return CorrelationMatrix.from_csv(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def _threads(args) -> int:
    return args.threads if args.threads is not None else default_threads()


def cmd_bound(args) -> int:
    problem = _problem(args)
    if args.rho is None:
        raise InputError("--rho is required")
    fn = _method_lookup(BOUNDS, args.method)
    result = best_bound(problem, args.rho) if fn is None else fn(problem, args.rho)
    _emit(dumps(result.to_dict()), args.output)
    if not result.applicable:
        failed = [p for p, ok in result.conditions if not ok]
        print(f"{result.method} does not apply: {'; '.join(failed)}", file=sys.stderr)
        return EXIT_INAPPLICABLE
    return EXIT_OK


def cmd_bound_matrix(args) -> int:
    problem = _problem(args)
    if not args.matrix:
        raise InputError("--matrix is required")
    R = _matrix(args.matrix)
    fn = _method_lookup(BOUNDS_GENERAL, args.method)
    result = best_bound_general(problem, R) if fn is None else fn(problem, R)
    _emit(dumps(result.to_dict()), args.output)
    if not result.applicable:
        failed = [p for p, ok in result.conditions if not ok]
        print(f"{result.method} does not apply: {'; '.join(failed)}", file=sys.stderr)
        return EXIT_INAPPLICABLE
    return EXIT_OK


def cmd_simulate(args) -> int:
    problem = _problem(args)
    if args.matrix:
        model = _matrix(args.matrix)
        bound = best_bound_general(problem, model)
    elif args.rho is not None:
        model = args.rho
        bound = best_bound(problem, model)
    else:
        raise InputError("one of --rho or --matrix is required")
    est = estimate_fwer(problem, model, args.reps, args.seed, _threads(args))
    record = {
        "n": problem.n, "alpha": problem.alpha, "x": problem.x, "rho": args.rho,
        "fwer_hat": est.fwer_hat, "stderr": est.stderr, "reps": est.reps, "seed": est.seed,
        "rejections_at_least_one": est.rejections_at_least_one,
        "bound_value": bound.value, "bound_method": bound.method,
    }
    if args.format == "csv":
        header = list(record)
        row = [fmt(v) if isinstance(v, float) else ("" if v is None else str(v)) for v in record.values()]
        _emit(",".join(header) + "\n" + ",".join(row) + "\n", args.output)
    else:
        _emit(dumps(record), args.output)
    return EXIT_OK


def cmd_sweep(args) -> int:
    problem = _problem(args)
    grid = parse_grid(args.grid) if args.grid else list(DEFAULT_GRID)
    rows = sweep(problem, grid, args.reps, args.seed, _threads(args))
    if args.format == "json":
        text = dumps([{
            "rho": r.rho, "fwer_hat": r.fwer_hat, "stderr": r.stderr, "bound_value": r.bound_value,
            "bound_method": r.bound_method, "alpha_one_minus_rho": r.baseline_alpha_one_minus_rho,
        } for r in rows])
    else:
        text = sweep_to_csv(rows)
    _emit(text, args.output)
    if args.svg:
        rhos = [r.rho for r in rows]
        series = [
            ("Monte Carlo FWER", rhos, [r.fwer_hat for r in rows]),
            ("best bound", rhos, [r.bound_value for r in rows]),
            ("alpha (1 - rho)", rhos, [r.baseline_alpha_one_minus_rho for r in rows]),
        ]
        try:
            svg.write_line_chart(args.svg, series, title=f"FWER for n={problem.n}, alpha={problem.alpha:g}",
                                 x_label="rho", y_label="FWER")
        except OSError as exc:
            raise InputError(f"cannot write {args.svg}: {exc}") from None
    return EXIT_OK


def cmd_certify_tables(args) -> int:
    reports = certify.certify_all()
    if args.format == "json" or args.output:
        _emit(dumps([r.to_dict() for r in reports]), args.output)
    else:
        for r in reports:
            print(f"{'PASS' if r.passed else 'FAIL'} {r.table_id}")
            for iv in r.intervals:
                print(f"    [{iv.x_start:g}, {iv.x_end:g}] constant {iv.constant:.6g} "
                      f"grid min {iv.grid_min:.6g} {'ok' if iv.passed else 'FAIL'}")
    return EXIT_OK


def cmd_verify(args) -> int:
    only = [name for chunk in args.only for name in chunk.split(",") if name] if args.only else None
    try:
        results = verify.run(only)
    except KeyError as exc:
        raise InputError(str(exc.args[0])) from None
    for res in results:
        print(f"[{'PASS' if res.passed else 'FAIL'}] {res.name}")
        for line in res.lines:
            print(f"  {line}")
    summary = {"pass": all(r.passed for r in results), "checks": [r.summary() for r in results]}
    if args.output:
        _emit(dumps(summary), args.output)
    else:
        print(dumps(summary))
    return EXIT_OK if summary["pass"] else EXIT_VERIFY


COMMANDS = {
    "bound": cmd_bound,
    "bound-matrix": cmd_bound_matrix,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "certify-tables": cmd_certify_tables,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = Parser(prog="fwerbound", description="FWER bounds for Bonferroni under correlation")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=Parser)

    def common(p, *, model=True, sim=False, method=False):
        p.add_argument("--n", type=int)
        p.add_argument("--alpha", type=float)
        if model:
            group = p.add_mutually_exclusive_group()
            group.add_argument("--rho", type=float)
            group.add_argument("--matrix", help="CSV file holding the correlation matrix")
        if method:
            p.add_argument("--method", default="auto", help="auto or a bound id such as thm3.1")
        if sim:
            p.add_argument("--reps", type=int, default=DEFAULT_REPS)
            p.add_argument("--seed", type=int, default=DEFAULT_SEED)
            p.add_argument("--threads", type=int, help="worker cap (default: FWER_THREADS or 1)")
        p.add_argument("--output", help="write to this file instead of stdout")
        p.add_argument("--format", choices=("csv", "json"), default="json")

    common(sub.add_parser("bound", help="equicorrelated bound"), method=True)
    common(sub.add_parser("bound-matrix", help="bound for a general correlation matrix"), method=True)
    common(sub.add_parser("simulate", help="Monte Carlo FWER estimate"), sim=True)
    p = sub.add_parser("sweep", help="estimate and bound over a correlation grid")
    common(p, model=False, sim=True)
    p.add_argument("--grid", help="start:end:step, inclusive (default 0:1:0.025)")
    p.add_argument("--svg", help="also write a line chart to this SVG file")
    p.set_defaults(format="csv")
    p = sub.add_parser("certify-tables", help="grid-check the piecewise constant tables")
    p.add_argument("--output")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p = sub.add_parser("verify", help="run the verification suite")
    p.add_argument("--only", action="append", help=f"subset of: {', '.join(verify.CHECKS)}")
    p.add_argument("--output")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", None) is not None and args.threads < 1:
        parser.error("--threads must be at least 1")
    try:
        return COMMANDS[args.command](args)
    except (InputError, DomainError, MatrixError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
