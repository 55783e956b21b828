import sys
import logging
import argparse

from pydantic import ValidationError

from atap.atap_core import analyze_point, run_grid
from atap.errors import AtapError, InvalidParam, NoNonabelianRoots
from atap.representations.sl2_reps import KnotParams, riley_poly, riley_roots, s_from_x
from atap.selftest import run_selftest
from atap.settings import (
    app_settings,
    OUTPUT_SCHEMA_VERSION,
    RunConfig,
)
from atap.utils import (
    format_as_csv,
    format_as_json,
    format_as_text,
    format_complex,
    parse_complex,
    parse_multi_columns,
    parse_range,
)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NO_ROOTS = 2
EXIT_VERIFICATION_FAILED = 3

DEFAULT_X_SAMPLES = "2|1.7|0.6,1.1"
VALUE_OPTIONS = ("--m-range", "--n-range", "--x-samples", "--x", "--s")


class UsageError(Exception):
    pass


class CliParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def valid_range(n):
    n = int(n)
    if n < 1 or n > 32:
        raise argparse.ArgumentTypeError("njobs must be an Integer between 1 and 32.")
    return n


def join_option_values(argv):
    """``--m-range -3..3`` as ``--m-range=-3..3``; argparse reads a value such as -3..3 or -0.6,1.1 as an option."""
    joined, args = [], iter(argv)
    for arg in args:
        value = next(args, None) if arg in VALUE_OPTIONS else None
        joined.append(arg if value is None else f"{arg}={value}")
    return joined


def complex_arg(text):
    try:
        return parse_complex(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def create_parser() -> CliParser:
    common = CliParser(add_help=False)
    common.add_argument("--format", choices=["json", "csv", "text"], default=app_settings.output.format, help="Output format. Default=json")
    common.add_argument("--tol", type=float, help="Override the equality, root, representation and cross-check tolerances.")
    common.add_argument("--seed", type=int, default=app_settings.output.seed, help="Seed for randomized samples.")

    point = CliParser(add_help=False)
    point.add_argument("--m", type=int, required=True)
    point.add_argument("--n", type=int, required=True)
    trace = point.add_mutually_exclusive_group()
    trace.add_argument("--x", type=complex_arg, help="Meridian trace x = s + 1/s, as RE or RE,IM.")
    trace.add_argument("--s", type=complex_arg, help="Eigenvalue s of rho(a), as RE or RE,IM.")
    trace.add_argument("--parabolic", action="store_true", help="Shorthand for --x 2.")

    parser = CliParser(prog="atap", description="Adjoint twisted Alexander polynomials of the double twist knots J(2m,2n).")
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("compute", parents=[common, point], help="Delta, torsion and cross-check for every Riley root.")
    commands.add_parser("riley", parents=[common, point], help="Riley polynomial coefficients and roots.")

    grid = commands.add_parser("crosscheck", parents=[common], help="Compare the Fox and closed-form pipelines over a grid.")
    grid.add_argument("--m-range", type=str, default="-3..3", help="Range A..B of m values (0 is skipped).")
    grid.add_argument("--n-range", type=str, default="-3..3", help="Range A..B of n values (0 is skipped).")
    grid.add_argument("--x-samples", type=str, default=DEFAULT_X_SAMPLES, help="x values separated by '|' or ';', each RE or RE,IM.")
    grid.add_argument("--njobs", type=valid_range, default=app_settings.output.njobs, help="Number of jobs to run (between 1 and 32). Default=1")
    grid.add_argument("--perturb-root", type=float, default=0.0, help="Debug: shift every root y by this amount before analysis.")

    commands.add_parser("selftest", parents=[common], help="Run the invariant suites.")
    return parser


def build_tolerances(args):
    return app_settings.tolerances.override(
        equality=args.tol,
        root_residual=args.tol,
        rep_residual=args.tol,
        crosscheck=args.tol,
    )


def build_run_config(args) -> RunConfig:
    x = complex(2) if args.parabolic else args.x
    return RunConfig(
        m=args.m,
        n=args.n,
        x=x,
        s=args.s,
        tolerances=build_tolerances(args),
        format=args.format,
        seed=args.seed,
    )


def config_document(config: RunConfig) -> dict:
    document = config.model_dump(exclude={"tolerances"})
    document["tolerances"] = config.tolerances.model_dump()
    return document


def emit(text: str):
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_compute(config: RunConfig) -> int:
    params = KnotParams(config.m, config.n)
    try:
        s, records = analyze_point(params, x=config.x, s=config.s, tolerances=config.tolerances)
    except NoNonabelianRoots as e:
        logging.error(f"compute: {e}")
        return EXIT_NO_ROOTS

    if config.format == "json":
        emit(format_as_json({"version": OUTPUT_SCHEMA_VERSION, "config": config_document(config), "records": records}))
    elif config.format == "csv":
        emit(format_as_csv(records))
    else:
        emit("\n\n".join(format_as_text(record) for record in records))
    return EXIT_VERIFICATION_FAILED if any(record.failed for record in records) else EXIT_OK


def cmd_riley(config: RunConfig) -> int:
    params = KnotParams(config.m, config.n)
    s = config.s if config.s is not None else s_from_x(config.x)[0]
    phi = riley_poly(params, s)
    try:
        reps = riley_roots(params, s, config.tolerances)
    except NoNonabelianRoots as e:
        logging.error(f"riley: {e}")
        return EXIT_NO_ROOTS

    roots = [
        {"y": rep.y, "residual": rep.riley_residual, "multiplicity": rep.multiplicity, "flags": sorted(rep.flags)}
        for rep in reps
    ]
    if config.format == "json":
        emit(format_as_json({
            "version": OUTPUT_SCHEMA_VERSION,
            "config": config_document(config),
            "riley": {"s": s, "coefficients": list(phi.coeffs), "roots": roots},
        }))
    elif config.format == "csv":
        lines = ["y_re,y_im,residual,multiplicity,flags"]
        for root in roots:
            lines.append(f"{root['y'].real},{root['y'].imag},{root['residual']},{root['multiplicity']},{'|'.join(root['flags'])}")
        emit("\n".join(lines))
    else:
        lines = [f"phi_{params}(s={format_complex(s, 8)}, y) coefficients (ascending in y):"]
        lines.extend(f"  y^{k}: {format_complex(c)}" for k, c in enumerate(phi.coeffs))
        lines.append("roots:")
        lines.extend(f"  y = {format_complex(root['y'])}  residual {root['residual']:.3e}" for root in roots)
        emit("\n".join(lines))
    return EXIT_OK


def cmd_crosscheck(args) -> int:
    m_values, n_values = parse_range(args.m_range), parse_range(args.n_range)
    x_samples = [parse_complex(x) for x in parse_multi_columns(args.x_samples)]
    if not m_values or not n_values or not x_samples:
        raise UsageError("the grid is empty")

    tolerances = build_tolerances(args)
    summary = run_grid(
        m_values, n_values, x_samples,
        tolerances=tolerances,
        njobs=args.njobs,
        perturb=args.perturb_root,
        progress=sys.stderr.isatty(),
    )
    reported = [record for record in summary.records if record.failed or record.flagged]
    counts = {
        "cells": len(summary.cells),
        "passed": summary.passed,
        "failed": summary.failed,
        "flagged": summary.flagged,
        "empty_cells": summary.empty_cells,
        "worst_discrepancy": summary.worst_discrepancy,
        "torsion_sign": summary.torsion_sign,
        "torsion_sign_consistent": summary.torsion_sign_consistent,
    }
    if args.format == "json":
        emit(format_as_json({
            "version": OUTPUT_SCHEMA_VERSION,
            "config": {"m_range": args.m_range, "n_range": args.n_range, "x_samples": x_samples, "tolerances": tolerances.model_dump()},
            "summary": counts,
            "records": reported,
        }))
    elif args.format == "csv":
        emit(format_as_csv(reported))
    else:
        lines = [", ".join(f"{k}={v}" for k, v in counts.items())]
        lines.extend(format_as_text(record) for record in reported)
        emit("\n".join(lines))
    logging.info(f"crosscheck: {summary.passed} passed, {summary.failed} failed, worst discrepancy {summary.worst_discrepancy:.3e}")
    return EXIT_OK if summary.ok else EXIT_VERIFICATION_FAILED


def cmd_selftest(args) -> int:
    results = run_selftest(args.seed, build_tolerances(args))
    if args.format == "json":
        emit(format_as_json({"version": OUTPUT_SCHEMA_VERSION, "seed": args.seed, "suites": results}))
    else:
        lines = []
        for result in results:
            lines.append(f"{result.name}: {result.checks} checks, {result.failures} failures")
            lines.extend(f"  {message}" for message in result.messages[:10])
        emit("\n".join(lines))
    return EXIT_OK if all(result.ok for result in results) else EXIT_VERIFICATION_FAILED


def main(argv=None) -> int:
    if app_settings.base_settings.debug:
        logging.basicConfig(level=logging.DEBUG)

    try:
        argv = sys.argv[1:] if argv is None else argv
        args = create_parser().parse_args(join_option_values(argv))
        if args.command in ("compute", "riley"):
            config = build_run_config(args)
            return cmd_compute(config) if args.command == "compute" else cmd_riley(config)
        if args.command == "crosscheck":
            return cmd_crosscheck(args)
        return cmd_selftest(args)
    except (UsageError, ValidationError, InvalidParam) as e:
        sys.stderr.write(f"atap: {e}\n")
        return EXIT_INVALID
    except AtapError as e:
        logging.exception("computation failed")
        sys.stderr.write(f"atap: {e}\n")
        return EXIT_VERIFICATION_FAILED
    except ValueError as e:
        sys.stderr.write(f"atap: {e}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
