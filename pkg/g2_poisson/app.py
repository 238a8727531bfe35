"""
G2 Poisson - command-line surface

Verification suites for the point solution, the first-order correction and
the identities behind the solver; the jet-order Poisson solve; and small
utilities on form files. Reports go to stdout as text or structured JSON.
"""

import argparse
import logging
import os
import sys
from typing import Optional, Sequence

from dotenv import load_dotenv

from . import __version__
from .pipelines.orchestrator import UTIL_OPERATIONS, orchestrator
from .services.errors import (
    FlowDivergenceError,
    FormDegreeError,
    FormFileError,
    G2PoissonError,
    InsufficientOrderError,
    NonClosedFormError,
    NormalizationError,
    OrderMismatchError,
    PointSolveError,
    PositivityError,
    ScalarDomainError,
    StagnationError,
)
from .services.form_file import write_text_atomic
from .services.reports import Report

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CLAIM_FAILED = 1
EXIT_USAGE = 2
EXIT_STAGNATION = 3

PRECONDITION_ERRORS = (
    PointSolveError,
    NormalizationError,
    NonClosedFormError,
    FormFileError,
    PositivityError,
    FormDegreeError,
    ScalarDomainError,
    ValueError,
)
SOLVER_ERRORS = (StagnationError, InsufficientOrderError, FlowDivergenceError, OrderMismatchError)


def configure_logging() -> None:
    """Configure root logging from LOG_LEVEL and the optional LOG_FILE."""
    log_level = os.getenv("LOG_LEVEL", "INFO").upper()
    handlers: list[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    log_file = os.getenv("LOG_FILE")
    if log_file:
        os.makedirs(os.path.dirname(os.path.abspath(log_file)), exist_ok=True)
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(
        level=getattr(logging, log_level, logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=handlers,
    )


def _sign(text: str) -> int:
    if text in ("+", "+1", "1"):
        return 1
    if text in ("-", "-1"):
        return -1
    raise argparse.ArgumentTypeError(f"sign must be + or -, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="g2-poisson", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--order", type=int, default=None, help="truncation order")
    common.add_argument("--backend", default=None, help="rational | radical:d:r | bigfloat:bits")
    common.add_argument("--format", choices=("text", "structured"), default="text", dest="output_format")
    common.add_argument("--out", default=None, help="output file (verify, util) or directory (solve)")

    commands = parser.add_subparsers(dest="command", required=True)

    verify = commands.add_parser("verify", parents=[common], help="run a verification suite")
    verify.add_argument("suite", choices=orchestrator.suite_names)
    verify.add_argument("--seed", type=int, default=None)
    verify.add_argument("--cases", type=int, default=None, help="randomized cases per identity family")

    solve = commands.add_parser("solve", parents=[common], help="solve Delta_sigma sigma = eta to jet order")
    solve.add_argument("eta", help="form file holding eta")
    solve.add_argument("--sign", type=_sign, default=None)
    solve.add_argument("--normalize-besteffort", action="store_true", dest="normalize")

    util = commands.add_parser("util", parents=[common], help="apply one operation to a form file")
    util.add_argument("operation", choices=UTIL_OPERATIONS)
    util.add_argument("form", help="input form file")
    util.add_argument("--euclid", action="store_true", help="use the Euclidean metric")
    util.add_argument("--s", default=None, help="dilation factor p/q")
    return parser


def _emit_report(report: Report, output_format: str, out: Optional[str]) -> int:
    text = report.to_json() if output_format == "structured" else report.render_text()
    if out:
        write_text_atomic(out, text)
    sys.stdout.write(text)
    return EXIT_OK if report.passed else EXIT_CLAIM_FAILED


def run(args: argparse.Namespace) -> int:
    if args.command == "verify":
        extra = {} if args.cases is None else {"cases": args.cases}
        report = orchestrator.verify(args.suite, args.seed, args.order, args.backend, **extra)
        return _emit_report(report, args.output_format, args.out)
    if args.command == "solve":
        report = orchestrator.solve(args.eta, args.out, args.order, args.sign, args.backend, args.normalize)
        return _emit_report(report, args.output_format, None)
    result = orchestrator.util(args.operation, args.form, args.euclid, args.s, args.backend)
    text = orchestrator.write(result, args.out)
    if not args.out:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, run the command and map package errors to exit codes."""
    load_dotenv()
    configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except SOLVER_ERRORS as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_STAGNATION
    except PRECONDITION_ERRORS as e:
        witness = getattr(e, "witness", None)
        logger.error(f"{type(e).__name__}: {e}" + (f" [{witness}]" if witness else ""))
        return EXIT_USAGE
    except G2PoissonError as e:
        logger.error(f"Unexpected {type(e).__name__}: {e}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
