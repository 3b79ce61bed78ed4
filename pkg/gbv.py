"""
gbv - graded BV/AKSZ verification toolkit

Command-line entry point:

    gbv check <file> [--order N] [--seed S] [--json-only]
    gbv parse <file>
    gbv wilson-loop <file> --samples <csv>

Exit codes: 0 all checks pass, 1 a check failed, 2 usage error,
3 parse or validation error. Reports go to standard output as a JSON
array, the human summary and logs to standard error.
"""

import argparse
import logging
import os
import sys
from typing import List, Optional

# Add the current directory to the path for imports
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from core import __version__
from core.errors import GradedAlgebraError, ParseError, UnsupportedIntegralError, ValidationError
from cli.services.check_runner import CheckRunner, UnknownCheckError
from cli.services.report_export_service import ReportExportService
from cli.services.theory_builder import TheoryBuilder
from cli.services.theory_parser import TheoryParser

logger = logging.getLogger("gbv")

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_INVALID = 3


def build_parser() -> argparse.ArgumentParser:
    """Create the argument parser with its sub-commands."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", help="log at DEBUG level")

    parser = argparse.ArgumentParser(prog="gbv", description="Verify graded BV/AKSZ identities.")
    parser.add_argument("--version", action="version", version=f"gbv {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    check = commands.add_parser("check", parents=[common], help="run the checks of a theory file")
    check.add_argument("file", help="theory file")
    check.add_argument("--order", type=int, help="truncation order (overrides the file)")
    check.add_argument("--seed", type=int, help="seed for randomized inputs (overrides the file)")
    check.add_argument("--checks", help="comma-separated checks to run instead of [checks] run")
    check.add_argument("--samples", help="sample CSV for wilson_loop (overrides [loop] samples)")
    check.add_argument("--json-only", action="store_true", help="suppress the human summary")
    check.add_argument("--timing", action="store_true", help="include timing in the JSON reports")

    parse = commands.add_parser("parse", parents=[common], help="validate a theory file")
    parse.add_argument("file", help="theory file")

    loop = commands.add_parser("wilson-loop", parents=[common], help="trace of a sampled Wilson loop")
    loop.add_argument("file", help="theory file with an [operator] section")
    loop.add_argument("--samples", required=True, help="sample CSV with a t column")
    loop.add_argument("--json-only", action="store_true", help="suppress the human summary")
    return parser


def configure_logging(verbose: bool) -> None:
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def command_check(args: argparse.Namespace) -> int:
    spec = TheoryParser.parse_file(args.file)
    builder = TheoryBuilder(spec, args.order, args.seed)
    runner = CheckRunner(builder, args.samples)
    names = [n.strip() for n in args.checks.split(',') if n.strip()] if args.checks else None
    reports = runner.run(names)
    sys.stdout.write(ReportExportService.export_to_json(reports, args.timing))
    if not args.json_only:
        print(ReportExportService.summary(reports), file=sys.stderr)
    return ReportExportService.exit_code(reports)


def command_parse(args: argparse.Namespace) -> int:
    spec = TheoryParser.parse_file(args.file)
    builder = TheoryBuilder(spec)
    if spec.has('target'):
        builder.target
    if spec.has('checks', 'run'):
        CheckRunner(builder).validate(builder.checks)
    print(f"{args.file}: ok ({', '.join(spec.sections)})", file=sys.stderr)
    return EXIT_PASS


def command_wilson_loop(args: argparse.Namespace) -> int:
    spec = TheoryParser.parse_file(args.file)
    reports = CheckRunner(TheoryBuilder(spec), args.samples).run(["wilson_loop"])
    sys.stdout.write(ReportExportService.export_to_json(reports))
    if not args.json_only:
        print(ReportExportService.summary(reports), file=sys.stderr)
    return ReportExportService.exit_code(reports)


COMMANDS = {
    "check": command_check,
    "parse": command_parse,
    "wilson-loop": command_wilson_loop,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    configure_logging(args.verbose)
    try:
        return COMMANDS[args.command](args)
    except UnknownCheckError as exc:
        print(f"gbv: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, ValidationError, GradedAlgebraError, UnsupportedIntegralError) as exc:
        print(f"gbv: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
