# app.py
"""
Command-line front end.

  python app.py classify specs/denjoy_d2.json
  python app.py rho specs/denjoy_d2.json --g 1,0 --estimate 10000
  python app.py ktheory --gamma "sqrt(2)-1" "sqrt(3)-1" --format table
  python app.py export -o out/k.json ktheory specs/denjoy_d2.json
"""

import argparse
import logging
import sys
import time

from denjoy_invariants import __version__
from denjoy_invariants.commands import act, classify, export, ktheory_report, measure, prim, rho, trace
from denjoy_invariants.commands.report_components import render
from denjoy_invariants.config import PrecisionSettings
from denjoy_invariants.data_loader import load_action_spec
from denjoy_invariants.errors import EXIT_OK, EXIT_USAGE, DenjoyError

logger = logging.getLogger("denjoy_invariants")

# ---------- Commands ----------
COMMANDS = {
    "classify": classify,
    "rho": rho,
    "act": act,
    "measure": measure,
    "trace": trace,
    "ktheory": ktheory_report,
    "prim": prim,
    "export": export,
}


class UsageParser(argparse.ArgumentParser):
    """Usage errors exit with EXIT_USAGE; argparse's own code 2 means Undecided here."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = UsageParser(prog="denjoy", description="Invariants of free Denjoy Z^d actions on the circle")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--precision-bits", type=int, default=None, help="Working precision in bits (default: 128)")
    parser.add_argument("--max-precision-bits", type=int, default=None,
                        help="Precision ceiling before answering Undecided (default: 1024)")
    parser.add_argument("--enum-budget", type=int, default=None,
                        help="Lattice points one gap table may enumerate (default: 2000000)")
    parser.add_argument("--format", choices=["json", "table"], default="json", help="Output format (default: json)")
    parser.add_argument("--no-timing", action="store_true", help="Leave timing_seconds out of the report")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True
    for name, module in COMMANDS.items():
        module.add_arguments(sub.add_parser(name, help=module.HELP, description=module.HELP))
    return parser


def configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def resolve_settings(args) -> PrecisionSettings:
    """Environment, then the action file's precision block, then command-line flags."""
    settings = PrecisionSettings.from_env()
    if getattr(args, "spec", None):
        settings = load_action_spec(args.spec).settings(settings)
    return settings.with_overrides(args.precision_bits, args.max_precision_bits, args.enum_budget)


def run_command(parser: argparse.ArgumentParser, argv, outer=None):
    args = parser.parse_args(argv)
    if outer is not None:
        for flag in ("precision_bits", "max_precision_bits", "enum_budget"):
            setattr(args, flag, getattr(outer, flag))
    settings = resolve_settings(args)
    args.dispatch = lambda inner: run_command(parser, inner, args)
    logger.info("%s with %s", args.command, settings)
    start = time.perf_counter()
    report = COMMANDS[args.command].run(args, settings)
    report.timing_seconds = time.perf_counter() - start
    return report


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)
    try:
        report = run_command(parser, argv if argv is not None else sys.argv[1:])
    except DenjoyError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(render(report, args.format, timing=not args.no_timing))
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
