# denjoy_invariants/commands/export.py
import argparse
from pathlib import Path

from ..errors import DomainError
from .report_components import Report, write_csv_tables

HELP = "Run another subcommand and write its canonical JSON report"


def add_arguments(parser) -> None:
    parser.add_argument("--output", "-o", required=True, help="Path of the JSON report")
    parser.add_argument("--csv-dir", default=None, help="Also write each report table as CSV here")
    parser.add_argument("argv", nargs=argparse.REMAINDER, help="The subcommand and its arguments")


def run(args, settings) -> Report:
    argv = [a for a in args.argv if a != "--"]
    if not argv:
        raise DomainError("export needs a subcommand to run, e.g. export -o out.json ktheory --d 2")
    if argv[0] == "export":
        raise DomainError("export cannot export itself")
    inner = args.dispatch(argv)
    path = Path(args.output)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(inner.dumps(), encoding="utf-8")
    written = [str(path)]
    if args.csv_dir:
        written += write_csv_tables(inner, args.csv_dir)
    return Report("export", inputs={"argv": argv, "output": str(path)},
                  outputs={"command": inner.command, "written": written})
