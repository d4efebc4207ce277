# denjoy_invariants/commands/rho.py
from ..circle_core import interval_of, render_decimal
from ..config import DECIMAL_DIGITS
from ..ergodic import LiftIterator, rotation_number, rotation_number_estimate
from . import add_spec_argument, load_action, parse_vector
from .report_components import Report

HELP = "Exact rotation number of g, optionally against an n-iterate estimate"


def add_arguments(parser) -> None:
    add_spec_argument(parser)
    parser.add_argument("--g", required=True, help="Group element, e.g. 2,-1")
    parser.add_argument("--estimate", type=int, default=None, metavar="N",
                        help="Also run N iterates of the realized homeomorphism")
    parser.add_argument("--x0", default="0", help="Start point of the iteration (default: 0)")


def run(args, settings) -> Report:
    action, doc = load_action(args, settings)
    g = parse_vector(args.g, action.d)
    exact = rotation_number(action, g).value
    outputs = {
        "rho": str(exact),
        "decimal": interval_of(exact, settings.working_bits).to_decimal(DECIMAL_DIGITS),
    }
    certificates = {}
    tables = {}
    if args.estimate:
        est = rotation_number_estimate(LiftIterator(action, g, args.x0, settings=settings), args.estimate)
        gap = est.estimate - interval_of(exact, est.estimate.precision_bits)
        outputs["estimate"] = {
            "value": est.estimate.to_decimal(DECIMAL_DIGITS),
            "enclosure": est.enclosure,
            "enclosure_width": str(est.enclosure.width),
            "contains_exact": est.contains_exact,
            "estimate_minus_exact": gap.to_decimal(DECIMAL_DIGITS),
        }
        certificates["estimate"] = {"iterations": est.iterations, "bits": est.estimate.precision_bits}
        tables["estimate_vs_exact"] = [
            {"quantity": "exact", "lo": outputs["decimal"], "hi": outputs["decimal"]},
            {"quantity": "estimate", "lo": render_decimal(est.estimate.lo), "hi": render_decimal(est.estimate.hi)},
            {"quantity": "enclosure", "lo": render_decimal(est.enclosure.lo), "hi": render_decimal(est.enclosure.hi)},
        ]
    return Report("rho", inputs={"spec": doc, "g": list(g), "estimate": args.estimate, "x0": args.x0},
                  outputs=outputs, certificates=certificates, tables=tables)
