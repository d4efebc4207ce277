# denjoy_invariants/commands/measure.py
from ..circle_core import Arc, as_real, exact_equal, interval_of, normalize
from ..config import DECIMAL_DIGITS
from ..denjoy_model import act
from ..ergodic import (
    PiecewisePolynomial,
    SymbolicArc,
    integrate_geometric,
    measure_arc,
    measure_arc_exact,
    rotation_number,
)
from ..errors import DomainError
from . import add_spec_argument, format_point, load_action, parse_point, parse_vector
from .report_components import Report

HELP = "Invariant measure of an arc: (p, g.p], (p, q] or between geometric coordinates"


def add_arguments(parser) -> None:
    add_spec_argument(parser)
    parser.add_argument("--point", help="Start point, gap:ORBIT:g1,...,gd:t or cantor:y")
    parser.add_argument("--g", help="Measure (point, g.point] and compare with rho(g)")
    parser.add_argument("--to", dest="end", help="End point of the arc (instead of --g)")
    parser.add_argument("--geometric", nargs=2, metavar=("X0", "X1"),
                        help="Arc (X0, X1] given in circle coordinates")
    parser.add_argument("--integrate", metavar="X|V,...",
                        help="Integrate the piecewise-linear function through X|V pairs of circle coordinates against mu")


def run(args, settings) -> Report:
    action, doc = load_action(args, settings)
    inputs = {"spec": doc}
    outputs = {}
    if args.integrate:
        f = PiecewisePolynomial.interpolate([tuple(item.split("|")) for item in args.integrate.split(",") if item])
        value = integrate_geometric(action, f, settings=settings)
        inputs["integrate"] = args.integrate
        outputs["integral"] = value
        outputs["decimal"] = value.to_decimal(DECIMAL_DIGITS)
        return Report("measure", inputs=inputs, outputs=outputs)
    if args.geometric:
        x0, x1 = (normalize(as_real(x)) for x in args.geometric)
        value = measure_arc(action, Arc(x0, x1), settings)
        inputs["geometric"] = list(args.geometric)
        outputs["measure"] = value
        outputs["decimal"] = value.to_decimal(DECIMAL_DIGITS)
        return Report("measure", inputs=inputs, outputs=outputs)

    if not args.point or bool(args.g) == bool(args.end):
        raise DomainError("give --point with exactly one of --g or --to, or use --geometric")
    start = parse_point(args.point, action)
    inputs["point"] = args.point
    if args.g:
        g = parse_vector(args.g, action.d)
        end = act(action, g, start)
        inputs["g"] = list(g)
    else:
        end = parse_point(args.end, action)
        inputs["to"] = args.end
    exact = measure_arc_exact(action, SymbolicArc(start, end))
    outputs["arc"] = [format_point(start), format_point(end)]
    outputs["measure"] = str(exact)
    outputs["decimal"] = interval_of(exact, settings.working_bits).to_decimal(DECIMAL_DIGITS)
    if args.g:
        rho = rotation_number(action, g).value
        outputs["rho"] = str(rho)
        outputs["equals_rho"] = exact_equal(exact, rho)
    return Report("measure", inputs=inputs, outputs=outputs)
