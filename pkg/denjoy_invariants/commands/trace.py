# denjoy_invariants/commands/trace.py
from typing import List

import sympy

from ..circle_core import as_scalar, interval_of
from ..config import DECIMAL_DIGITS
from ..denjoy_model import ActionClass, GapLabel, classify
from ..ergodic import (
    CoefficientFunction,
    CrossedElement,
    PiecewisePolynomial,
    in_trace_ideal,
    trace,
)
from ..errors import DomainError
from . import add_spec_argument, load_action, parse_vector
from .report_components import Report

HELP = "Trace of a finitely supported element and its trace-ideal membership"

TERM_SYNTAX = (
    "G@COEFF with COEFF one of const:C (C may be complex, e.g. 1+2*I), pl:X|V,X|V,... (piecewise linear in phi) "
    "or bump:ORBIT:h1,...,hd:c0,c1,... (polynomial in the gap parameter)"
)


def add_arguments(parser) -> None:
    add_spec_argument(parser)
    parser.add_argument("--term", action="append", default=[], metavar="G@COEFF",
                        help=f"One term f lambda_g; repeat for sums. {TERM_SYNTAX}. Default: the unit")


def parse_coefficient(text: str, action) -> CoefficientFunction:
    kind, _, rest = text.partition(":")
    try:
        if kind == "const":
            return CoefficientFunction.constant(as_scalar(rest))
        if kind == "pl":
            points = [tuple(item.split("|")) for item in rest.split(",") if item]
            if any(len(p) != 2 for p in points):
                raise DomainError("pl points are written X|V")
            return CoefficientFunction(PiecewisePolynomial.interpolate(points))
        if kind == "bump":
            orbit, h, coeffs = rest.split(":")
            label = GapLabel(int(orbit), parse_vector(h, action.d))
            action.check_label(label)
            return CoefficientFunction.bump(label, [as_scalar(c) for c in coeffs.split(",")])
    except ValueError as e:
        raise DomainError(f"cannot read coefficient {text!r}: {e}") from None
    raise DomainError(f"unknown coefficient {text!r}; {TERM_SYNTAX}")


def parse_element(terms: List[str], action) -> CrossedElement:
    if not terms:
        return CrossedElement.unit(action)
    parsed = []
    for term in terms:
        g, sep, coeff = term.partition("@")
        if not sep:
            raise DomainError(f"term {term!r} must be written {TERM_SYNTAX}")
        parsed.append((parse_vector(g, action.d), parse_coefficient(coeff, action)))
    return CrossedElement(action, tuple(parsed))


def run(args, settings) -> Report:
    action, doc = load_action(args, settings)
    a = parse_element(args.term, action)
    tau = trace(action, a)
    tau_re, tau_im = sympy.expand(tau).as_real_imag()
    tau_aa = trace(action, a.star() * a)
    membership = None
    if classify(action) is ActionClass.DENJOY:
        membership = in_trace_ideal(action, a, settings)
    rows = [
        {"g": ",".join(map(str, g)), "gap_supported": f.supported_in_gaps(), "bumps": len(f.gaps)}
        for g, f in a.terms
    ]
    return Report(
        "trace",
        inputs={"spec": doc, "terms": args.term or ["unit"]},
        outputs={
            "trace": str(tau),
            "trace_decimal": interval_of(tau_re, settings.working_bits).to_decimal(DECIMAL_DIGITS),
            "trace_imag_decimal": interval_of(tau_im, settings.working_bits).to_decimal(DECIMAL_DIGITS),
            "trace_a_star_a": str(tau_aa),
            "in_trace_ideal": membership,
            "trace_ideal": "J = C0(T \\ Y) x| Z^d, the unique maximal ideal",
        },
        tables={"terms": rows},
    )
