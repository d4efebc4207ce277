# denjoy_invariants/commands/act.py
from ..config import DECIMAL_DIGITS
from ..denjoy_model import ActionClass, act, canonical, classify, realize, semiconjugacy
from ..errors import DomainError
from . import add_spec_argument, format_point, load_action, parse_point, parse_vector
from .report_components import Report

HELP = "Apply g to a symbolic point and report its phi and psi coordinates"


def add_arguments(parser) -> None:
    add_spec_argument(parser)
    parser.add_argument("--g", required=True, help="Group element, e.g. 1,0")
    parser.add_argument("--point", required=True, help="gap:ORBIT:g1,...,gd:t or cantor:y")


def _row(action, p, settings) -> dict:
    psi = realize(action, p, settings=settings)
    return {
        "point": format_point(p),
        "phi": str(semiconjugacy(action, p)),
        "psi": psi.to_decimal(DECIMAL_DIGITS),
        "psi_width": str(psi.width),
    }


def run(args, settings) -> Report:
    action, doc = load_action(args, settings)
    if classify(action) is not ActionClass.DENJOY:
        raise DomainError("act works on the symbolic points of a Denjoy action")
    g = parse_vector(args.g, action.d)
    p = canonical(action, parse_point(args.point, action))
    image = act(action, g, p)
    before, after = _row(action, p, settings), _row(action, image, settings)
    return Report(
        "act",
        inputs={"spec": doc, "g": list(g), "point": args.point},
        outputs={"point": before, "image": after},
        tables={"coordinates": [dict(role="point", **before), dict(role="image", **after)]},
    )
