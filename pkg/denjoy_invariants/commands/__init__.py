# denjoy_invariants/commands/__init__.py
"""
One module per subcommand. Each exposes HELP, add_arguments(parser) and
run(args, settings) -> Report; app.py wires them into the command line.
"""

from fractions import Fraction
from typing import Tuple

from ..data_loader import build_action, load_action_spec
from ..denjoy_model import Cantor, DenjoyAction, DenjoyPoint, Gap, GapLabel, SideKind, Vector
from ..errors import DomainError


def add_spec_argument(parser, required: bool = True) -> None:
    parser.add_argument("spec", nargs=None if required else "?",
                        help="Action specification file (JSON); bare names are looked up in specs/")


def load_action(args, settings) -> Tuple[DenjoyAction, dict]:
    """`settings` already folds in the document precision block (see app.resolve_settings)."""
    doc = load_action_spec(args.spec)
    return build_action(doc, settings), doc.to_json()


def parse_vector(text: str, d: int) -> Vector:
    try:
        g = tuple(int(x) for x in text.replace(" ", "").split(",") if x != "")
    except ValueError:
        raise DomainError(f"group element {text!r} must be comma-separated integers") from None
    if len(g) != d:
        raise DomainError(f"group element {text!r} needs {d} coordinates")
    return g


def parse_point(text: str, action: DenjoyAction) -> DenjoyPoint:
    """'gap:ORBIT:g1,...,gd:t' or 'cantor:y'."""
    kind, _, rest = text.partition(":")
    if kind == "cantor":
        if not rest:
            raise DomainError("cantor points are written cantor:y")
        return Cantor(rest)
    if kind == "gap":
        fields = rest.split(":")
        if len(fields) != 3:
            raise DomainError("gap points are written gap:ORBIT:g1,...,gd:t")
        try:
            orbit, t = int(fields[0]), Fraction(fields[2])
        except (ValueError, ZeroDivisionError):
            raise DomainError(f"cannot read gap point {text!r}") from None
        label = GapLabel(orbit, parse_vector(fields[1], action.d))
        action.check_label(label)
        return Gap(label, t)
    raise DomainError(f"point {text!r} must start with gap: or cantor:")


def format_point(p: DenjoyPoint) -> str:
    if isinstance(p, Gap):
        return f"gap:{p.label.orbit}:{','.join(map(str, p.label.g))}:{p.t}"
    side = ""
    if p.side.kind is SideKind.LEFT_OF:
        side = f" (left end of {p.side.label})"
    elif p.side.kind is SideKind.RIGHT_OF:
        side = f" (right end of {p.side.label})"
    return f"cantor:{p.y}{side}"
