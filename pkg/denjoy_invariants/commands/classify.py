# denjoy_invariants/commands/classify.py
from ..circle_core import interval_of
from ..config import DECIMAL_DIGITS, DEFAULT_CERTIFICATE_RADIUS
from ..denjoy_model import ActionClass, classify, rotation_image_order, wandering_orbit_reps
from . import add_spec_argument, load_action
from .report_components import Report

HELP = "Finite orbit, minimal or Denjoy, with the evidence for the answer"


def add_arguments(parser) -> None:
    add_spec_argument(parser)
    parser.add_argument("--radius", type=int, default=DEFAULT_CERTIFICATE_RADIUS,
                        help="Gap closures with ||g||_1 <= radius checked for disjointness (default: %(default)s)")


def run(args, settings) -> Report:
    action, doc = load_action(args, settings)
    kind = classify(action)
    outputs = {"class": kind, "d": action.d, "k": action.k if kind is ActionClass.DENJOY else None}
    certificates = {}
    gamma_rows = [
        {"i": i + 1, "gamma": str(g), "decimal": interval_of(g, settings.working_bits).to_decimal(DECIMAL_DIGITS)}
        for i, g in enumerate(action.rho.gamma)
    ]

    order = rotation_image_order(action)
    if order is not None:
        # finite image: every orbit has exactly `order` points
        outputs["rho_image"] = {"finite": True, "order": order}
    else:
        outputs["rho_image"] = {"finite": False}
        if action.certificate is not None:
            certificates["independence"] = action.certificate
    if kind is ActionClass.DENJOY:
        report = wandering_orbit_reps(action, args.radius, settings)
        outputs["wandering_orbit_representatives"] = [str(r) for r in report.representatives]
        certificates["disjointness"] = report.certificate
    return Report("classify", inputs={"spec": doc}, outputs=outputs, certificates=certificates,
                  tables={"angles": gamma_rows})
