# denjoy_invariants/commands/prim.py
import math

from ..errors import DomainError
from ..ideals import (
    PrimSpace,
    closure,
    ideal_for_open,
    lattice_summary,
    maximal_ideal,
    open_witness,
    parse_subset,
    prim_space_for,
)
from . import add_spec_argument, load_action
from .report_components import Report

HELP = "Prim(A) = Y0 u {J}: closures, open sets and their ideals"


def add_arguments(parser) -> None:
    add_spec_argument(parser, required=False)
    parser.add_argument("--k", default=None, help="Number of wandering orbits (or 'inf') instead of a spec")
    parser.add_argument("--subset", action="append", default=[],
                        help="Subset such as '1:(0,1/2]+{3/4}; 2:all; J' or '*:all'; repeatable")


def _space(args, settings):
    if args.spec:
        action, doc = load_action(args, settings)
        return prim_space_for(action), {"spec": doc}
    if args.k is None:
        raise DomainError("give a spec file or --k")
    k = math.inf if args.k in ("inf", "infinity") else int(args.k)
    return PrimSpace(k), {"k": args.k}


def run(args, settings) -> Report:
    space, inputs = _space(args, settings)
    inputs["subsets"] = list(args.subset)
    queried = []
    opens = [space.empty, space.y0, space.whole]
    for text in args.subset:
        s = parse_subset(space, text)
        witness = open_witness(space, s)
        entry = {"subset": str(s), "closure": str(closure(space, s)), "open": witness is None}
        if witness is None:
            entry["ideal"] = ideal_for_open(space, s)
            if s not in opens:
                opens.append(s)
        else:
            entry["witness"] = str(witness)
        queried.append(entry)
    summary = lattice_summary(space, opens)
    rows = [
        {"subset": q["subset"], "closure": q["closure"], "open": q["open"],
         "ideal": q["ideal"].kind.value if "ideal" in q else "-"}
        for q in queried
    ]
    return Report(
        "prim",
        inputs=inputs,
        outputs={
            "space": space,
            "queried": queried,
            "maximal_ideal": maximal_ideal(space),
            "lattice": summary,
            "open_sets_checked": [str(u) for u in opens],
        },
        tables={"subsets": rows},
    )
