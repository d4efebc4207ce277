# denjoy_invariants/commands/ktheory_report.py
from ..denjoy_model import RotationVector
from ..errors import DomainError
from ..ktheory import (
    LABEL_CONVENTION_NOTE,
    TorusTheta,
    build_k_report,
    certify_injective_box,
    k_groups,
    label_trace_vector,
)
from . import add_spec_argument, load_action
from .report_components import Report

HELP = "Ordered K-theory: ranks, labels, PV index maps, trace values and range subgroup"


def add_arguments(parser) -> None:
    add_spec_argument(parser, required=False)
    parser.add_argument("--d", type=int, default=None, help="Formal report for Z^d without angles")
    parser.add_argument("--gamma", nargs="+", default=None, help="Angles gamma_1 ... gamma_d")
    parser.add_argument("--sample", action="append", default=None, metavar="N0,...,Nd",
                        help="Formal vector n0 + sum n_i gamma_i to sign-check; repeatable")
    parser.add_argument("--box-bound", type=int, default=None,
                        help="Certify tau_* injective on |n_i| <= bound")


def _formal_report(d: int) -> Report:
    k0, k1, steps = k_groups(d)
    rows = [{"label": "{" + ",".join(map(str, lb)) + "}", "formal": list(label_trace_vector(d, lb))}
            for lb in k0.labels]
    return Report(
        "ktheory",
        inputs={"d": d},
        outputs={
            "d": d,
            "ranks": [k0.rank, k1.rank],
            "K0_labels": [list(lb) for lb in k0.labels],
            "K1_labels": [list(lb) for lb in k1.labels],
            "split_exact": [s.is_split_exact() for s in steps],
            "label_convention": LABEL_CONVENTION_NOTE,
        },
        tables={"K0": rows},
    )


def run(args, settings) -> Report:
    if args.spec:
        action, doc = load_action(args, settings)
        rho, inputs = action.rho, {"spec": doc}
    elif args.gamma:
        rho, inputs = RotationVector(tuple(args.gamma)), {"gamma": list(args.gamma)}
        if args.d is not None and args.d != rho.d:
            raise DomainError(f"--d {args.d} disagrees with {rho.d} angles")
    elif args.d is not None:
        return _formal_report(args.d)
    else:
        raise DomainError("give a spec file, --gamma or --d")

    theta = TorusTheta(rho)
    samples = None
    if args.sample:
        samples = [tuple(int(x) for x in s.split(",")) for s in args.sample]
    report = build_k_report(theta, samples, settings)
    certificates = {}
    if args.box_bound is not None:
        box = certify_injective_box(theta, args.box_bound, settings)
        certificates["injective_box"] = {
            "bound": box.bound,
            "vectors": box.vectors,
            "bits": box.bits,
            "margin": box.margin,
            "rechecked": box.rechecked,
            "injective": box.injective,
        }
    data = report.to_json()
    tables = {
        "K0": [{"label": "{" + ",".join(map(str, t["label"])) + "}", "formal": t["formal"], "tau": t["decimal"]}
               for t in data["trace_values"]],
        "K1": [{"label": "{" + ",".join(map(str, lb)) + "}"} for lb in data["K1_labels"]],
    }
    inputs.update({"samples": [list(s) for s in samples] if samples else None, "box_bound": args.box_bound})
    return Report("ktheory", inputs=inputs, outputs=data, certificates=certificates, tables=tables)
