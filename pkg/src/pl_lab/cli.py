"""``pl-lab`` command-line interface.

Exit codes: 0 holds, 1 usage error, 2 violated, 3 inconclusive.
"""

import argparse
import csv
import json
import sys

import numpy as np

from ._util import UsageError, as_point, check_fields
from .certify import (SamplingPlan, Verdict, clarke_oracle, conditioning_report, estimate_constant,
                      oracle_for, plan_from_dict, sandwich_report, submetric_report)
from .funclib import PowerDistance, clarke_min_norm, function_from_dict, limiting_subdiff, value
from .proxflow import finite_length_certificate, prox_sequence, trace_to_csv, trace_to_dict
from .setlib import Sphere, set_from_dict

EXIT_OK, EXIT_USAGE, EXIT_VIOLATED, EXIT_INCONCLUSIVE = 0, 1, 2, 3
_EXIT = {Verdict.HOLDS: EXIT_OK, Verdict.VIOLATED: EXIT_VIOLATED,
         Verdict.INCONCLUSIVE: EXIT_INCONCLUSIVE}

PROPERTIES = ("pl", "p-loja", "conditioning", "submetric", "sandwich")


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc})") from exc


def _dump(obj):
    return json.dumps(obj, indent=2, allow_nan=False)


def run_certify(config):
    check_fields(config, ["function", "property", "plan"],
                 ["p", "claimed", "mu", "L", "subgradients"])
    g = function_from_dict(config["function"])
    prop = config["property"]
    if prop not in PROPERTIES:
        raise UsageError(f"property must be one of {', '.join(PROPERTIES)}")
    plan = plan_from_dict(config["plan"])
    if plan.dim != g.dim:
        raise UsageError(f"plan dimension {plan.dim} does not match function dimension {g.dim}")
    mode = config.get("subgradients", "limiting")
    if mode == "clarke":
        if not isinstance(g, PowerDistance):
            raise UsageError("clarke subgradients are available for power_distance only")
        oracle = clarke_oracle(g)
    elif mode == "limiting":
        oracle = oracle_for(g)
    else:
        raise UsageError("subgradients must be 'limiting' or 'clarke'")
    claimed = config.get("claimed")
    claimed = None if claimed is None else float(claimed)
    p = 2.0 if prop == "pl" else float(config.get("p", 2.0))

    if prop in ("pl", "p-loja"):
        return estimate_constant(oracle, p, plan, claimed)
    if prop == "sandwich":
        if "mu" not in config or "L" not in config:
            raise UsageError("sandwich needs 'mu' and 'L'")
        return sandwich_report(oracle, float(config["mu"]), float(config["L"]), plan)
    if claimed is None:
        raise UsageError(f"{prop} needs a 'claimed' constant")
    report = conditioning_report if prop == "conditioning" else submetric_report
    return report(oracle, p, claimed, plan)


def cmd_certify(args):
    report = run_certify(_load_json(args.config))
    print(_dump(report.to_dict()))
    return _EXIT[report.verdict]


def cmd_prox(args):
    config = _load_json(args.config)
    check_fields(config, ["function", "x0"], ["max_iter", "tol", "mu"])
    f = function_from_dict(config["function"])
    if not isinstance(f, PowerDistance):
        raise UsageError("prox runs on power_distance functions")
    x0 = as_point(config["x0"], f.dim)
    trace = prox_sequence(f, x0, int(config.get("max_iter", 200)),
                          float(config.get("tol", 1e-12)))
    mu = config.get("mu")
    cert = finite_length_certificate(trace, f, x0, None if mu is None else float(mu))
    if args.trace:
        try:
            with open(args.trace, "w", newline="") as fh:
                fh.write(trace_to_csv(trace))
        except OSError as exc:
            raise UsageError(f"cannot write {args.trace}: {exc.strerror}") from exc
    print(_dump({"certificate": cert.to_dict(), "trace": trace_to_dict(trace)}))
    return _EXIT[cert.verdict]


def figure_grid(f, lo, hi, res):
    """``(x1, x2, f)`` rows with x2 outer and x1 inner, both ascending."""
    axis = np.linspace(lo, hi, res)
    rows = []
    for x2 in axis:
        for x1 in axis:
            rows.append((float(x1), float(x2), value(f, (x1, x2))))
    return rows


def cmd_figure(args):
    s = set_from_dict(_load_json(args.set))
    if s.dim != 2:
        raise UsageError("figure grids need a planar set")
    try:
        lo, hi = (float(v) for v in args.bounds.split(","))
    except ValueError as exc:
        raise UsageError("--bounds must be LO,HI") from exc
    if not lo < hi or args.res < 2:
        raise UsageError("need LO < HI and --res >= 2")
    f = PowerDistance(s, args.p, args.mu)
    rows = figure_grid(f, lo, hi, args.res)
    try:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x1", "x2", "f"])
            w.writerows([[repr(a), repr(b), repr(c)] for a, b, c in rows])
    except OSError as exc:
        raise UsageError(f"cannot write {args.out}: {exc.strerror}") from exc
    return EXIT_OK


def counterexample():
    """Half squared distance to the unit circle at its center, recomputed live."""
    f = PowerDistance(Sphere([0.0, 0.0], 1.0), 2.0, 1.0)
    origin = np.zeros(2)
    plan = SamplingPlan.grid([(-2, 2), (-2, 2)], 41)
    limiting = estimate_constant(oracle_for(f), 2.0, plan, claimed=1.0)
    clarke = estimate_constant(clarke_oracle(f), 2.0, plan, claimed=1.0)
    return {
        "gap_at_origin": value(f, origin),
        "limiting_min_norm": limiting_subdiff(f, origin).min_norm(),
        "clarke_min_norm": clarke_min_norm(f, origin)[0],
        "pl_limiting_holds_with_mu_1": limiting.verdict is Verdict.HOLDS,
        "pl_clarke_holds": clarke.verdict is Verdict.HOLDS,
    }


def cmd_counterexample(args):
    print(_dump(counterexample()))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="pl-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("certify", help="certify an inequality on a sampling plan")
    c.add_argument("--config", required=True)
    c.set_defaults(func=cmd_certify)

    p = sub.add_parser("prox", help="run a proximal-point trace and certify its length")
    p.add_argument("--config", required=True)
    p.add_argument("--trace", help="write the trace as CSV to this path")
    p.set_defaults(func=cmd_prox)

    fg = sub.add_parser("figure", help="export a grid of f = (mu/p) d^p values as CSV")
    fg.add_argument("--set", required=True)
    fg.add_argument("--mu", type=float, default=1.0)
    fg.add_argument("--p", type=float, default=2.0)
    fg.add_argument("--bounds", required=True, help="LO,HI")
    fg.add_argument("--res", type=int, required=True)
    fg.add_argument("--out", required=True)
    fg.set_defaults(func=cmd_figure)

    ce = sub.add_parser("counterexample", help="Clarke-subgradient failure of PL at the circle center")
    ce.set_defaults(func=cmd_counterexample)
    return parser


def _join_bounds(argv):
    # "--bounds -2,2" would be read as an option; glue the value on
    out = list(argv)
    for i, tok in enumerate(out[:-1]):
        if tok == "--bounds":
            out[i:i + 2] = [f"--bounds={out[i + 1]}"]
            break
    return out


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = build_parser().parse_args(_join_bounds(argv))
    except SystemExit as exc:
        # argparse uses status 2, which is reserved for violated verdicts
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, ValueError, TypeError) as exc:
        print(f"pl-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
