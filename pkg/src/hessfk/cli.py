"""Command line front end.

Subcommands:
  ball-eigen  unit-ball k-Hessian eigenvalue by radial shooting
  eigen       eigenvalue estimate for a body loaded from JSON
  sweep       run a body-family stability sweep and write the report CSV
  check       verify a stability theorem against a sweep report
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import stability_lab as lab
from .eigensolver2d import (
    epsilon_for,
    laplace_eigen,
    ma_eigen_ellipse,
    ma_rayleigh_upper,
)
from .geometry import body_from_json
from .radial_spectra import shoot_eigen

_FAMILY_BY_FLAG = {
    "ellipse-unit-product": "ellipse_unit_product",
    "ellipse-area": "ellipse_area",
    "smoothed-polygon": "smoothed_polygon",
}

_DEFAULT_RANGES = {
    "ellipse_unit_product": (1.001, 1.3),
    "ellipse_area": (1.01, 1.4),
    "smoothed_polygon": (0.5, 4.0),
}


def _cmd_ball_eigen(args) -> int:
    pair = shoot_eigen(args.dim, args.k, args.tol)
    print(json.dumps({
        "n": pair.n,
        "k": pair.k,
        "lambda1": pair.lambda1,
        "r_star": pair.r_star,
        "error_estimate": pair.error_estimate,
    }))
    return 0


def _load_body_file(path):
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return data, body_from_json(data)


def _cmd_eigen(args) -> int:
    data, body = _load_body_file(args.body)
    if args.method == "fd":
        if args.k != 1:
            raise SystemExit("--method fd solves the k=1 (Laplacian) problem")
        est = laplace_eigen(body, args.h)
    elif args.method == "affine":
        if args.k != 2 or "ellipse" not in data:
            raise SystemExit("--method affine needs k=2 and an ellipse body record")
        est = ma_eigen_ellipse(data["ellipse"]["a"], data["ellipse"]["b"])
    else:
        if args.k != 2:
            raise SystemExit("--method rayleigh bounds the k=2 eigenvalue")
        est = ma_rayleigh_upper(body, args.h)
    print(json.dumps({
        "value": est.value,
        "kind": est.kind,
        "error_estimate": est.error_estimate,
        "epsilon": epsilon_for(body, args.k, est),
    }))
    return 0


def _cmd_sweep(args) -> int:
    kind = _FAMILY_BY_FLAG[args.family]
    lo, hi = _DEFAULT_RANGES[kind]
    if args.param_min is not None:
        lo = args.param_min
    if args.param_max is not None:
        hi = args.param_max
    params = np.geomspace(lo, hi, args.points)
    spec = lab.FamilySpec(kind=kind, params=tuple(params), k=args.k, seed=args.seed)
    records = lab.run_sweep(spec)
    lab.export(records, None, args.out, format="csv")
    print(f"wrote {len(records)} records to {args.out}")
    return 0


def _cmd_check(args) -> int:
    with open(args.infile, "r", encoding="utf-8") as fh:
        records = lab.records_from_csv(fh.read())
    if args.theorem == "main":
        verdicts = lab.check_theorem_main(records, seed=args.seed)
    elif args.theorem == "main2":
        verdicts = lab.check_theorem_main2(records, seed=args.seed)
    else:
        verdicts = [lab.check_remark_deficiency(records, seed=args.seed)]
    payload = {
        "theorem": args.theorem,
        "verdicts": [
            {
                "quantity": v.quantity,
                "exponent_required": v.exponent_required,
                "exponent_fitted": v.exponent_fitted,
                "slope_ci": list(v.slope_ci),
                "constant_estimate": v.constant_estimate,
                "passed": v.passed,
            }
            for v in verdicts
        ],
        "all_passed": all(v.passed for v in verdicts),
    }
    text = json.dumps(payload, sort_keys=True, indent=1)
    if args.json_out:
        with open(args.json_out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text)
    return 0 if payload["all_passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hessfk", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    be = sub.add_parser("ball-eigen", help="unit-ball eigenvalue by shooting")
    be.add_argument("--dim", type=int, required=True)
    be.add_argument("--k", type=int, required=True)
    be.add_argument("--tol", type=float, default=1e-8)
    be.set_defaults(fn=_cmd_ball_eigen)

    eig = sub.add_parser("eigen", help="eigenvalue estimate for a JSON body")
    eig.add_argument("--body", required=True, help="body JSON file")
    eig.add_argument("--k", type=int, choices=(1, 2), required=True)
    eig.add_argument("--h", type=float, default=1 / 128, help="grid spacing")
    eig.add_argument("--method", choices=("fd", "affine", "rayleigh"), required=True)
    eig.set_defaults(fn=_cmd_eigen)

    sw = sub.add_parser("sweep", help="run a family sweep, write report CSV")
    sw.add_argument("--family", choices=tuple(_FAMILY_BY_FLAG), required=True)
    sw.add_argument("--k", type=int, choices=(1, 2), required=True)
    sw.add_argument("--points", type=int, default=10)
    sw.add_argument("--out", required=True)
    sw.add_argument("--param-min", type=float, default=None)
    sw.add_argument("--param-max", type=float, default=None)
    sw.add_argument("--seed", type=int, default=0)
    sw.set_defaults(fn=_cmd_sweep)

    ch = sub.add_parser("check", help="verify a theorem against a report")
    ch.add_argument("--theorem", choices=("main", "main2", "remdef"), required=True)
    ch.add_argument("--in", dest="infile", required=True)
    ch.add_argument("--json", dest="json_out", default=None)
    ch.add_argument("--seed", type=int, default=0)
    ch.set_defaults(fn=_cmd_check)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
