"""``spherewidth`` command line.

Exit codes: 0 success, 1 check failed, 2 usage or input error,
3 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import datetime
import json
import sys

import numpy as np

from .. import __version__, metrics
from ..bodies import BallBody, extreme_points, sample_boundary
from ..constructors import build
from ..sphere_core import GeometryError
from . import io, search, suites

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_NONCONVERGED = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"not serializable: {type(obj).__name__}")


def _emit(payload, args):
    if not args.no_meta:
        payload = dict(payload, meta={"version": __version__,
                                      "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
                                      "argv": sys.argv[1:]})
    text = json.dumps(payload, sort_keys=True, indent=1, default=_jsonable) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_value(raw):
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def _params(pairs):
    out = {}
    for p in pairs or []:
        if "=" not in p:
            raise UsageError(f"--param expects key=value, got {p!r}")
        k, v = p.split("=", 1)
        out[k] = _parse_value(v)
    return out


def _body(args):
    if not args.body:
        raise UsageError("--body is required")
    return io.read_body(args.body)


def _direction(raw, dim):
    try:
        v = np.array([float(t) for t in raw.split(",")])
    except ValueError as exc:
        raise UsageError(f"--dir must be comma-separated numbers: {exc}") from exc
    if v.size != dim + 1:
        raise UsageError(f"--dir needs {dim + 1} coordinates")
    n = np.linalg.norm(v)
    if n == 0:
        raise UsageError("--dir must be non-zero")
    return v / n


# ---------------------------------------------------------------- commands

def cmd_gen(args):
    params = _params(args.param)
    if args.samples is not None:
        params["samples"] = args.samples
    if args.kind == "ball":
        if "center" not in params:
            params["center"] = [1.0] + [0.0] * args.dim
    spec = {"kind": args.kind, "dim": args.dim, "params": params, "seed": args.seed}
    try:
        body = build(spec)
    except KeyError as exc:
        raise UsageError(f"missing parameter {exc} for kind {args.kind!r}") from exc
    doc = io.body_to_dict(body)
    text = io.dumps(doc) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_width(args):
    c = _body(args)
    if not args.dir:
        raise UsageError("--dir is required")
    rep = metrics.width_at(c, _direction(args.dir, c.dim), seed=args.seed)
    _emit({"command": "width", "report": rep.to_dict()}, args)
    return EXIT_OK if rep.converged else EXIT_NONCONVERGED


def cmd_thickness(args):
    c = _body(args)
    rep = metrics.thickness(c, seed=args.seed)
    _emit({"command": "thickness", "report": rep.to_dict()}, args)
    return EXIT_OK if rep.converged else EXIT_NONCONVERGED


def cmd_diameter(args):
    c = _body(args)
    delta, p, q = metrics.diameter(c)
    _emit({"command": "diameter", "diameter": delta, "p": p, "q": q}, args)
    return EXIT_OK


def cmd_check(args):
    c = _body(args)
    tol = metrics.CHECK_TOL if args.tol is None else args.tol
    if args.mode == "width":
        rep = metrics.check_constant_width(c, n=args.samples or 1000, tol=tol, seed=args.seed)
    elif args.mode == "diameter":
        rep = metrics.check_constant_diameter(c, n=args.samples or 200, tol=tol, seed=args.seed)
    else:
        tol = 1e-12 if args.tol is None else args.tol
        rep = metrics.check_strict_convexity(c, trials=args.samples or 1000, tol=tol, seed=args.seed)
    _emit({"command": "check", "mode": args.mode, "report": rep.to_dict()}, args)
    return EXIT_OK if rep.passed else EXIT_FAILED


def cmd_verify(args):
    names = sorted(suites.SUITES) if args.suite == "all" else [args.suite]
    reports = []
    for name in names:
        res = suites.run_suite(name, args.trials, args.seed, args.tol)
        reports.append(res.to_dict(meta=not args.no_meta))
    payload = reports[0] if len(reports) == 1 else {"suites": reports}
    _emit(dict(payload, command="verify"), args)
    return EXIT_OK if all(r["passes"] == r["trials"] for r in reports) else EXIT_FAILED


def cmd_search(args):
    if args.w is None:
        raise UsageError("--w is required")
    recs = search.search_gap(args.w, args.trials, args.seed, out=None,
                             tol=metrics.CHECK_TOL if args.tol is None else args.tol)
    _emit({"command": "search", "w": args.w, "trials": args.trials,
           "records": [r.to_dict() for r in recs]}, args)
    return EXIT_OK


def cmd_info(args):
    c = _body(args)
    doc = {"command": "info", "dim": c.dim, "kind": c.kind, "constructor": c.constructor,
           "exact_model": getattr(c, "exact", None) is not None}
    if isinstance(c, BallBody):
        doc.update(center=c.center, radius=c.radius)
    else:
        doc.update(vertices=len(c.vertices), extreme_points=len(extreme_points(c)),
                   hemisphere_center=c.hemisphere_center, depth=c.depth)
    if args.dump_boundary:
        doc["boundary"] = sample_boundary(c, args.dump_boundary, args.seed)
    _emit(doc, args)
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--body", help="body JSON file")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--samples", type=int, default=None)
    common.add_argument("--out", help="write JSON here instead of stdout")
    common.add_argument("--no-meta", action="store_true", help="omit timestamps and timings")

    p = argparse.ArgumentParser(prog="spherewidth", description="Width, thickness and diameter of "
                                "convex bodies on the sphere.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="build a body and write it as JSON")
    g.add_argument("kind", choices=["ball", "orthant", "reuleaux", "example_s3", "random"])
    g.add_argument("--dim", type=int, default=2)
    g.add_argument("--param", action="append", metavar="KEY=VALUE")
    g.set_defaults(func=cmd_gen)

    w = sub.add_parser("width", parents=[common], help="width of the body at a supporting hemisphere")
    w.add_argument("--dir", help="hemisphere center, comma-separated")
    w.set_defaults(func=cmd_width)

    sub.add_parser("thickness", parents=[common], help="minimum width").set_defaults(func=cmd_thickness)
    sub.add_parser("diameter", parents=[common], help="diameter with a farthest pair").set_defaults(
        func=cmd_diameter)

    c = sub.add_parser("check", parents=[common], help="constant width / diameter / strict convexity")
    c.add_argument("--mode", choices=["width", "diameter", "strict"], default="width")
    c.set_defaults(func=cmd_check)

    v = sub.add_parser("verify", parents=[common], help="run a property suite")
    v.add_argument("suite", help=f"one of {', '.join(sorted(suites.SUITES))}, or all")
    v.add_argument("--trials", type=int, default=100)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("search", parents=[common], help="constant-diameter candidates below pi/2")
    s.add_argument("--w", type=float)
    s.add_argument("--trials", type=int, default=100)
    s.set_defaults(func=cmd_search)

    i = sub.add_parser("info", parents=[common], help="summary of a body file")
    i.add_argument("--dump-boundary", type=int, metavar="N", default=0,
                   help="include N raw boundary points")
    i.set_defaults(func=cmd_info)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, io.SchemaError, io.VersionMismatch, suites.UnknownSuite, OSError) as exc:
        print(f"spherewidth: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except metrics.NotConverged as exc:
        print(f"spherewidth: not converged: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    except GeometryError as exc:
        print(f"spherewidth: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
