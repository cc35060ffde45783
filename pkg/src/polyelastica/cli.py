"""Command line entry point ``elastica``.

Exit codes: 0 success, 1 failed check or violation, 2 bad input.
"""
from __future__ import annotations

import argparse
import ast
import json
import math
import operator
import sys
from dataclasses import asdict

from . import lab, oracles
from .curves import make_curve, read_curve_spec
from .inscription import SCHEMES, inscribe, inscribe_equilateral_greedy, inscription_to_dict
from .polyline import polyline_length, read_polygonal, rotation
from .smoothing import (build_gamma, curvature_profile, generalized_rotation, p_rotation,
                        profile_to_csv, write_gamma)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNOPS = {ast.UAdd: operator.pos, ast.USub: operator.neg}
_NAMES = {"pi": math.pi, "e": math.e, "inf": math.inf}
_FUNCS = {"sqrt": math.sqrt, "tan": math.tan, "sin": math.sin, "cos": math.cos}


def parse_number(text: str) -> float:
    """Evaluate a plain arithmetic expression such as ``2*pi/3``."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return node.value
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNOPS:
            return _UNOPS[type(node.op)](ev(node.operand))
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords):
            return _FUNCS[node.func.id](ev(node.args[0]))
        raise InputError(f"unsupported expression {text!r}")

    try:
        return ev(ast.parse(text.strip(), mode="eval"))
    except (SyntaxError, ZeroDivisionError, OverflowError, ValueError) as exc:
        raise InputError(f"cannot evaluate {text!r}: {exc}") from None


def _number_arg(text: str) -> float:
    try:
        return float(parse_number(text))
    except InputError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _jsonable(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _print_json(obj) -> None:
    print(json.dumps(_jsonable(obj), indent=2))


def cmd_krot(args) -> int:
    P = read_polygonal(args.polygonal)
    if args.alpha:
        k = generalized_rotation(P, args.p, args.alpha, args.scale)
    else:
        k = p_rotation(P, args.p)
    out = {"p": args.p, "alpha": args.alpha, "k_value": k, "rotation": rotation(P),
           "length": polyline_length(P), "n_vertices": P.n_vertices, "closed": P.closed}
    if args.gamma or args.profile:
        gamma = build_gamma(P, include_ends=args.include_ends)
        if args.gamma:
            write_gamma(gamma, args.gamma)
        if args.profile:
            profile_to_csv(curvature_profile(gamma), args.profile)
    _print_json(out)
    return EXIT_OK


def cmd_inscribe(args) -> int:
    curve = make_curve(read_curve_spec(args.curve))
    if args.chord is not None:
        if args.scheme != "equilateral_greedy":
            raise InputError("--chord only applies to the equilateral_greedy scheme")
        ins = inscribe_equilateral_greedy(curve, args.chord)
    else:
        if args.n is None:
            raise InputError("--n is required unless --chord is given")
        ins = inscribe(curve, args.scheme, args.n)
    ins = ins.with_modulus(curve, args.resolution)
    out = inscription_to_dict(ins)
    out["sidecar"].update(modulus=ins.modulus, mesh=ins.mesh,
                          partial_last_edge=ins.partial_last_edge)
    if args.output:
        with open(args.output, "w") as fh:
            json.dump(_jsonable(out), fh, indent=2)
            fh.write("\n")
    else:
        _print_json(out)
    return EXIT_OK


def _load_config(path):
    try:
        return lab.ExperimentConfig.from_json(path)
    except (TypeError, KeyError) as exc:
        raise InputError(f"bad config: {exc}") from None


def _emit(report, args, config) -> None:
    text = lab.emit_report(report, args.format)
    sys.stdout.write(text)
    if config.output:
        fmt = "json" if str(config.output).endswith(".json") else "csv"
        lab.emit_report(report, fmt, config.output)


def cmd_converge(args) -> int:
    config = _load_config(args.config)
    report = lab.run_convergence(config)
    _emit(report, args, config)
    print(f"rate_estimate: {report.rate_estimate}", file=sys.stderr)
    for msg in report.failures:
        print(f"FAIL {msg}", file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_corner(args) -> int:
    config = _load_config(args.config)
    report = lab.run_corner_divergence(config)
    _emit(report, args, config)
    expected = report.metadata["expected_slope"]
    slope = report.rate_estimate
    print(f"rate_estimate: {slope} (expected {expected})", file=sys.stderr)
    if config.p > 1:
        if slope is None or abs(slope - expected) > args.slope_tolerance * abs(expected):
            print("FAIL divergence slope outside tolerance", file=sys.stderr)
            return EXIT_FAIL
    return EXIT_OK


def cmd_oracle(args) -> int:
    if args.name not in oracles.ORACLES:
        raise InputError(f"unknown oracle {args.name!r}; expected one of {sorted(oracles.ORACLES)}")
    fn, names = oracles.ORACLES[args.name]
    given = {}
    for item in args.params or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise InputError(f"parameter {item!r} is not of the form name=value")
        given[key.strip()] = parse_number(value)
    missing = [k for k in names if k not in given]
    extra = [k for k in given if k not in names]
    if missing or extra:
        raise InputError(f"{args.name} takes {list(names)}; missing {missing}, unexpected {extra}")
    if args.name == "ngon_kp":
        n = given["n"]
        if n != int(n):
            raise InputError("n must be an integer")
        given["n"] = int(n)
    result = fn(**given)
    out = {"oracle": args.name, "params": given}
    if isinstance(result, oracles.RhombusSolution):
        out.update(lambda_star=result.lambda_star, energy=result.energy,
                   midpoint_energy=result.midpoint_energy)
    elif isinstance(result, oracles.ClampedMinimum):
        out.update(asdict(result))
    else:
        out["value"] = result
    _print_json(out)
    return EXIT_OK


def cmd_fuzz_langle(args) -> int:
    summary = lab.fuzz_langle(args.seed, args.trials, args.dim)
    _print_json(asdict(summary))
    if summary.violations:
        print(f"FAIL counterexample: {summary.counterexample}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="elastica",
                                     description="p-rotations of polygonals and their limits")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("krot", help="p-rotation of a polygonal JSON file")
    p.add_argument("polygonal")
    p.add_argument("--p", type=_number_arg, required=True)
    p.add_argument("--alpha", type=_number_arg, default=0.0)
    p.add_argument("--scale", type=_number_arg, default=1.0)
    p.add_argument("--gamma", help="write the smoothed curve as JSON")
    p.add_argument("--profile", help="write the curvature profile as CSV")
    p.add_argument("--include-ends", action="store_true",
                   help="keep the terminal half-edges of an open polygonal in --gamma")
    p.set_defaults(func=cmd_krot)

    p = sub.add_parser("inscribe", help="inscribe a polygonal in a curve")
    p.add_argument("curve")
    p.add_argument("--scheme", choices=SCHEMES, required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--chord", type=_number_arg)
    p.add_argument("--resolution", type=int, default=257)
    p.add_argument("--output")
    p.set_defaults(func=cmd_inscribe)

    for name, func, helptext in (("converge", cmd_converge, "convergence study"),
                                 ("corner", cmd_corner, "corner divergence study")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("config")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        if name == "corner":
            p.add_argument("--slope-tolerance", type=float, default=0.15)
        p.set_defaults(func=func)

    p = sub.add_parser("oracle", help="evaluate a closed-form reference value")
    p.add_argument("name")
    p.add_argument("--params", nargs="*", metavar="NAME=VALUE")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("fuzz-langle", help="randomised check of the angle inequality")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--dim", type=int, default=3)
    p.set_defaults(func=cmd_fuzz_langle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.func(args)
    except (InputError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except RuntimeError as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
