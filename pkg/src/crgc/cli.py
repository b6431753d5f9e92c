"""Command-line interface.

Exit codes: 0 success, 1 a check or invariant failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from fractions import Fraction

import yaml

from . import bounds
from .bounds import CodeParams
from .cluster import ScenarioAbort, ScenarioError, compare_mechanisms, load_scenario, run
from .gf import DEFAULT_PRIME

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def fmt(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def _params(args) -> CodeParams:
    try:
        return CodeParams(args.B, args.n, args.k, args.d, args.t)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _emit(text: str, out):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def cmd_tradeoff(args) -> int:
    if args.points < 2:
        raise InputError(f"--points must be >= 2, got {args.points}")
    params = _params(args)
    curve = bounds.tradeoff_curve(params, args.points)
    header = ["gamma", "alpha", "regime"]
    rows = [[fmt(pt.gamma), fmt(pt.alpha), pt.regime] for pt in curve]
    if args.float:
        header += ["gamma_float", "alpha_float"]
        for row, pt in zip(rows, curve):
            row += [f"{float(pt.gamma):.6g}", f"{float(pt.alpha):.6g}"]
    if args.format == "text":
        text = yaml.safe_dump([dict(zip(header, r)) for r in rows], sort_keys=False)
    else:
        text = _csv(header, rows)
    _emit(text, args.out)
    return EXIT_OK


def cmd_capacity(args) -> int:
    params = _params(args)
    if args.alpha <= 0 or args.beta <= 0:
        raise InputError("--alpha and --beta must be positive")
    value, u = bounds.closed_form_argmin(params, args.alpha, args.beta)
    doc = {"capacity": fmt(value), "composition": list(u)}
    code = EXIT_OK
    if args.brute:
        brute, argmin = bounds.capacity_argmin(params, args.alpha, args.beta)
        doc["bruteforce"] = fmt(brute)
        doc["argmin"] = [list(a) for a in argmin]
        doc["agree"] = brute == value
        if brute != value:
            code = EXIT_FAIL
    if args.float:
        doc["capacity_float"] = float(value)
    _emit(yaml.safe_dump(doc, sort_keys=False, default_flow_style=None), args.out)
    return code


def cmd_compare(args) -> int:
    params = _params(args)
    rows = compare_mechanisms(params)
    header = ["mechanism", "gamma", "links"]
    body = [[r.mechanism, fmt(r.gamma), r.links] for r in rows]
    if args.float:
        header.append("gamma_float")
        for b, r in zip(body, rows):
            b.append(f"{float(r.gamma):.6g}")
    if args.format == "text":
        text = yaml.safe_dump([dict(zip(header, b)) for b in body], sort_keys=False)
    else:
        text = _csv(header, body)
    _emit(text, args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except OSError as exc:
        raise InputError(f"cannot read {args.scenario}: {exc}") from exc
    except ScenarioError as exc:
        raise InputError(f"{args.scenario}: {exc}") from exc
    if args.seed is not None:
        scenario.seed = args.seed
    if args.field is not None:
        scenario.field = args.field
    try:
        report = run(scenario)
    except ScenarioAbort as exc:
        _emit(exc.report.to_yaml(), args.out)
        print(f"aborted: {exc}", file=sys.stderr)
        return EXIT_FAIL
    _emit(report.to_yaml(), args.out)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_verify(args) -> int:
    from .golden import all_checks

    lines = []
    failed = 0
    for check in all_checks():
        if check.informational:
            tag = "NOTE" if not check.passed else "PASS"
        else:
            tag = "PASS" if check.passed else "FAIL"
            failed += not check.passed
        lines.append(f"[{tag}] {check.name}: {check.detail}")
    lines.append(f"{failed} failure(s)")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if failed == 0 else EXIT_FAIL


def _add_params(p, need_B=True):
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--B", type=_fraction, default=Fraction(1) if not need_B else None,
                   required=need_B, help="file size in packets (int or a/b)")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", type=int, default=None,
                        help=f"prime field modulus (default {DEFAULT_PRIME})")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--out", default=None, help="write output here instead of stdout")
    common.add_argument("--float", action="store_true", help="add decimal columns")

    parser = argparse.ArgumentParser(prog="crgc", description="Concurrent regenerating codes toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tradeoff", parents=[common], help="emit the storage/bandwidth curve as CSV")
    _add_params(p)
    p.add_argument("--points", type=int, default=11)
    p.add_argument("--format", choices=("csv", "text"), default="csv")
    p.set_defaults(func=cmd_tradeoff)

    p = sub.add_parser("capacity", parents=[common], help="min-cut capacity at (alpha, beta)")
    _add_params(p, need_B=False)
    p.add_argument("--alpha", type=_fraction, required=True)
    p.add_argument("--beta", type=_fraction, required=True)
    p.add_argument("--brute", action="store_true", help="also enumerate every composition")
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("compare", parents=[common], help="bandwidth and links per repair mechanism")
    _add_params(p)
    p.add_argument("--format", choices=("csv", "text"), default="csv")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("simulate", parents=[common], help="run a scenario file")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify-paper", parents=[common], help="re-run the worked examples")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
