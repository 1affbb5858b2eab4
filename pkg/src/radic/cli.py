"""Command-line front end: ``solenoid <command> ...``.

Exit codes: 0 success, 1 a verification found a violation, 2 bad
arguments or malformed input, 3 an output file could not be written.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import characters as ch
from . import equivalence as eq
from . import measure as ms
from .markers import Interval
from .modulus import parse_sequence
from .serialize import balls_from_json, cells_from_json, dumps, encode
from .solenoid import map_A, metric_D, metric_Delta, metric_d, point
from .suites import SUITES, run_suite
from .tower import embed_int, rho
from .ultrametric import maximal_disjoint_cover

CSV_COLUMNS = ("suite", "samples", "violations", "worst_ratio", "constant", "runtime_ms")


class UsageError(Exception):
    pass


def load_json_arg(text: str):
    """Inline JSON, or the path of a JSON file."""
    path = Path(text)
    if not text.lstrip().startswith(("{", "[")) and path.is_file():
        text = path.read_text()
    return json.loads(text)


def load_seq(text: str):
    path = Path(text)
    if path.is_file():
        text = path.read_text()
    return parse_sequence(text)


def show(value) -> str:
    if isinstance(value, Interval):
        return str(value)
    if isinstance(value, Fraction):
        return str(value)
    return json.dumps(encode(value), sort_keys=True)


# ------------------------------------------------------------------ metric

def parse_operand(text: str):
    """``q~N`` (integer ``N`` in ``Y_0``), ``a@N`` (the pair ``(a, q~N)``) or a rational ``t``."""
    text = text.strip()
    if text.startswith("q~"):
        return Fraction(0), int(text[2:]), True
    if "@" in text:
        a, n = text.split("@", 1)
        return Fraction(a), int(n), False
    return Fraction(text), None, False


def cmd_metric(args) -> int:
    seq, L = args.seq, args.depth
    (a, x, _), (b, y, _) = parse_operand(args.u), parse_operand(args.v)
    if (a, x) == (b, y) and args.which != "d":
        # the very same point, not merely congruent at depth L
        value = Fraction(0)
    elif args.which == "rho":
        if x is None or y is None or a or b:
            raise UsageError("rho takes two integer points q~N")
        value = rho(embed_int(seq, x, L), embed_int(seq, y, L))
    elif args.which == "D":
        if x is None or y is None:
            raise UsageError("D takes pairs a@N or q~N")
        value = metric_D((a, embed_int(seq, x, L)), (b, embed_int(seq, y, L)))
    else:
        def pt(t, n):
            return point(seq, L, t) if n is None else map_A(t, embed_int(seq, n, L))
        u, v = pt(a, x), pt(b, y)
        value = metric_Delta(u, v) if args.which == "Delta" else metric_d(u, v)
    if args.json:
        print(dumps({"which": args.which, "value": value}))
    elif args.which == "d":
        print(f"{value.value!r} fp_error={value.fp_error!r} truncation_bound={value.truncation_bound}")
    else:
        print(show(value))
    return 0


# ------------------------------------------------------------ verify/report

def effective_seed(args) -> int:
    env = os.environ.get("SOLENOID_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"SOLENOID_SEED must be an integer, got {env!r}")
    return args.seed


def cmd_verify(args) -> int:
    report = run_suite(args.suite, args.seq, effective_seed(args), args.samples, args.depth, args.timing)
    print(json.dumps(report.to_json(), sort_keys=True, indent=2))
    return 0 if report.passed else 1


def render_reports(reports, fmt: str) -> str:
    if fmt == "json":
        return json.dumps([r.to_json() for r in reports], sort_keys=True, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in reports:
        runtime = "" if r.runtime_ms is None else r.runtime_ms
        writer.writerow([r.suite, r.samples, len(r.violations), repr(r.worst_ratio), r.constant, runtime])
    return buf.getvalue()


def cmd_report(args) -> int:
    names = [s for s in (args.suites or "").split(",") if s]
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        raise UsageError(f"unknown suites: {', '.join(unknown)}")
    seed = effective_seed(args)
    reports = [run_suite(s, args.seq, seed, args.samples, None, args.timing) for s in names]
    text = render_reports(reports, args.format)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        try:
            with open(args.out, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
            return 3
    return 0 if all(r.passed for r in reports) else 1


# --------------------------------------------------------------- the rest

def cmd_equiv(args) -> int:
    r, rp = load_seq(args.r), load_seq(args.r_prime)
    out = {
        "r": str(r), "r_prime": str(rp),
        "profile_r": eq.prime_profile(r).to_json(),
        "profile_r_prime": eq.prime_profile(rp).to_json(),
        "precedes": eq.precedes(r, rp),
        "precedes_reverse": eq.precedes(rp, r),
        "equivalent": eq.equivalent(r, rp),
    }
    print(json.dumps(out, sort_keys=True, indent=2))
    return 0


def cmd_measure(args) -> int:
    seq = args.seq
    if args.what == "cells":
        if not args.cells:
            raise UsageError("measure cells needs --cells")
        cells = cells_from_json(load_json_arg(args.cells), seq)
        value = ms.haar_Y0(cells) if isinstance(cells, ms.CellSet) else ms.haar_Y_cylinder(cells)
        print(str(value))
    elif args.what == "cover":
        k = args.k if args.k is not None else args.n
        est = ms.hausdorff_cover_estimate(seq, args.n, k)
        print(dumps({"cells": est.cells, "diameter": est.diameter, "sum_of_diameters": est.sum_of_diameters}))
    else:
        probe = ms.ahlfors_probe(seq, args.max_level, args.threshold)
        rows = [{"level": r.level, "regularity_ratio": r.regularity_ratio, "doubling_ratio": r.doubling_ratio}
                for r in probe.per_level]
        print(dumps({"per_level": rows, "ratio_min": probe.ratio_min, "ratio_max": probe.ratio_max,
                     "non_doubling": probe.non_doubling}))
    return 0


def cmd_chars(args) -> int:
    seq = args.seq
    chi = ch.canonicalize(seq, args.level, args.n)
    if args.what == "canon":
        print(dumps(chi))
    elif args.what == "mul":
        if args.level2 is None or args.n2 is None:
            raise UsageError("chars mul needs --level2 and --n2")
        print(dumps(ch.char_mul(chi, ch.canonicalize(seq, args.level2, args.n2))))
    else:
        if args.t is None:
            raise UsageError("chars eval needs --t")
        value = ch.char_eval(chi, point(seq, args.depth, Fraction(args.t)))
        print(dumps({"angle": value.angle, "cos": value.cos, "sin": value.sin}))
    return 0


def cmd_balls(args) -> int:
    balls = balls_from_json(load_json_arg(args.balls), args.seq)
    if not balls:
        raise UsageError("need at least one ball")
    print(dumps(maximal_disjoint_cover(balls)))
    return 0


# ------------------------------------------------------------------ parser

def seq_arg(text: str):
    try:
        return load_seq(text)
    except (ValueError, KeyError, TypeError) as exc:
        raise argparse.ArgumentTypeError(str(exc))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="solenoid", description="r-adic integers and solenoids, exactly.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, depth=8):
        p.add_argument("--seq", type=seq_arg, default=parse_sequence("2^inf"),
                       help='modulus sequence: "p^inf", "(2,3)^inf", "4|3^inf", JSON, or a JSON file')
        p.add_argument("--depth", type=int, default=depth)

    p = sub.add_parser("metric", help="distance between two points")
    p.add_argument("--which", choices=("rho", "d", "D", "Delta"), required=True)
    p.add_argument("u")
    p.add_argument("v")
    p.add_argument("--json", action="store_true")
    common(p)
    p.set_defaults(func=cmd_metric)

    p = sub.add_parser("verify", help="run one verification suite")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--seq", type=seq_arg, default=parse_sequence("2^inf"))
    p.add_argument("--depth", type=int, default=None, help="override the suite's working depth")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--timing", action="store_true", help="include runtime_ms (breaks byte-stability)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("report", help="run several suites and write a table")
    p.add_argument("--suites", default=",".join(SUITES), help="comma-separated suite names")
    p.add_argument("--format", choices=("json", "csv"), default="csv")
    p.add_argument("--out", default="-")
    p.add_argument("--seq", type=seq_arg, default=parse_sequence("2^inf"))
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--timing", action="store_true")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("equiv", help="compare two modulus sequences")
    esub = p.add_subparsers(dest="action", required=True)
    pc = esub.add_parser("compare")
    pc.add_argument("r")
    pc.add_argument("r_prime")
    pc.set_defaults(func=cmd_equiv)

    p = sub.add_parser("measure", help="Haar measure, cover estimates, Ahlfors probe")
    p.add_argument("what", choices=("cells", "cover", "ahlfors"))
    p.add_argument("--cells", help="CellSet JSON or file")
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--max-level", type=int, default=8)
    p.add_argument("--threshold", type=int, default=None)
    common(p)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("chars", help="canonicalize, multiply or evaluate characters")
    p.add_argument("what", choices=("canon", "mul", "eval"))
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--level2", type=int)
    p.add_argument("--n2", type=int)
    p.add_argument("--t", help="rational coordinate of the point")
    common(p)
    p.set_defaults(func=cmd_chars)

    p = sub.add_parser("balls", help="ball utilities")
    bsub = p.add_subparsers(dest="action", required=True)
    pb = bsub.add_parser("cover", help="maximal disjoint subcover of a JSON list of balls")
    pb.add_argument("balls")
    pb.add_argument("--seq", type=seq_arg, default=parse_sequence("2^inf"))
    pb.set_defaults(func=cmd_balls)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        return args.func(args)
    except (UsageError, ValueError, KeyError, TypeError, ZeroDivisionError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
