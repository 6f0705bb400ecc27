"""Command-line front end: norm, type, translate, check, verify.

Exit codes: 0 success, 1 check/verify failure (or a clash normal form),
2 usage or parse error, 3 fuel exhaustion.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from . import harness
from .rewriting import FuelExhausted, normalize, size
from .syntax import BANG, LAMBDA_ES, CalculusMismatch, ParseError, parse, pretty
from .tight import ClashNormalForm, NotNormalizing, synthesize_tight
from .translate import cbn_term, cbv_term
from .typesys import CALCULUS, check_derivation, dumps, from_json

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_FUEL = 0, 1, 2, 3

NORM_MODES = {"cbn": (LAMBDA_ES, "dn", "n"), "cbv": (LAMBDA_ES, "dv", "v"), "bang": (BANG, "fdet", "f")}


class UsageError(Exception):
    pass


def _read(arg: str) -> str:
    return sys.stdin.read() if arg == "-" else arg


def _term(arg: str, calculus: str):
    return parse(_read(arg).strip(), calculus)


def cmd_norm(a) -> int:
    calculus, strategy, flavor = NORM_MODES[a.calculus]
    t = _term(a.term, calculus)
    res = normalize(t, strategy, a.fuel)
    if a.trace:
        print(res.trace.log())
    if isinstance(res, FuelExhausted):
        print(f"fuel exhausted after {len(res.trace.steps)} steps", file=sys.stderr)
        return EXIT_FUEL
    print(pretty(res.nf))
    print(f"m={res.trace.m} e={res.trace.e} size={size(res.nf, flavor)}")
    return EXIT_OK


def cmd_type(a) -> int:
    t = _term(a.term, CALCULUS[a.system])
    r = synthesize_tight(t, a.system, a.fuel)
    if isinstance(r, NotNormalizing):
        print("fuel exhausted; no tight derivation synthesized", file=sys.stderr)
        return EXIT_FUEL
    if isinstance(r, ClashNormalForm):
        print(f"normal form {pretty(r.nf)} is a clash; not tightly typable", file=sys.stderr)
        return EXIT_FAIL
    d = r.derivation
    print(f"({d.m},{d.e},{d.s})")
    if a.json:
        print(dumps(d, indent=2))
    return EXIT_OK


def cmd_translate(a) -> int:
    t = _term(a.term, LAMBDA_ES)
    print(pretty(cbn_term(t) if a.mode == "cbn" else cbv_term(t)))
    return EXIT_OK


def cmd_check(a) -> int:
    text = sys.stdin.read() if a.file == "-" else open(a.file, encoding="utf-8").read()
    try:
        d = from_json(json.loads(text), a.system)
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read derivation: {exc}") from exc
    res = check_derivation(d, a.system)
    if res:
        print(f"ok ({d.m},{d.e},{d.s})")
        return EXIT_OK
    print(str(res), file=sys.stderr)
    return EXIT_FAIL


def cmd_verify(a) -> int:
    ids = list(harness.THEOREMS) if a.theorem == "all" else [a.theorem]
    reports = []
    for tid in ids:
        th = harness.THEOREMS[tid]
        spec = harness.default_spec(th.calculus, a.max_size)
        reports.append(harness.verify(tid, spec, a.fuel, a.cap))
    if a.json:
        print(harness.report_json(reports))
    else:
        for r in reports:
            print(r.text())
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tightcalc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    n = sub.add_parser("norm", help="normalize with a deterministic strategy")
    n.add_argument("--calculus", choices=sorted(NORM_MODES), required=True)
    n.add_argument("--trace", action="store_true", help="print every step")
    n.add_argument("--fuel", type=int, default=1000)
    n.add_argument("term", help="term text, or - for standard input")
    n.set_defaults(run=cmd_norm)

    t = sub.add_parser("type", help="synthesize a tight derivation")
    t.add_argument("--system", choices=["N", "V", "B"], required=True)
    t.add_argument("--json", action="store_true", help="also print the derivation as JSON")
    t.add_argument("--fuel", type=int, default=1000)
    t.add_argument("term")
    t.set_defaults(run=cmd_type)

    tr = sub.add_parser("translate", help="embed a lambda-es term into the bang calculus")
    tr.add_argument("--mode", choices=["cbn", "cbv"], required=True)
    tr.add_argument("term")
    tr.set_defaults(run=cmd_translate)

    c = sub.add_parser("check", help="validate a derivation JSON file")
    c.add_argument("--system", choices=["N", "V", "B"], required=True)
    c.add_argument("file", help="path, or - for standard input")
    c.set_defaults(run=cmd_check)

    v = sub.add_parser("verify", help="check a theorem over enumerated terms")
    v.add_argument("--theorem", choices=["all", *harness.THEOREMS], required=True)
    v.add_argument("--max-size", type=int, default=None)
    v.add_argument("--fuel", type=int, default=50)
    v.add_argument("--cap", type=int, default=10_000, help="path cap for confluence")
    v.add_argument("--json", action="store_true")
    v.set_defaults(run=cmd_verify)
    return p


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    for attr in ("fuel", "max_size", "cap"):
        val = getattr(a, attr, None)
        if val is not None and val < 1:
            print(f"--{attr.replace('_', '-')} must be positive", file=sys.stderr)
            return EXIT_USAGE
    try:
        return a.run(a)
    except (ParseError, CalculusMismatch, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
