"""Command-line front end: list, verify, verify-all, expand, coeff.

Exit codes: 0 success, 1 verification mismatch, 2 usage or parse error,
3 evaluation error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .dsl.evaluator import evaluate, evaluate_monomial
from .dsl.formatting import format_series, rational_str, series_to_json
from .errors import DslError, QSeriesError, UsageError
from .factory import INFINITY
from .identities import (
    DEFAULT_CAPS,
    DEFAULT_ORDER,
    IntRange,
    NoParams,
    family,
    lookup,
    registry,
    verify,
    verify_all,
)
from .report import ERROR, MISMATCH, PASS, VerificationReport
from .series import coefficient_at
from .summation import recording

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_EVAL = 3

_INT = re.compile(r"^[+-]?\d+$")


@dataclass
class RunConfig:
    order: Fraction = Fraction(DEFAULT_ORDER)
    caps: dict = field(default_factory=lambda: dict(DEFAULT_CAPS))
    jobs: int = 1
    output: str = "text"
    allow_heuristic: bool = False
    overrides: dict = field(default_factory=dict)
    timing: bool = False

    def __post_init__(self):
        if self.order < 0:
            raise UsageError("order must be >= 0")
        if self.jobs < 1:
            raise UsageError("jobs must be >= 1")


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {text!r}") from None


def _pair(text: str, what: str) -> tuple[str, str]:
    if "=" not in text:
        raise UsageError(f"{what} must look like NAME=VALUE, got {text!r}")
    k, v = text.split("=", 1)
    if not k:
        raise UsageError(f"{what} must look like NAME=VALUE, got {text!r}")
    return k.strip(), v.strip()


def parse_param(ident, name: str, text: str):
    """Turn ``--param name=text`` into an int, a monomial, or inf."""
    if isinstance(ident.space, IntRange) or name == "base":
        if not _INT.match(text):
            raise UsageError(f"{name} must be an integer, got {text!r}")
        return int(text)
    if text == "inf":
        return INFINITY
    try:
        return evaluate_monomial(text)
    except QSeriesError as exc:
        raise UsageError(f"{name} must be a monomial c*q^e or inf, got {text!r} ({exc})") from None


def _report_lines(reports: Sequence[VerificationReport]) -> list[str]:
    return [r.summary_line() for r in reports]


def _exit_for(reports: Sequence[VerificationReport], allow_heuristic: bool) -> int:
    if any(r.status == MISMATCH for r in reports):
        return EXIT_MISMATCH
    if any(r.status == ERROR for r in reports):
        return EXIT_EVAL
    if not allow_heuristic and any(r.heuristic_sums for r in reports):
        return EXIT_EVAL
    return EXIT_OK


def _summary(reports: Sequence[VerificationReport], cfg: RunConfig) -> dict:
    order = cfg.order
    return {
        "total": len(reports),
        "pass": sum(r.status == PASS for r in reports),
        "mismatch": sum(r.status == MISMATCH for r in reports),
        "error": sum(r.status == ERROR for r in reports),
        "heuristic_sums": sum(r.heuristic_sums for r in reports),
        "order": int(order) if order.denominator == 1 else str(order),
        "caps": dict(sorted(cfg.caps.items())),
    }


# -- commands ----------------------------------------------------------------


def cmd_list(args, out, err) -> int:
    rows = [(i.id, i.label, i.space.describe()) for i in registry()]
    w0 = max(len(r[0]) for r in rows)
    w1 = max(len(r[1]) for r in rows)
    for a, b, c in rows:
        print(f"{a:<{w0}}  {b:<{w1}}  {c}", file=out)
    return EXIT_OK


def _caps(items) -> dict:
    caps = dict(DEFAULT_CAPS)
    for item in items or ():
        k, v = _pair(item, "--cap")
        if not _INT.match(v) or int(v) < 0:
            raise UsageError(f"cap {k} must be a nonnegative integer")
        caps[k] = int(v)
    return caps


def cmd_verify(args, out, err) -> int:
    ident = lookup(args.id)
    if ident is None:
        raise UsageError(f"unknown identity {args.id!r}; run 'list' to see the registry")
    cfg = RunConfig(order=_rational(args.order), caps=_caps(args.cap), allow_heuristic=args.allow_heuristic)
    params = {}
    for item in args.param or ():
        k, v = _pair(item, "--param")
        params[k] = parse_param(ident, k, v)
    if params or isinstance(ident.space, NoParams):
        todo = [params]
    else:
        todo = family(ident.id, cfg.caps)
    reports = [verify(ident.id, p, cfg.order) for p in todo]
    if args.json:
        payload = [r.to_json(timing=args.timing) for r in reports]
        print(json.dumps(payload, indent=2), file=out)
    else:
        for line in _report_lines(reports):
            print(line, file=out)
    code = _exit_for(reports, cfg.allow_heuristic)
    if code == EXIT_EVAL and not any(r.status == ERROR for r in reports):
        print("error: a heuristic sum was used; pass --allow-heuristic to accept it", file=err)
    return code


def cmd_verify_all(args, out, err) -> int:
    overrides = {}
    for item in args.order_for or ():
        k, v = _pair(item, "--order-for")
        if lookup(k) is None:
            raise UsageError(f"unknown identity {k!r} in --order-for")
        overrides[k] = _rational(v)
    cfg = RunConfig(
        order=_rational(args.order), caps=_caps(args.cap), jobs=args.jobs,
        allow_heuristic=args.allow_heuristic, overrides=overrides, timing=args.timing,
    )
    reports = verify_all(cfg.order, cfg.caps, cfg.overrides, cfg.jobs)
    for line in _report_lines(reports):
        print(line, file=out)
    summary = _summary(reports, cfg)
    print(
        f"{summary['pass']}/{summary['total']} passed, {summary['mismatch']} mismatched, "
        f"{summary['error']} errors",
        file=out,
    )
    if args.json:
        payload = {"reports": [r.to_json(timing=cfg.timing) for r in reports], "summary": summary}
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(payload, indent=2) + "\n")
    return _exit_for(reports, cfg.allow_heuristic)


def _note_heuristics(records, err) -> None:
    n = sum(1 for r in records if r.termination == "heuristic")
    if n:
        print(f"note: {n} infinite sum(s) stopped by the heuristic window", file=err)


def cmd_expand(args, out, err) -> int:
    order = _rational(args.order)
    if order < 0:
        raise UsageError("order must be >= 0")
    with recording() as records:
        value = evaluate(args.expr, order, args.scale)
    if args.format == "json":
        print(json.dumps(series_to_json(value)), file=out)
    else:
        print(format_series(value), file=out)
    _note_heuristics(records, err)
    return EXIT_OK


def cmd_coeff(args, out, err) -> int:
    at = _rational(args.at)
    with recording() as records:
        value = evaluate(args.expr, max(at, Fraction(0)), args.scale)
    print(rational_str(coefficient_at(value, at)), file=out)
    _note_heuristics(records, err)
    return EXIT_OK


# -- entry point -----------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qbailey", description="Exact q-series engine and identity verifier.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    sub.add_parser("list", help="show the identity registry")

    v = sub.add_parser("verify", help="verify one identity (a whole capped family if no params)")
    v.add_argument("id")
    v.add_argument("--order", default=str(DEFAULT_ORDER))
    v.add_argument("--param", action="append", metavar="NAME=VALUE")
    v.add_argument("--cap", action="append", metavar="NAME=N")
    v.add_argument("--json", action="store_true")
    v.add_argument("--timing", action="store_true", help="report real elapsed_ms in JSON")
    v.add_argument("--allow-heuristic", action="store_true")

    a = sub.add_parser("verify-all", help="verify every registered identity")
    a.add_argument("--order", default=str(DEFAULT_ORDER))
    a.add_argument("--jobs", type=int, default=1)
    a.add_argument("--json", metavar="PATH")
    a.add_argument("--cap", action="append", metavar="NAME=N")
    a.add_argument("--order-for", action="append", metavar="ID=N")
    a.add_argument("--timing", action="store_true", help="report real elapsed_ms in JSON")
    a.add_argument("--allow-heuristic", action="store_true")

    e = sub.add_parser("expand", help="expand a DSL expression")
    e.add_argument("expr")
    e.add_argument("--order", required=True)
    e.add_argument("--scale", type=int, default=1)
    e.add_argument("--format", choices=("text", "json"), default="text")

    c = sub.add_parser("coeff", help="one coefficient of a DSL expression")
    c.add_argument("expr")
    c.add_argument("--at", required=True)
    c.add_argument("--scale", type=int, default=1)
    return p


COMMANDS = {
    "list": cmd_list,
    "verify": cmd_verify,
    "verify-all": cmd_verify_all,
    "expand": cmd_expand,
    "coeff": cmd_coeff,
}


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, out, err)
    except DslError as exc:
        print(f"error: {exc.diagnostic()}", file=err)
        return EXIT_USAGE
    except UsageError as exc:
        print(f"usage error: {exc}", file=err)
        return EXIT_USAGE
    except QSeriesError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=err)
        return EXIT_EVAL
    except OSError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_EVAL


if __name__ == "__main__":
    sys.exit(main())
