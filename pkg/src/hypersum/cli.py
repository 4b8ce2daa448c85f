"""Command-line front end: ``hypersum <command> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .algebra import RatFunc, format_ratfunc
from .corpus import CorpusFormatError, builtin_corpus_files, default_timeout, run_corpus
from .gosper import NoSolution, extended_gosper, find_mfold, gosper, solve_gosper
from .parser import Expr, ParseError, parse, parse_linear_list, parse_ratfunc, parse_term, to_text
from .simplify import NotRational, simplify_combinatorial
from .terms import HyperSeries, HyperTerm, NonLinearArgument, hyperterm
from .wz import Certificate, check_certificate_numeric, extended_wz_certificate, verify_certificate, wz_prove
from .zeilberger import NoRecurrenceFound, extended_sumrecursion, hyperrecursion, sumrecursion, sumrecursion_order

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


def _term(text: str, k: str) -> HyperTerm:
    value = parse(text)
    if isinstance(value, HyperSeries):
        return hyperterm(value.upper, value.lower, value.argument, k)
    if not isinstance(value, HyperTerm):
        raise UsageError("expected a single hypergeometric term")
    return value


def _emit(args, text: str, data: dict) -> None:
    print(json.dumps(data, sort_keys=True) if args.json else text)


def _antidifference(args, s: HyperTerm, a: HyperTerm, m: int) -> int:
    R = simplify_combinatorial(s / a)
    _emit(args, to_text(s), {"antidifference": to_text(s), "ratio": format_ratfunc(R), "m": m})
    return EXIT_OK


def cmd_gosper(args) -> int:
    value = parse(args.expr)
    if isinstance(value, Expr):
        a, sol = solve_gosper(value, args.k)
        return _antidifference(args, a * sol.antidifference_ratio, a, 1)
    a = _term(args.expr, args.k)
    try:
        return _antidifference(args, gosper(a, args.k), a, 1)
    except NotRational:
        if not args.auto_mfold:
            raise
    m = find_mfold(a, args.k)
    logging.getLogger(__name__).info("term ratio not rational; trying m=%d", m)
    return _antidifference(args, extended_gosper(a, args.k, m), a, m)


def cmd_egosper(args) -> int:
    a = _term(args.expr, args.k)
    return _antidifference(args, extended_gosper(a, args.k, args.m), a, args.m)


def _recurrence(args, rec) -> int:
    _emit(args, str(rec), rec.to_json())
    return EXIT_OK


def cmd_zeil(args) -> int:
    F = _term(args.expr, args.k)
    if args.order is not None:
        return _recurrence(args, sumrecursion_order(F, args.k, args.n, args.order))
    return _recurrence(args, sumrecursion(F, args.k, args.n, args.max_order))


def cmd_ezeil(args) -> int:
    F = _term(args.expr, args.k)
    return _recurrence(args, extended_sumrecursion(F, args.k, args.n, args.m, args.l, args.max_order))


def cmd_hyperrec(args) -> int:
    rec = hyperrecursion(parse_linear_list(args.upper), parse_linear_list(args.lower),
                         parse_ratfunc(args.x), args.n, args.max_order)
    return _recurrence(args, rec)


def _quotient(args) -> HyperTerm:
    F = _term(args.expr, args.k)
    if getattr(args, "rhs", None):
        F = F / parse_term(args.rhs)
    return F


def cmd_wz(args) -> int:
    F = _quotient(args)
    cert = extended_wz_certificate(F, args.k, args.n, args.m, args.l)
    _emit(args, str(cert), cert.to_json())
    return EXIT_OK


def cmd_wzverify(args) -> int:
    F = _quotient(args)
    cert = Certificate(parse_ratfunc(args.R), args.m, args.l)
    symbolic = verify_certificate(F, cert, args.k, args.n)
    numeric = symbolic and check_certificate_numeric(F, cert, args.k, args.n, points=args.points)
    ok = symbolic and numeric
    _emit(args, "verified" if ok else "certificate identity fails",
          {"verified": ok, "symbolic": symbolic, "numeric": numeric, **cert.to_json()})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_wzprove(args) -> int:
    try:
        F = _term(args.expr, args.k)
        rhs = parse_term(args.rhs) if args.rhs else None
    except NonLinearArgument:
        F, rhs = args.expr, args.rhs  # wz_prove reports these as inapplicable
    report = wz_prove(F, args.k, args.n, args.m, args.l, auto=args.m is None, rhs=rhs)
    text = report.verdict
    if report.certificate is not None:
        text += f"\nR = {report.certificate}  (m={report.certificate.m}, l={report.certificate.l})"
    if report.reason:
        text += f"\n{report.reason}"
    _emit(args, text, report.to_json())
    return EXIT_OK if report.verdict in ("proved", "certified") else EXIT_FAIL


def cmd_simplify(args) -> int:
    value = simplify_combinatorial(parse(args.expr))
    kind = "ratfunc" if isinstance(value, RatFunc) else "term" if isinstance(value, HyperTerm) else "expr"
    _emit(args, to_text(value), {"kind": kind, "value": to_text(value)})
    return EXIT_OK


def cmd_corpus(args) -> int:
    paths = builtin_corpus_files() if args.file == "builtin" else [args.file]
    timeout = args.timeout if args.timeout is not None else default_timeout()
    report = run_corpus(paths, args.filter, timeout, isolate=not args.no_isolate)
    if args.json:
        print(json.dumps(report.to_json(), sort_keys=True))
    else:
        print("\n".join(report.lines()))
        counts = ", ".join(f"{k}={v}" for k, v in sorted(report.counts().items()))
        print(f"{len(report.results)} entries: {counts}")
    return EXIT_OK if report.ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hypersum", description="Hypergeometric summation and WZ certificates.")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gosper", help="indefinite summation")
    g.add_argument("expr")
    g.add_argument("k")
    g.add_argument("--auto-mfold", action="store_true", help="fall back to the m-fold algorithm")
    g.set_defaults(run=cmd_gosper)

    g = sub.add_parser("egosper", help="m-fold indefinite summation")
    g.add_argument("expr")
    g.add_argument("k")
    g.add_argument("m", type=int)
    g.set_defaults(run=cmd_egosper)

    g = sub.add_parser("zeil", help="recurrence for a definite sum")
    g.add_argument("expr")
    g.add_argument("k")
    g.add_argument("n")
    g.add_argument("--order", type=int)
    g.add_argument("--max-order", type=int, default=5)
    g.set_defaults(run=cmd_zeil)

    g = sub.add_parser("ezeil", help="recurrence with strides m, l")
    for name in ("expr", "k", "n"):
        g.add_argument(name)
    g.add_argument("m", type=int)
    g.add_argument("l", type=int)
    g.add_argument("--max-order", type=int, default=5)
    g.set_defaults(run=cmd_ezeil)

    g = sub.add_parser("hyperrec", help="recurrence for a generalized hypergeometric series")
    for name in ("upper", "lower", "x", "n"):
        g.add_argument(name)
    g.add_argument("--max-order", type=int, default=5)
    g.set_defaults(run=cmd_hyperrec)

    for name, run in (("wz", cmd_wz), ("wzverify", cmd_wzverify)):
        g = sub.add_parser(name, help="WZ certificate" if name == "wz" else "check a WZ certificate")
        g.add_argument("expr")
        if name == "wzverify":
            g.add_argument("R")
        g.add_argument("k")
        g.add_argument("n")
        g.add_argument("m", type=int, nargs="?", default=1)
        g.add_argument("l", type=int, nargs="?", default=1)
        g.add_argument("--rhs", help="divide the summand by this term first")
        if name == "wzverify":
            g.add_argument("--points", type=int, default=20)
        g.set_defaults(run=run)

    g = sub.add_parser("wzprove", help="prove sum_k EXPR = RHS")
    g.add_argument("expr")
    g.add_argument("k")
    g.add_argument("n")
    g.add_argument("--rhs")
    g.add_argument("--m", type=int)
    g.add_argument("--l", type=int)
    g.set_defaults(run=cmd_wzprove)

    g = sub.add_parser("simplify", help="combinatorial simplification")
    g.add_argument("expr")
    g.set_defaults(run=cmd_simplify)

    g = sub.add_parser("corpus", help="identity corpus")
    csub = g.add_subparsers(dest="action", required=True)
    r = csub.add_parser("run")
    r.add_argument("file", help="corpus file, or 'builtin'")
    r.add_argument("--filter", help="id glob")
    r.add_argument("--timeout", type=float)
    r.add_argument("--no-isolate", action="store_true", help="run in-process without timeouts")
    r.set_defaults(run=cmd_corpus)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.run(args)
    except NoSolution as exc:
        print(f"NoSolution: {exc}")
        return EXIT_FAIL
    except (NotRational, NoRecurrenceFound) as exc:
        print(f"{type(exc).__name__}: {exc}")
        return EXIT_FAIL
    except (ParseError, NonLinearArgument, UsageError, CorpusFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
