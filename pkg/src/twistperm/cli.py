"""Command line front end.

Exit codes: 0 success, 1 a claim was refuted, 2 unparsable input,
3 hypothesis violated (wrong case, unsupported composition, ...).
"""

from __future__ import annotations

import argparse
import sys

from . import brute_oracle, rf_action, twisted_conj
from .errors import (
    NotTruncatable,
    ParseError,
    PreconditionError,
    ResourceError,
    UnsupportedComposition,
    WrongCase,
)
from .structured_perm import (
    cycle_census,
    format_count,
    format_sperm,
    order,
    parse_element,
    product,
    support_descriptor,
)

EXIT_OK, EXIT_REFUTED, EXIT_PARSE, EXIT_HYPOTHESIS = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _read(arg: str) -> str:
    """A literal, or the contents of a file given as @path."""
    if arg.startswith("@"):
        try:
            with open(arg[1:], encoding="utf-8") as fh:
                return fh.read().strip()
        except OSError as exc:
            raise CliError(f"cannot read {arg[1:]}: {exc.strerror}", EXIT_PARSE) from None
    return arg


def _element(arg):
    return parse_element(_read(arg))


def cmd_analyze(args, out):
    g = _element(args.element)
    census = cycle_census(g)
    out.write(f"{census}, order={format_count(order(g))}\n")
    out.write(f"support: {support_descriptor(g)}\n")
    out.write(f"normal form: {format_sperm(g)}\n")
    return EXIT_OK


def cmd_compose(args, out):
    g = product(*(_element(e) for e in args.elements))
    out.write(format_sperm(g) + "\n")
    return EXIT_OK


def cmd_witness(args, out):
    rho = _element(args.rho)
    family = twisted_conj.witness_family(rho, args.count, args.strategy)
    text = twisted_conj.format_certificate(family)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def cmd_verify(args, out):
    family = twisted_conj.parse_certificate(_read("@" + args.certificate))
    report = twisted_conj.verify_family(family)
    if report.ok:
        out.write(f"verified: {len(family)} witnesses, {family.separator} strictly increasing, "
                  f"pairwise separated\n")
        return EXIT_OK
    for p in report.problems:
        out.write(f"refuted: {p}\n")
    return EXIT_REFUTED


def cmd_oracle(args, out):
    rho = None
    if args.rho:
        try:
            rho = brute_oracle.parse_small_perm(args.rho)
        except ValueError as exc:
            raise CliError(f"bad --rho: {exc}", EXIT_PARSE) from None
        if rho.degree != args.m:
            raise CliError(f"--rho has degree {rho.degree}, expected {args.m}", EXIT_PARSE)
    rows = brute_oracle.report_rows(args.m, rho, args.alt, args.cap)
    out.write(brute_oracle.format_report(rows, args.format))
    return EXIT_OK if all(r[-1] for r in rows) else EXIT_REFUTED


def cmd_rfbuild(args, out):
    family = rf_action.parse_quotient_family(_read("@" + args.family))
    action = rf_action.union_quotient_action(family)
    out.write(rf_action.format_union_action(action))
    ok = rf_action.all_orbits_finite(action) and rf_action.blocks_invariant(action)
    return EXIT_OK if ok else EXIT_REFUTED


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="twistperm",
                                description="Cycle censuses and twisted-conjugacy witnesses "
                                            "for permutations of {1..n} x N.")
    sub = p.add_subparsers(dest="verb", required=True)

    a = sub.add_parser("analyze", help="print census, order and support")
    a.add_argument("element", help="sperm/fperm literal or @file")
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("compose", help="product of elements, first applied first")
    c.add_argument("elements", nargs="+")
    c.set_defaults(func=cmd_compose)

    w = sub.add_parser("witness", help="emit a witness certificate for rho")
    w.add_argument("rho")
    w.add_argument("--count", type=int, default=5)
    w.add_argument("--strategy", choices=[s.value for s in twisted_conj.Strategy])
    w.add_argument("-o", "--output")
    w.set_defaults(func=cmd_witness)

    v = sub.add_parser("verify", help="recheck a certificate from scratch")
    v.add_argument("certificate", help="certificate file")
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("oracle", help="twisted classes in S_m or A_m")
    o.add_argument("--m", type=int, required=True)
    o.add_argument("--rho", help="one-line permutation, e.g. 2,1,3")
    o.add_argument("--alt", action="store_true", help="use A_m as the ambient")
    o.add_argument("--format", choices=["plain", "tsv"], default="plain")
    o.add_argument("--cap", type=int, default=brute_oracle.DEFAULT_CAP)
    o.set_defaults(func=cmd_oracle)

    r = sub.add_parser("rfbuild", help="action on a union of finite quotients")
    r.add_argument("family", help="quotient family file")
    r.set_defaults(func=cmd_rfbuild)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except (ParseError, CliError) as exc:
        code = getattr(exc, "code", EXIT_PARSE)
        print(f"error: {exc}", file=sys.stderr)
        return code
    except (WrongCase, UnsupportedComposition, PreconditionError, NotTruncatable,
            ResourceError) as exc:
        print(f"hypothesis violated: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
