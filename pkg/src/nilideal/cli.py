"""Command line front end (``nilideal``)."""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional

from . import commcalc
from .freealg import ZZ, Ring, components
from .generators import builtin_specs
from .lattice import MEMBER, NOT_MEMBER, TORSION
from .reducer import FORMS, Reducer, ReductionError, reduce_t5_element, verify_certificate
from .textfmt import ParseError, format_poly, parse_poly
from .verify import Session, verify_theorem

EXIT_OK, EXIT_NOT_MEMBER, EXIT_USAGE, EXIT_TORSION, EXIT_SKIPPED = 0, 1, 2, 3, 4
CACHE_ENV = "NILIDEAL_CACHE_DIR"


def _ring(name: str) -> Ring:
    try:
        return Ring.from_name(name)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _int_list(text: str) -> List[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def _word(text: str):
    """``x1*x2``, ``x1.x2`` or ``x1x2``-free forms: a product of variables."""
    toks = [t for t in text.replace(".", "*").split("*") if t.strip()]
    if not toks or any(not (t.strip().startswith("x") and t.strip()[1:].isdigit()) for t in toks):
        raise ValueError(f"not a monomial: {text!r}")
    return tuple(int(t.strip()[1:]) for t in toks)


def _emit(text: str, out: Optional[str]):
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_expand(args) -> int:
    try:
        p = parse_poly(args.expr, args.ring)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(format_poly(p))
    return EXIT_OK


def cmd_member(args) -> int:
    specs = builtin_specs()
    if args.spec not in specs:
        print(f"unknown spec {args.spec!r}; expected one of {' '.join(specs)}", file=sys.stderr)
        return EXIT_USAGE
    try:
        p = parse_poly(args.expr, args.ring)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if not p:
        print(MEMBER)
        return EXIT_OK
    sess = Session(cache_dir=args.cache_dir or os.environ.get(CACHE_ENV))
    comps = sorted(components(p).items(), key=lambda kv: (kv[0].total, tuple(kv[0])))
    verdicts = []
    for d, part in comps:
        res = sess.membership(args.spec, part, args.ring)
        verdicts.append(res)
        if len(comps) > 1:
            print(f"{d}: {res}")
    if any(v.verdict == NOT_MEMBER for v in verdicts):
        overall, code = NOT_MEMBER, EXIT_NOT_MEMBER
    elif any(v.verdict == TORSION for v in verdicts):
        k = 1
        for v in verdicts:
            if v.verdict == TORSION:
                k = k * v.k // _gcd(k, v.k)
        overall, code = f"{TORSION} {k}", EXIT_TORSION
    else:
        overall, code = MEMBER, EXIT_OK
    print(overall)
    return code


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def cmd_reduce(args) -> int:
    form = args.form.upper()
    if form not in FORMS:
        print(f"unknown form {args.form!r}; expected one of {' '.join(FORMS)}", file=sys.stderr)
        return EXIT_USAGE
    try:
        words = [_word(a) for a in args.args]
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    if len(words) != FORMS[form][1]:
        print(f"{form} takes {FORMS[form][1]} arguments, got {len(words)}", file=sys.stderr)
        return EXIT_USAGE
    try:
        cert = Reducer().reduce(form, words)
    except (ValueError, ReductionError) as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    if not verify_certificate(cert):
        print("internal error: certificate does not verify", file=sys.stderr)
        return EXIT_NOT_MEMBER
    _emit(cert.to_json(), args.out)
    return EXIT_OK


def cmd_certify(args) -> int:
    if len(args.exprs) != 5:
        print("certify takes exactly 5 expressions", file=sys.stderr)
        return EXIT_USAGE
    try:
        polys = [parse_poly(e, ZZ) for e in args.exprs]
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    cert = reduce_t5_element(polys)
    if not verify_certificate(cert):
        print("internal error: certificate does not verify", file=sys.stderr)
        return EXIT_NOT_MEMBER
    _emit(cert.to_json(), args.out)
    return EXIT_OK


def cmd_identities(args) -> int:
    rep = commcalc.run_derivation_suite(args.ring)
    _emit(json.dumps(rep, indent=1), args.json)
    bad = [r["id"] for r in rep if r["residual_term_count"]]
    if bad:
        print("nonzero residual: " + " ".join(bad), file=sys.stderr)
        return EXIT_NOT_MEMBER
    return EXIT_OK


def cmd_verify_theorem(args) -> int:
    if args.max_degree < 5:
        print("--max-degree must be at least 5", file=sys.stderr)
        return EXIT_USAGE
    rep = verify_theorem(max_degree=args.max_degree, rings=[r for r in args.rings.split(",") if r],
                         primes=args.primes, threads=args.threads, field_degree=args.field_degree,
                         cert_degree=args.cert_degree, reducer_instances=args.reducer_instances,
                         engine=args.engine, cache_dir=args.cache_dir or os.environ.get(CACHE_ENV))
    print(rep.summary())
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(rep.to_json() + "\n")
    return rep.exit_code


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nilideal", description="Exact computations with Lie-nilpotency ideals.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def ring_flag(p, default="Z"):
        p.add_argument("--ring", type=_ring, default=Ring.from_name(default), help="Z, Q or Fp (e.g. F3)")

    p = sub.add_parser("expand", help="print the canonical form of an expression")
    p.add_argument("expr")
    ring_flag(p)
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("member", help="membership of an expression in a built-in ideal")
    p.add_argument("expr")
    p.add_argument("spec")
    ring_flag(p)
    p.add_argument("--cache-dir")
    p.set_defaults(func=cmd_member)

    p = sub.add_parser("reduce", help="certificate for a form instance with monomial arguments")
    p.add_argument("form")
    p.add_argument("args", nargs="*", help="monomials such as x1*x2")
    p.add_argument("--out")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("certify", help="certificate for [a1,...,a5] with polynomial entries")
    p.add_argument("exprs", nargs="*")
    p.add_argument("--out")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("identities", help="check the identity catalog")
    ring_flag(p)
    p.add_argument("--json")
    p.set_defaults(func=cmd_identities)

    p = sub.add_parser("verify-theorem", help="run all verification suites")
    p.add_argument("--max-degree", type=int, default=7)
    p.add_argument("--field-degree", type=int, default=None)
    p.add_argument("--cert-degree", type=int, default=None)
    p.add_argument("--rings", default="Z,Q")
    p.add_argument("--primes", type=_int_list, default=[2, 3, 5, 7, 11, 101])
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--reducer-instances", type=int, default=200)
    p.add_argument("--engine", choices=["auto", "dense", "exact"], default="auto")
    p.add_argument("--cache-dir")
    p.add_argument("--json")
    p.set_defaults(func=cmd_verify_theorem)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
