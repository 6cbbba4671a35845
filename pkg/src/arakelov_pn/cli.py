"""Command-line front end.

Every subcommand writes one JSON document (``schema: 1``, sorted keys) or a
CSV table.  Coefficients are given as comma-separated exact rationals
(``1/2`` or ``0.4``; decimals are read as ``p/10^k``, never through binary
floating point).

Exit status: 0 success, 1 unparsable arguments, 2 domain error (the request
is mathematically invalid, e.g. no Zariski decomposition), 3 budget error.

CSV columns:
  geography   a0,a1,ample,nef,big,pseudo_effective,label
  zariski     r,g_a,p_a,negative   (negative = g_a - p_a)
  theta       x,phi_tilde  (n = 1)  or  x1,x2 boundary polyline (n = 2)
  count       l,m,mode,lower_log,upper_log,normalized_low,normalized_high
  chi         l,chi_hat,normalized
  other       one row with the JSON record's fields
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction

from . import fujita, norms, sections, theta, volume, zariski
from .characteristic import as_coeffs, to_fraction
from .errors import ArakelovError, BudgetError, DomainError

SCHEMA = 1
EXIT_OK, EXIT_PARSE, EXIT_DOMAIN, EXIT_BUDGET = 0, 1, 2, 3


class ParseError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def rational(text: str) -> Fraction:
    try:
        return to_fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def rational_list(text: str) -> tuple[Fraction, ...]:
    return tuple(rational(t) for t in text.split(","))


def int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a list of integers: {text!r}") from exc


def positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc
    if not v > 0 or math.isinf(v):
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def frac_str(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def _float(v: float):
    # JSON has no infinities
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def _coeffs(args):
    a = as_coeffs(args.a)
    return a, [frac_str(v) for v in a.a]


# handlers return (record, table) where table is (header, rows) or None
def cmd_classify(args):
    a, a_str = _coeffs(args)
    rep = volume.classify(a)
    return {"a": a_str, **rep.to_json()}, None


def _integral(args, fn):
    a, a_str = _coeffs(args)
    res = fn(a, args.tol, seed=args.seed)
    rec = {"a": a_str, "value": res.value, "tol": args.tol, "error": res.error, "method": res.method}
    if args.seed is not None:
        rec["seed"] = args.seed
    return rec, None


def cmd_volume(args):
    return _integral(args, volume.vol_hat_result)


def cmd_degree(args):
    return _integral(args, volume.deg_hat_result)


def cmd_sections(args):
    a, a_str = _coeffs(args)
    sset = sections.small_sections(a, args.l, support=args.support)
    rec = {
        "a": a_str,
        "l": args.l,
        "support": list(sset.support),
        "sections": [list(s) for s in sset],
        "boundary": [list(s) for s in sorted(sset.boundary)],
        "h0_nonzero": sections.h0_nonzero(a, args.l),
        "lattice_points": [list(e) for e in theta.lattice_points(a, args.l)],
    }
    return rec, None


def cmd_count(args):
    a, a_str = _coeffs(args)
    records = []
    for l in args.l:
        c = sections.count_ellipsoid_lattice(norms.gram_matrix(a, l, args.domain), args.mode)
        records.append(c.to_json(a.n))
    header = ["l", "m", "mode", "lower_log", "upper_log", "normalized_low", "normalized_high"]
    rows = [[r[k] for k in header] for r in records]
    return {"a": a_str, "domain": args.domain, "records": records}, (header, rows)


def cmd_chi(args):
    a, a_str = _coeffs(args)
    records = []
    for l in args.l:
        chi = norms.chi_hat(a, l)
        records.append({"l": l, "chi_hat": chi, "normalized": math.factorial(a.n + 1) * chi / l ** (a.n + 1)})
    header = ["l", "chi_hat", "normalized"]
    return {"a": a_str, "records": records}, (header, [[r[k] for k in header] for r in records])


def cmd_zariski(args):
    if args.a is None:
        if args.a0 is None or args.a1 is None:
            raise ParseError("give --a or both --a0 and --a1")
        args.a = (args.a0, args.a1)
    Z = zariski.decompose(args.a)
    rec = Z.to_json()
    rec["mu"] = list(zariski.mu_multiplicities(Z.a))
    rows = [[_float(v) for v in row] for row in zariski.profile(Z, zariski.log_radii(args.samples))]
    return rec, (["r", "g_a", "p_a", "negative"], rows)


def cmd_fujita(args):
    a, _ = _coeffs(args)
    cert = fujita.approximate(a, args.epsilon)
    rec = cert.to_json()
    rec["delta"] = fujita.select_delta(a, cert.points, args.epsilon) if args.delta else None
    return rec, None


def cmd_geography(args):
    grid = volume.geography_grid(args.resolution)
    header = ["a0", "a1", "ample", "nef", "big", "pseudo_effective", "label"]
    rows = [
        [frac_str(a0), frac_str(a1), r.ample, r.nef, r.big, r.pseudo_effective, r.label] for a0, a1, r in grid
    ]
    counts: dict[str, int] = {}
    for *_, r in grid:
        counts[r.label] = counts.get(r.label, 0) + 1
    return {"resolution": args.resolution, "counts": counts, "cells": [dict(zip(header, r)) for r in rows]}, (
        header,
        rows,
    )


def cmd_theta(args):
    a, a_str = _coeffs(args)
    rows = theta.outline(a, args.samples)
    header = ["x", "phi_tilde"] if a.n == 1 else ["x1", "x2"]
    return {"a": a_str, "n": a.n, "columns": header, "rows": [list(r) for r in rows]}, (header, rows)


def cmd_construct(args):
    a = volume.construct_big_without_sections(args.n, args.l)
    return {"n": args.n, "l": args.l, "a": [frac_str(v) for v in a.a], "total": frac_str(a.total)}, None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="arakelov-pn", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--format", choices=["json", "csv"], default=None, help="output format (default per command)")
    p.add_argument("--out", default=None, help="output file (default stdout)")
    # the output options are accepted after the subcommand too
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=["json", "csv"], default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_a(name, help_, required=True):
        sp = sub.add_parser(name, help=help_, parents=[common])
        sp.add_argument("--a", type=rational_list, required=required, help="coefficients a_0,...,a_n")
        return sp

    with_a("classify", "ample / nef / big / pseudo-effective").set_defaults(func=cmd_classify)
    for name, func, help_ in [("volume", cmd_volume, "arithmetic volume"), ("degree", cmd_degree, "self-intersection")]:
        sp = with_a(name, help_)
        sp.add_argument("--tol", type=positive_float, default=1e-9)
        sp.add_argument("--seed", type=int, default=None, help="Monte Carlo seed (n >= 3)")
        sp.set_defaults(func=func)

    sp = with_a("sections", "small sections at level l (n = 1)")
    sp.add_argument("--l", type=int, required=True)
    sp.add_argument("--support", choices=["theta", "full"], default="theta")
    sp.set_defaults(func=cmd_sections)

    sp = with_a("count", "lattice points in the L^2 ellipsoid")
    sp.add_argument("--l", type=int_list, required=True, help="levels, comma separated")
    sp.add_argument("--mode", choices=["exact", "bracket"], default="bracket")
    sp.add_argument("--domain", choices=["theta", "full"], default="theta")
    sp.set_defaults(func=cmd_count)

    sp = with_a("chi", "arithmetic Euler characteristic of l H_0")
    sp.add_argument("--l", type=int_list, required=True, help="levels, comma separated")
    sp.set_defaults(func=cmd_chi)

    sp = with_a("zariski", "Zariski decomposition on P^1", required=False)
    sp.add_argument("--a0", type=rational)
    sp.add_argument("--a1", type=rational)
    sp.add_argument("--samples", type=int, default=1000, help="profile radii")
    sp.set_defaults(func=cmd_zariski)

    sp = with_a("fujita", "concave-envelope volume certificate")
    sp.add_argument("--epsilon", type=positive_float, required=True)
    sp.add_argument("--delta", action="store_true", help="also select the coefficient shift delta")
    sp.set_defaults(func=cmd_fujita)

    sp = sub.add_parser("geography", help="classification grid over (0,2]^2", parents=[common])
    sp.add_argument("--resolution", type=int, default=64)
    sp.set_defaults(func=cmd_geography, default_format="csv")

    sp = with_a("theta", "outline of Theta_a (n <= 2)")
    sp.add_argument("--samples", type=int, default=201)
    sp.set_defaults(func=cmd_theta, default_format="csv")

    sp = sub.add_parser("construct", help="big coefficients without small sections up to level l", parents=[common])
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--l", type=int, required=True)
    sp.set_defaults(func=cmd_construct)
    return p


def _render(record, table, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({"schema": SCHEMA, **record}, sort_keys=True, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if table is None:
        keys = sorted(record)
        table = (keys, [[v if isinstance(v, (str, int, float, bool)) else json.dumps(v) for v in (record[k] for k in keys)]])
    header, rows = table
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        record, table = args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except BudgetError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (DomainError, ValueError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ArakelovError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    fmt = args.format or getattr(args, "default_format", "json")
    text = _render(record, table, fmt)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
