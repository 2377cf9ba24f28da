"""Command-line interface.

Exit codes: 0 success, 2 usage error, 3 capacity error, 4 internal invariant
violation. Data goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import re
import sys
from typing import Sequence

from . import __version__
from .appendix import DEFAULT_ROWS, TABLE_DIGITS, load_rows, reproduce_row
from .bounds import BoundParams, best_interval, interval_to_dict
from .errors import CapacityError, InvariantError
from .primes import factor
from .rigor import DEFAULT_PRECISION, ZETA_METHODS
from .scan import density_scan, write_csv
from .tower import (
    TowerFactorization,
    is_member,
    member_set,
    render_tower,
    require_prime,
    tower_factorize,
    tower_from_factorization,
)

THREADS_ENV = "TOWERDENSITY_THREADS"

_TERM = re.compile(r"^\s*(\d+)\s*(?:\^\s*(\d+))?\s*$")


def parse_number(text: str) -> int | list[tuple[int, int]]:
    """Parse ``"144"`` to an int, or ``"37349*11^669921875"`` to ``[(base, exp), ...]``.

    Products of powers are kept unevaluated so huge exponents stay cheap.
    """
    terms = text.split("*")
    pairs = []
    for t in terms:
        m = _TERM.match(t)
        if not m:
            raise ValueError(f"cannot parse {text!r}; expected N or B^E*B^E...")
        pairs.append((int(m.group(1)), int(m.group(2) or 1)))
    if len(pairs) == 1 and pairs[0][1] == 1:
        return pairs[0][0]
    return pairs


def tower_of(text: str) -> TowerFactorization:
    n = parse_number(text)
    if isinstance(n, int):
        if n < 1:
            raise ValueError("n must be >= 1")
        return tower_factorize(n)
    prime_pairs = []
    for base, exp in n:
        if base < 1 or exp < 1:
            raise ValueError("bases and exponents must be >= 1")
        if base == 1:
            continue
        prime_pairs.extend((p, e * exp) for p, e in factor(base))
    return tower_from_factorization(prime_pairs)


def _default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="towerdensity",
        description="Tower factorizations, membership in M(q), and certified bounds on d(q).",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--threads", type=_positive, default=_default_threads(),
                        help=f"worker threads (default: ${THREADS_ENV} or 1)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tower", help="tower factorization of n (or a product B^E*...)")
    p.add_argument("n")

    p = sub.add_parser("primes", help="primes q with n in M(q), as a JSON array")
    p.add_argument("n")

    p = sub.add_parser("member", help="print true/false for n in M(q)")
    p.add_argument("n")
    p.add_argument("q", type=int)

    p = sub.add_parser("enum", help="list M(q) (or its complement) on [lo, hi]")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--lo", type=_nonneg, required=True)
    p.add_argument("--hi", type=_nonneg, required=True)
    p.add_argument("--complement", action="store_true")

    p = sub.add_parser("scan", help="empirical density of M(q) on [1, N] as CSV")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--max", dest="n_max", type=_positive, required=True)
    p.add_argument("--checkpoints", default=None,
                   help="pow10 (default), every:K, or a comma list")
    p.add_argument("--out", default=None, help="CSV file (default stdout)")

    p = sub.add_parser("bound", help="certified interval for d(q) as JSON")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--primes", dest="num_primes", type=_nonneg, required=True)
    p.add_argument("--s-cutoff", type=_nonneg, required=True)
    p.add_argument("--a-cutoff", type=_nonneg, required=True)
    p.add_argument("--b-cutoff", type=_nonneg, default=None)
    p.add_argument("--precision", type=int, default=DEFAULT_PRECISION)
    p.add_argument("--zeta-terms", type=int, default=None)
    p.add_argument("--zeta-method", choices=sorted(ZETA_METHODS), default="euler-maclaurin")
    p.add_argument("--digits", type=_positive, default=None,
                   help="significant digits printed (default: min(precision, 60))")

    p = sub.add_parser("table", help="reproduce the published bound table")
    p.add_argument("--rows", default="default", help="CSV of q,p,a,s rows, or 'default'")
    p.add_argument("--precision", type=int, default=DEFAULT_PRECISION)
    p.add_argument("--digits", type=_positive, default=TABLE_DIGITS)
    p.add_argument("--only", default=None, help="comma list of q values to keep")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    return parser


def _emit_json(obj) -> None:
    print(json.dumps(obj, separators=(",", ":")))


def _cmd_tower(args) -> int:
    t = tower_of(args.n)
    print(render_tower(t))
    _emit_json(t.to_json())
    return 0


def _cmd_primes(args) -> int:
    _emit_json(sorted(tower_of(args.n).primes()))
    return 0


def _cmd_member(args) -> int:
    require_prime(args.q)
    n = parse_number(args.n)
    if isinstance(n, int):
        result = is_member(n, args.q)
    else:
        result = args.q in tower_of(args.n).primes()
    print("true" if result else "false")
    return 0


def _cmd_enum(args) -> int:
    _emit_json(member_set(args.q, args.lo, args.hi, args.complement))
    return 0


def _cmd_scan(args) -> int:
    rows = density_scan(args.q, args.n_max, args.checkpoints, threads=args.threads)
    if args.out:
        with open(args.out, "w", newline="") as fp:
            write_csv(rows, fp)
    else:
        write_csv(rows, sys.stdout)
    return 0


def _cmd_bound(args) -> int:
    params = BoundParams(
        q=args.q, num_primes=args.num_primes, s_cutoff=args.s_cutoff,
        a_cutoff=args.a_cutoff, b_cutoff=args.b_cutoff, precision=args.precision,
        zeta_terms=args.zeta_terms, zeta_method=args.zeta_method, threads=args.threads,
    )
    digits = args.digits or min(args.precision, 60)
    interval = best_interval(params)
    _emit_json(interval_to_dict(interval, min(digits, args.precision)))
    return 0


def _cmd_table(args) -> int:
    if args.rows == "default":
        rows = list(DEFAULT_ROWS)
    else:
        with open(args.rows, newline="") as fp:
            rows = load_rows(fp)
    if args.only:
        keep = {int(x) for x in args.only.split(",") if x.strip()}
        rows = [r for r in rows if r.q in keep]
    results = [reproduce_row(r, args.precision, args.threads, DEFAULT_ROWS) for r in rows]
    dicts = [r.to_dict(args.digits) for r in results]
    if args.format == "json":
        _emit_json(dicts)
    elif args.format == "csv":
        w = csv.DictWriter(sys.stdout, fieldnames=list(dicts[0]) if dicts else [],
                           lineterminator="\n")
        w.writeheader()
        w.writerows(dicts)
    else:
        for d in dicts:
            match = "" if d["match_lower"] is None else f" match={d['match_lower']}/{d['match_upper']}"
            print(f"q={d['q']} p={d['p']} a={d['a']} s={d['s']} "
                  f"digits={d['digits_agreed']} status={d['status']}{match}")
            print(f"  lower   {d['lower']}  ({d['winner_lower']})")
            print(f"  lower_S {d['lower_S']}")
            print(f"  upper   {d['upper']}  ({d['winner_upper']})")
            if d["note"]:
                print(f"  note: {d['note']}")
    for d in dicts:
        if d["status"] == "ERRATUM":
            print(f"warning: printed row q={d['q']} flagged: {d['note']}", file=sys.stderr)
    return 0


COMMANDS = {
    "tower": _cmd_tower,
    "primes": _cmd_primes,
    "member": _cmd_member,
    "enum": _cmd_enum,
    "scan": _cmd_scan,
    "bound": _cmd_bound,
    "table": _cmd_table,
}


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except InvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 4
    except (ValueError, ZeroDivisionError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
