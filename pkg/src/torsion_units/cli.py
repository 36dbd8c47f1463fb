"""Command-line driver: ``torsion-units solve|verify|validate``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import __version__
from .cyclo import divisors
from .grouptable import (
    TableError,
    bundled,
    load_brauer,
    load_table,
    validate_brauer,
    validate_galois,
    validate_orthogonality,
)
from .report import build_report, diff_golden, dumps, golden_from_report, render_text
from .solver import DEFAULT_CAP, solve_all

EXIT_OK, EXIT_FLAGGED, EXIT_INPUT, EXIT_GOLDEN = 0, 1, 2, 3

DEFAULT_TABLE = "m11.json"
DEFAULT_BRAUER = ["m11mod2.json", "m11mod3.json", "m11mod5.json", "m11mod11.json"]
DEFAULT_GOLDEN = "m11_golden.json"

log = logging.getLogger("torsion_units")


class InputError(Exception):
    pass


def _load(args):
    """Ordinary table plus Brauer tables; bundled M11 fixtures when no paths are given."""
    try:
        if args.table is None:
            table = load_table(bundled(DEFAULT_TABLE))
            paths = args.brauer if args.brauer is not None else [bundled(b) for b in DEFAULT_BRAUER]
        else:
            table = load_table(Path(args.table))
            paths = args.brauer or []
        brauer = [load_brauer(Path(p), table) for p in paths]
    except FileNotFoundError as exc:
        raise InputError(f"cannot read {exc.filename}") from None
    except TableError as exc:
        raise InputError(str(exc)) from None
    return table, brauer


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--table", help="ordinary character table JSON (default: bundled M11)")
    p.add_argument(
        "--brauer", action="append", metavar="PATH",
        help="Brauer table JSON; repeat for several primes (default with bundled M11: all four)",
    )
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("-v", "--verbose", action="store_true")


def _solver_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-coeff", type=int, default=DEFAULT_CAP, help="cap on |nu| when bounds stall (default 128)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for branch enumeration")
    p.add_argument("--figures", metavar="DIR", help="also write matplotlib figures into DIR")
    p.add_argument("--brief", action="store_true", help="omit per-case provenance from the report")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="torsion-units",
        description="Partial augmentation constraints for torsion units of integral group rings.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="admissible partial augmentations for units of one order")
    _common(s)
    _solver_opts(s)
    s.add_argument("--order", type=int, required=True)

    v = sub.add_parser("verify", help="all orders, prime graphs and the Kimmerle check")
    _common(v)
    _solver_opts(v)
    v.add_argument("--all", action="store_true", help="solve every divisor of the exponent (the default)")
    v.add_argument("--order", type=int, action="append", help="restrict to these orders (repeatable)")
    v.add_argument(
        "--expect", metavar="GOLDEN", nargs="?", const="bundled",
        help="compare with a golden file; bare --expect uses the shipped M11 golden file",
    )
    v.add_argument("--write-golden", metavar="PATH", help="write the pinned part of this run as a golden file")

    c = sub.add_parser("validate", help="check table consistency (orthogonality, Galois action, Brauer data)")
    _common(c)
    return parser


def _emit(report: dict, fmt: str, out) -> None:
    out.write(dumps(report) if fmt == "json" else render_text(report))


def cmd_solve(args, out) -> int:
    table, brauer = _load(args)
    tables = [table, *brauer]
    k = args.order
    if k < 1:
        raise InputError("--order must be a positive integer")
    t0 = time.perf_counter()
    cat = solve_all(tables, cap=args.max_coeff, jobs=args.jobs, orders=[k] if table.exponent % k == 0 else [])
    report = build_report(tables, cat, [k], args.max_coeff, full=False, detail=not args.brief)
    log.info("solved in %.2fs", time.perf_counter() - t0)
    _emit(report, args.format, out)
    _figures(args, report)
    return EXIT_FLAGGED if any(o.get("flagged") for o in report["orders"]) else EXIT_OK


def cmd_verify(args, out) -> int:
    table, brauer = _load(args)
    tables = [table, *brauer]
    t0 = time.perf_counter()
    if args.order:
        bad = [k for k in args.order if k < 1]
        if bad:
            raise InputError(f"orders must be positive: {bad}")
        cat = solve_all(tables, cap=args.max_coeff, jobs=args.jobs,
                        orders=[k for k in args.order if table.exponent % k == 0])
        orders = sorted(set(args.order))
        full = False
    else:
        cat = solve_all(tables, cap=args.max_coeff, jobs=args.jobs)
        orders = divisors(table.exponent)
        full = True
    report = build_report(tables, cat, orders, args.max_coeff, full=full, detail=not args.brief)
    log.info("verified in %.2fs", time.perf_counter() - t0)
    _emit(report, args.format, out)
    _figures(args, report)
    if args.write_golden:
        Path(args.write_golden).write_text(json.dumps(golden_from_report(report), indent=2, sort_keys=True) + "\n")
    if args.expect:
        path = bundled(DEFAULT_GOLDEN) if args.expect == "bundled" else Path(args.expect)
        try:
            golden = json.loads(path.read_text())
        except FileNotFoundError:
            raise InputError(f"cannot read golden file {path}") from None
        except json.JSONDecodeError as exc:
            raise InputError(f"golden file {path} is not valid JSON: {exc}") from None
        problems = diff_golden(report, golden)
        if problems:
            print("golden mismatch:", file=sys.stderr)
            for line in problems:
                print("  " + line, file=sys.stderr)
            return EXIT_GOLDEN
        print(f"golden file {path.name}: match", file=sys.stderr)
    return EXIT_FLAGGED if any(o.get("flagged") for o in report["orders"]) else EXIT_OK


def cmd_validate(args, out) -> int:
    table, brauer = _load(args)
    found = {"ordinary": validate_orthogonality(table) + validate_galois(table)}
    for b in brauer:
        found[b.label] = validate_brauer(b)
    if args.format == "json":
        out.write(json.dumps({"group": table.group_name, "violations": found}, indent=2, sort_keys=True) + "\n")
    else:
        for label, problems in found.items():
            out.write(f"{table.group_name} {label}: {'ok' if not problems else f'{len(problems)} violation(s)'}\n")
            for p in problems:
                out.write(f"    {p}\n")
    return EXIT_INPUT if any(found.values()) else EXIT_OK


def _figures(args, report: dict) -> None:
    if getattr(args, "figures", None):
        from .plotting import render_figures

        for p in render_figures(report, args.figures):
            print(f"wrote {p}", file=sys.stderr)


COMMANDS = {"solve": cmd_solve, "verify": cmd_verify, "validate": cmd_validate}


def main(argv: list[str] | None = None, out=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    out = out or sys.stdout
    try:
        return COMMANDS[args.command](args, out)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
