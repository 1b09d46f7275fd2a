"""Command-line front end: ``artin-density <subcommand> ...``.

Exit status is 0 on success, 2 for invalid input and 3 when the requested
precision or a size budget cannot be met.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from typing import List, Optional, Sequence

from .constants import PrecisionError, bound_string, emit_table, to_decimal
from .density import (
    DensityReport,
    ModelTooLargeError,
    ProblemSpec,
    finite_model_count,
    restricted_density,
    total_density,
    vanishing_verdict,
)
from .qgroups import ClassEnumerationError, FactoringBudgetError, parse_rational
from .sieve import SieveBudgetError, empirical_density

EXIT_OK, EXIT_INVALID, EXIT_BUDGET = 0, 2, 3
DIGITS_ENV = "ARTIN_DIGITS"
FORMATS = ("text", "json", "csv")


class InputError(ValueError):
    pass


def rational_str(x: Optional[Fraction]) -> Optional[str]:
    if x is None:
        return None
    return f"{x.numerator}/{x.denominator}"


def parse_list(text: Optional[str]) -> List[Fraction]:
    """Comma-separated integers or fractions ``a/b``."""
    if text is None or not text.strip():
        return []
    out = []
    for item in text.split(","):
        try:
            out.append(parse_rational(item.strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"malformed rational {item.strip()!r}") from exc
    for x in out:
        if x == 0:
            raise InputError("generators must be nonzero")
    return out


def _ints(values: Sequence[Fraction], what: str) -> List[int]:
    if any(v.denominator != 1 for v in values):
        raise InputError(f"{what} must be integers")
    return [int(v) for v in values]


def build_problem(kind: str, gens: Optional[str], split: Optional[str] = None) -> ProblemSpec:
    values = parse_list(gens)
    if split and kind != "schinzel":
        raise InputError("--split only applies to --problem schinzel")
    if kind == "rank-r":
        return ProblemSpec.rank_r(values)
    if kind == "multi":
        return ProblemSpec.multi(values)
    if kind == "schinzel":
        return ProblemSpec.schinzel(_ints(values, "primitive-root primes"), _ints(parse_list(split), "split primes"))
    raise InputError(f"unknown problem kind {kind!r}")


def default_digits() -> int:
    raw = os.environ.get(DIGITS_ENV)
    if raw is None:
        return 20
    try:
        value = int(raw)
    except ValueError as exc:
        raise InputError(f"{DIGITS_ENV} must be an integer, got {raw!r}") from exc
    return value


# --------------------------------------------------------------------------
# serialisation
# --------------------------------------------------------------------------

def report_dict(report: DensityReport) -> dict:
    e = report.entanglement
    with_digits = report.digits
    out = {
        "problem": report.problem.describe(),
        "rho": rational_str(report.rho),
        "constant_name": report.constant_name,
        "constant": format(report.constant.decimal(with_digits), "f"),
        "entanglement_num": None if e is None else e.numerator,
        "entanglement_den": None if e is None else e.denominator,
        "total": format(to_decimal(report.total, with_digits), "f"),
        "error_bound": bound_string(report.error_bound),
        "digits": with_digits,
        "verdict": report.verdict.kind,
        "witnesses": list(report.verdict.witnesses),
    }
    if report.verdict.subset is not None:
        out["subset"] = list(report.verdict.subset)
    if "closed_form" in report.extras:
        out["closed_form"] = rational_str(report.extras["closed_form"])
    return out


def _flat_csv(rows: List[dict]) -> str:
    buf = io.StringIO()
    keys = list(rows[0]) if rows else []
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: ";".join(map(str, v)) if isinstance(v, list) else v for k, v in row.items()})
    return buf.getvalue()


def _text(d: dict) -> str:
    width = max(len(k) for k in d)
    lines = []
    for k, v in d.items():
        if isinstance(v, list):
            v = "; ".join(map(str, v)) if v else "-"
        lines.append(f"{k:<{width}}  {v}")
    return "\n".join(lines) + "\n"


def serialize(obj, fmt: str) -> str:
    """Render a report (or a list of flat dicts) as text, JSON or CSV."""
    if isinstance(obj, DensityReport):
        obj = report_dict(obj)
    rows = obj if isinstance(obj, list) else [obj]
    if fmt == "json":
        return json.dumps(obj, indent=2) + "\n"
    if fmt == "csv":
        return _flat_csv(rows)
    if fmt == "text":
        return "\n".join(_text(r) for r in rows)
    raise InputError(f"unknown format {fmt!r}")


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_density(args) -> str:
    problem = build_problem(args.problem, args.gens, args.split)
    return serialize(total_density(problem, args.digits), args.format)


def cmd_constants(args) -> str:
    text = emit_table(args.max_rank, args.digits, args.format, args.check)
    if args.check and ("FAIL" in text or '"match": false' in text):
        args.failed = True
    return text


def cmd_vanish(args) -> str:
    problem = build_problem("multi", args.gens)
    v = vanishing_verdict(problem)
    out = {
        "problem": problem.describe(),
        "verdict": v.kind,
        "witnesses": list(v.witnesses),
        "subset": list(v.subset) if v.subset else None,
        "shortcut": v.shortcut,
    }
    return serialize(out, args.format)


def cmd_verify(args) -> str:
    problem = build_problem(args.problem, args.gens, args.split)
    rep = empirical_density(problem, args.bound, threads=args.threads, progress=args.progress, digits=args.digits)
    out = {"problem": problem.describe()}
    out.update(rep.as_dict())
    return serialize(out, args.format)


def cmd_oracle(args) -> str:
    problem = build_problem(args.problem, args.gens, args.split)
    primes = _ints(parse_list(args.primes), "primes") if args.primes else None
    count = finite_model_count(problem, primes, mode=args.mode, bound=args.model_bound)
    closed = restricted_density(problem, primes)
    out = {
        "problem": problem.describe(),
        "mode": args.mode,
        "model_order": count.ambient,
        "group_count": count.group,
        "good_count": count.good,
        "oracle": rational_str(count.density),
        "closed_form": rational_str(closed),
        "agree": count.density == closed,
    }
    if not out["agree"]:
        args.failed = True
    return serialize(out, args.format)


def cmd_table(args) -> str:
    if args.start < 2 or args.stop < args.start:
        raise InputError("need 2 <= --from <= --to")
    rows = []
    for a in range(args.start, args.stop + 1):
        try:
            problem = ProblemSpec.rank_r([a])
        except ValueError:
            continue
        rep = total_density(problem, args.digits)
        rows.append(
            {
                "a": a,
                "rho": rational_str(rep.rho),
                "constant_name": rep.constant_name,
                "entanglement": rational_str(rep.entanglement),
                "total": format(to_decimal(rep.total, args.digits), "f"),
                "verdict": rep.verdict.kind,
            }
        )
    if args.format == "text":
        lines = [f"{'a':>4}  {'rho':>6}  {'E':>10}  density"]
        for r in rows:
            lines.append(f"{r['a']:>4}  {r['rho']:>6}  {str(r['entanglement']):>10}  {r['total']}")
        return "\n".join(lines) + "\n"
    return serialize(rows, args.format)


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------

def _problem_args(p: argparse.ArgumentParser, with_kind: bool = True) -> None:
    if with_kind:
        p.add_argument("--problem", choices=("rank-r", "multi", "schinzel"), default="rank-r")
    p.add_argument("--gens", required=True, help="comma-separated rationals, e.g. 2,3/5,-7")
    if with_kind:
        p.add_argument("--split", help="split primes for --problem schinzel (2 is always included)")


def build_parser(digits: int) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="artin-density",
        description="Densities of primes with prescribed primitive roots, with exact and empirical checks.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--digits", type=int, default=digits, help=f"decimal places (default ${DIGITS_ENV} or 20)")
    common.add_argument("--format", choices=FORMATS, default="text")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("density", parents=[common], help="density of a problem with error bound")
    _problem_args(p)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("constants", parents=[common], help="the C_r and D_r constants")
    p.add_argument("--max-rank", type=int, default=7)
    p.add_argument("--check", action="store_true", help="compare with the built-in reference table")
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("verify", parents=[common], help="compare with prime counts up to --bound")
    _problem_args(p)
    p.add_argument("--bound", type=int, default=10**6)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--progress", action="store_true", help="report progress on stderr")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("vanish", parents=[common], help="zero-density verdict for a multiple primitive root problem")
    _problem_args(p, with_kind=False)
    p.set_defaults(func=cmd_vanish)

    p = sub.add_parser("oracle", parents=[common], help="exact count in the finite Galois model")
    _problem_args(p)
    p.add_argument("--primes", help="primes of the model (default: the critical primes)")
    p.add_argument("--mode", choices=("factored", "full"), default="factored")
    p.add_argument("--model-bound", type=int, default=10**7)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("table", parents=[common], help="rank-one densities for a range of integers")
    p.add_argument("--from", dest="start", type=int, default=2)
    p.add_argument("--to", dest="stop", type=int, default=30)
    p.set_defaults(func=cmd_table)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    try:
        digits = default_digits()
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    parser = build_parser(digits)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    args.failed = False
    if getattr(args, "digits", 1) < 1:
        print("error: --digits must be positive", file=sys.stderr)
        return EXIT_INVALID
    try:
        sys.stdout.write(args.func(args))
    except (PrecisionError, ModelTooLargeError, SieveBudgetError, FactoringBudgetError, ClassEnumerationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return 1 if args.failed else EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
