"""Command-line front end.

Exit codes: 0 success (``check``: consistent-with-1S), 1 ``check`` found
the measure not-1S, 2 bad input (arguments, state file, config),
3 degree-law overflow, 4 state failed validation.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

import numpy as np

from .closed_forms import (
    SeedSummary,
    closed_form_d1,
    closed_form_d2,
    closed_form_d3,
    closed_form_d4_two_coeff,
    third_order_expansion,
)
from .errors import (
    ConfigError,
    DegreeOverflowError,
    InvalidArgumentError,
    SingularInputError,
    SizeLimitError,
    ValidationError,
)
from .harness import CONSISTENT, SuiteConfig, run_suite
from .series import SeedSeries, decode_number, encode_number, scale_coefficients
from .states import (
    MAX_KRON_ROWS,
    brute_force_coherence,
    l1_n_copies_closed,
    l2_n_copies_closed,
    load_state,
    random_state,
    state_to_csv,
    state_to_json,
    summarize,
)

EXIT_OK, EXIT_NOT_1S, EXIT_INPUT, EXIT_OVERFLOW, EXIT_INVALID_STATE = 0, 1, 2, 3, 4


def parse_coeffs(text: str, exact_decimals: bool = False) -> tuple:
    """``"2,1"`` or ``"3,0.24,1/50"``; decimals are floats unless `exact_decimals`."""
    tokens = [t.strip() for t in text.split(",") if t.strip()]
    if not tokens:
        raise InvalidArgumentError("no coefficients given")
    if exact_decimals:
        try:
            return tuple(Fraction(t) for t in tokens)
        except ValueError as exc:
            raise InvalidArgumentError(f"cannot parse coefficients {text!r}") from exc
    try:
        return tuple(decode_number(t) for t in tokens)
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidArgumentError(f"cannot parse coefficients {text!r}") from exc


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, Fraction):
        return str(x)
    return repr(float(x))


def _closed_form(seed: SeedSeries, n: int, j: int):
    s = SeedSummary.from_seed(seed)
    try:
        if j == 1:
            return closed_form_d1(s, n)
        if j == 2:
            return closed_form_d2(s, n)
        if j == 3:
            return closed_form_d3(s, n)
        if j == 4 and all(c == 0 for c in seed.coeffs[2:]):
            return closed_form_d4_two_coeff(s, n)
    except SingularInputError:
        return None
    return None


def _emit(args, text: str):
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _rows_out(args, header, rows, comments=(), default="table"):
    fmt = args.format or default
    if fmt == "json":
        return json.dumps([dict(zip(header, r)) for r in rows], indent=1) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        for c in comments:
            buf.write(f"# {c}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(x) if not isinstance(x, (str, int)) else x for x in r])
        return buf.getvalue()
    table = [[str(h) for h in header]]
    for r in rows:
        table.append([_fmt(x) if not isinstance(x, (str, int)) else str(x) for x in r])
    widths = [max(len(row[i]) for row in table) for i in range(len(header))]
    lines = [f"# {c}" for c in comments]
    lines += ["  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in table]
    return "\n".join(lines) + "\n"


def cmd_expand(args) -> int:
    coeffs = parse_coeffs(args.coeffs, args.exact)
    seed = SeedSeries(args.base, coeffs, finite=not args.infinite)
    series = scale_coefficients(seed, args.n, args.truncation)
    if args.format == "json":
        data = series.to_json()
        data["closed_form"] = [
            encode_number(cf) if cf is not None else None
            for cf in (_closed_form(seed, args.n, j) for j in range(1, len(series) + 1))
        ]
        _emit(args, json.dumps(data, indent=1) + "\n")
        return EXIT_OK
    rows = []
    for j, value in enumerate(series.coeffs, start=1):
        cf = _closed_form(seed, args.n, j)
        diff = None if cf is None else abs(value - cf)
        rows.append((j, value, cf, diff))
    comments = [f"base={seed.base} n={args.n} N={series.copies} terms={len(series)}"
                f"{' truncated' if series.truncated else ''}"]
    _emit(args, _rows_out(args, ("j", "d_j(N)", "closed_form", "abs_diff"), rows, comments))
    return EXIT_OK


def cmd_coherence(args) -> int:
    rho = load_state(args.state, strict=args.strict_psd)
    summary = summarize(rho)
    value = summary.c if args.norm == "l1" else summary.c2
    out = {"norm": args.norm, "dim": rho.dim, "value": value, "purity": summary.purity}
    if args.copies is not None:
        N = args.copies
        if args.norm == "l1":
            closed = l1_n_copies_closed(summary.c, N)
        else:
            closed = l2_n_copies_closed(summary.c2, summary.purity, N)
        out.update(N=N, closed=closed, brute=None, abs_diff=None)
        if rho.dim**N <= MAX_KRON_ROWS:
            brute = brute_force_coherence(rho, N, args.norm)
            out.update(brute=brute, abs_diff=abs(brute - closed))
    if args.format == "json":
        _emit(args, json.dumps(out, indent=1) + "\n")
    else:
        rows = [(k, v if v is not None else "n/a (over size cap)") for k, v in out.items()]
        _emit(args, _rows_out(args, ("quantity", "value"), rows))
    return EXIT_OK


def cmd_check(args) -> int:
    try:
        with open(args.config) as fh:
            cfg = SuiteConfig.from_json(fh.read())
    except OSError as exc:
        raise ConfigError("<file>", str(exc)) from exc
    if args.seed is not None:
        cfg.seed = args.seed
    if args.tolerance is not None:
        cfg.tolerance = args.tolerance
    report = run_suite(cfg)
    fmt = args.format or "table"
    if fmt == "json":
        text = json.dumps(report.to_json(), indent=1) + "\n"
    elif fmt == "csv":
        rows = [(c.state_id, c.N, "" if c.K is None else c.K,
                 _fmt(c.residual_definition), _fmt(c.residual_composition))
                for c in report.checks]
        text = _rows_out(args, ("state_id", "N", "K", "residual_definition",
                                "residual_composition"), rows,
                         [f"measure={report.measure} verdict={report.verdict}"])
    else:
        text = report.to_table() + "\n"
    _emit(args, text)
    return EXIT_OK if report.verdict == CONSISTENT else EXIT_NOT_1S


def fig1_rows(delta=0.08, e_max=1.0, points=200):
    """Rows ``(e, E3, E9, E27)`` from the third-order expansion, base 3."""
    d = Fraction(str(delta))
    s = SeedSummary(3, Fraction(3), 3 * d, 3 * d * d)
    rows = []
    for e in np.linspace(0.0, e_max, points):
        ex = Fraction(float(e))
        rows.append((float(e),) + tuple(float(third_order_expansion(s, n, ex)) for n in (1, 2, 3)))
    return rows


def fig2_rows(cs=(0.05, 0.08, 0.1), n_max=64, powers_of_two=False):
    """Rows ``(N, C_N(c)/N for each c)`` with ``C_N(c) = (1 + c)**N - 1``."""
    Ns = range(1, n_max + 1)
    if powers_of_two:
        Ns = [N for N in Ns if N & (N - 1) == 0]
    return [(N,) + tuple(l1_n_copies_closed(c, N) / N for c in cs) for N in Ns]


def cmd_fig1(args) -> int:
    rows = fig1_rows(args.delta, args.e_max, args.points)
    comments = [f"fig1 a=3 delta={args.delta} e_max={args.e_max} points={args.points} "
                "third-order expansion"]
    _emit(args, _rows_out(args, ("e", "E3", "E9", "E27"), rows, comments, default="csv"))
    return EXIT_OK


def cmd_fig2(args) -> int:
    cs = [float(c) for c in args.c.split(",")]
    rows = fig2_rows(cs, args.n_max, args.powers_of_two)
    comments = [f"fig2 l1 coherence per copy, c={args.c} n_max={args.n_max}"
                f"{' powers-of-two' if args.powers_of_two else ''}"]
    header = ("N",) + tuple(f"c={c:g}" for c in cs)
    _emit(args, _rows_out(args, header, rows, comments, default="csv"))
    return EXIT_OK


def cmd_gen_state(args) -> int:
    rho = random_state(args.dim, args.kind, args.seed if args.seed is not None else 0)
    fmt = args.format
    if fmt is None:
        fmt = "csv" if args.output and args.output.lower().endswith(".csv") else "json"
    if fmt == "csv":
        text = state_to_csv(rho)
    else:
        text = json.dumps(state_to_json(rho), indent=1) + "\n"
    _emit(args, text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "table"), default=None)
    common.add_argument("--output", "-o", default=None, help="output path (default: stdout)")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--tolerance", type=float, default=None)
    common.add_argument("--strict-psd", action="store_true",
                        help="also require states to be positive semidefinite")

    parser = argparse.ArgumentParser(
        prog="scalable-measures",
        description="Scaled Maclaurin series and coherence scalability checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expand", parents=[common], help="coefficients d_j(a**n) from a seed")
    p.add_argument("--base", type=int, required=True)
    p.add_argument("--coeffs", required=True, help="comma list, e.g. 2,1 or 3,0.24,12/625")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--truncation", type=int, default=None)
    p.add_argument("--infinite", action="store_true", help="seed is a truncated infinite series")
    p.add_argument("--exact", action="store_true", help="parse decimals as exact rationals")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("coherence", parents=[common], help="l1/l2 coherence of a state file")
    p.add_argument("state")
    p.add_argument("--norm", choices=("l1", "l2"), default="l1")
    p.add_argument("--copies", "-N", type=int, default=None)
    p.set_defaults(func=cmd_coherence)

    p = sub.add_parser("check", parents=[common], help="run a scalability suite")
    p.add_argument("config")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("fig1", parents=[common], help="CSV of E3, E9, E27 (third order)")
    p.add_argument("--delta", type=float, default=0.08)
    p.add_argument("--e-max", type=float, default=1.0)
    p.add_argument("--points", type=int, default=200)
    p.set_defaults(func=cmd_fig1)

    p = sub.add_parser("fig2", parents=[common], help="CSV of l1 coherence per copy")
    p.add_argument("--c", default="0.05,0.08,0.1")
    p.add_argument("--n-max", type=int, default=64)
    p.add_argument("--powers-of-two", action="store_true")
    p.set_defaults(func=cmd_fig2)

    p = sub.add_parser("gen-state", parents=[common], help="write a random state file")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--kind", choices=("pure", "mixed"), default="mixed")
    p.set_defaults(func=cmd_gen_state)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DegreeOverflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OVERFLOW
    except ValidationError as exc:
        print(f"error: invalid state ({exc.invariant}): {exc}", file=sys.stderr)
        return EXIT_INVALID_STATE
    except ConfigError as exc:
        print(f"error: config field {exc.field}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InvalidArgumentError, SizeLimitError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
