"""Command-line interface: ``equivote check|resolve|estimate|verify|table``.

Exit codes: 0 success, 1 a verification disagreement, 2 bad usage or
input, 3 a problematic profile under ``--strict``, 4 a budget overrun.
"""

from __future__ import annotations

import argparse
import csv
import math
import re
import sys
from fractions import Fraction

from .core import BudgetExceeded, PriorityOrder, Setting, Space, format_element, read_profile
from .impossibility import (alpha_bounds, anr_impossible, at_large, circledast, coin_set,
                            combine, impossibility_witness, lcmset, oslash, partitions,
                            subvector_ok)
from .likelihood import (estimate_violation, exact_violation, parse_distribution,
                         theoretical_exponents)
from .oracle import (EnumerationBudget, cross_check_classical, cross_check_theorem1,
                     verify_most_equitable, _parallel_map)
from .rules import RuleSpec
from .tiebreak import TieBreaker, resolve_explain

EXIT_OK, EXIT_DISAGREE, EXIT_USAGE, EXIT_STRICT, EXIT_BUDGET = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    if isinstance(x, (float, Fraction)):
        x = float(x)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".12g")
    return str(x)


def fmt_partition(parts) -> str:
    return "(" + ",".join(map(str, parts)) + ")" if parts else ""


def fmt_set(values) -> str:
    return "{" + ",".join(map(str, sorted(values))) + "}"


def parse_n_range(text: str) -> list[int]:
    """``"7"``, ``"1..12"`` or ``"4..16:2"``."""
    match = re.fullmatch(r"\s*(\d+)(?:\.\.(\d+)(?::(\d+))?)?\s*", text)
    if not match:
        raise UsageError(f"bad n-range {text!r}; use a..b or a..b:step")
    lo = int(match.group(1))
    hi = int(match.group(2)) if match.group(2) else lo
    step = int(match.group(3)) if match.group(3) else 1
    if lo < 1 or hi < lo or step < 1:
        raise UsageError(f"bad n-range {text!r}")
    return list(range(lo, hi + 1, step))


def _ns(args) -> list[int] | None:
    if args.n is not None and args.n_range is not None:
        raise UsageError("give either --n or --n-range, not both")
    if args.n is not None:
        if args.n < 1:
            raise UsageError("--n must be positive")
        return [args.n]
    if args.n_range is not None:
        return parse_n_range(args.n_range)
    return None


def _writer(out):
    return csv.writer(out, lineterminator="\n")


# ---------------------------------------------------------------------------
# Subcommands


def cmd_check(args, out) -> int:
    setting = Setting.parse(args.setting, args.m)
    ns = _ns(args)
    w = _writer(out)
    verdict = at_large(setting) if args.at_large else None
    if ns is None:
        if verdict is None:
            raise UsageError("check needs --n, --n-range or --at-large")
        w.writerow(["m", "setting", "at_large", "threshold"])
        w.writerow([setting.m, str(setting), verdict.verdict, fmt(verdict.threshold)])
        return EXIT_OK
    header = ["m", "n", "setting", "impossible", "witness"]
    if verdict is not None:
        header += ["at_large", "threshold"]
    w.writerow(header)
    for n in ns:
        witness = impossibility_witness(setting, n)
        row = [setting.m, n, str(setting), fmt(witness is not None), fmt_partition(witness)]
        if verdict is not None:
            row += [verdict.verdict, fmt(verdict.threshold)]
        w.writerow(row)
    return EXIT_OK


def cmd_resolve(args, out) -> int:
    try:
        P = read_profile(args.profile, args.m)
    except OSError as exc:
        raise UsageError(f"cannot read profile: {exc}") from None
    rule = RuleSpec.parse(args.rule)
    tb = TieBreaker.parse(args.tiebreak)
    dec = Space.parse(args.dec, P.m)
    priority = PriorityOrder.parse(args.priority) if args.priority else None
    if priority is not None and priority.m != P.m:
        raise UsageError("--priority must rank all alternatives")
    res = resolve_explain(rule, tb, P, dec, priority)
    if args.strict and res.problematic:
        print(f"problematic profile: no refinement of {rule} is anonymous and neutral here",
              file=sys.stderr)
        return EXIT_STRICT
    if args.explain:
        out.write(res.describe() + "\n")
    else:
        out.write(format_element(res.decision) + "\n")
    return EXIT_OK


def _estimate_row(task):
    m, n, rule, tb, dist_text, trials, seed, exact, budget = task
    dist = parse_distribution(dist_text, m)
    if exact:
        est = exact_violation(rule, dist, n, tb, max_histograms=budget.max_histograms)
    else:
        est = estimate_violation(rule, dist, n, trials, seed, tb)
    lo, hi = theoretical_exponents(m, n)
    return [m, n, str(rule), str(tb), str(dist), fmt(est.rate), fmt(est.stderr),
            fmt(est.exact), fmt(lo), fmt(hi)]


def cmd_estimate(args, out) -> int:
    rule = RuleSpec.parse(args.rule)
    tb = TieBreaker.parse(args.tiebreak)
    parse_distribution(args.dist, args.m)
    ns = _ns(args)
    if ns is None:
        raise UsageError("estimate needs --n or --n-range")
    if args.trials < 1:
        raise UsageError("--trials must be positive")
    budget = EnumerationBudget.from_env()
    tasks = [(args.m, n, rule, tb, args.dist, args.trials, args.seed, args.exact, budget)
             for n in ns]
    rows = _parallel_map(_estimate_row, tasks, args.jobs)
    w = _writer(out)
    w.writerow(["m", "n", "rule", "tiebreak", "dist", "rate", "stderr", "exact",
                "theoretical_lower_exp", "theoretical_upper_exp"])
    w.writerows(rows)
    return EXIT_OK


GRIDS = {
    "small": dict(ms=(2, 3), ns=range(1, 7), equity_ms=(2, 3), equity_ns=range(1, 5)),
    "medium": dict(ms=(2, 3, 4), ns=range(1, 9), equity_ms=(2, 3, 4), equity_ns=range(1, 5)),
}

VERIFY_RULES = ("plurality", "borda", "veto", "copeland:0.5", "trivial")


def parse_grid(text: str) -> dict:
    if text in GRIDS:
        return GRIDS[text]
    match = re.fullmatch(r"m=([\d.:]+),n=([\d.:]+)", text.replace(" ", ""))
    if not match:
        raise UsageError(f"unknown grid {text!r}; use small, medium or m=a..b,n=c..d")
    ms, ns = parse_n_range(match.group(1)), parse_n_range(match.group(2))
    if min(ms) < 2:
        raise UsageError("grids need m >= 2")
    return dict(ms=ms, ns=ns, equity_ms=ms, equity_ns=ns)


def _equity_task(task):
    rule, tb, m, n, budget = task
    setting = Setting(Space("L", m, m), Space("L", 1, m))
    return verify_most_equitable(rule, tb, setting, n, budget)


def cmd_verify(args, out) -> int:
    grid = parse_grid(args.grid)
    budget = EnumerationBudget.from_env()
    tb = TieBreaker.parse(args.tiebreak)
    rules = [RuleSpec.parse(r) for r in (args.rules.split(",") if args.rules else VERIFY_RULES)]
    w = _writer(out)
    w.writerow(["check", "m", "n", "setting", "subject", "ok", "detail"])
    failures = 0
    theorem = cross_check_theorem1(grid["ms"], grid["ns"], budget=budget, jobs=args.jobs)
    for r in theorem.rows:
        detail = ";".join(f"{k}={fmt(v)}" for k, v in r.others.items())
        w.writerow(["partition", r.m, r.n, r.setting, f"closed_form={fmt(r.closed_form)}",
                    fmt(r.agree), detail])
        failures += not r.agree
    classical_ms = [m for m in grid["ms"] if m <= 5]
    for which in ("moulin", "bg"):
        report = cross_check_classical(classical_ms, grid["ns"], which)
        for r in report.rows:
            w.writerow([which, r.m, r.n, r.setting, f"closed_form={fmt(r.closed_form)}",
                        fmt(r.agree), ";".join(f"{k}={fmt(v)}" for k, v in r.others.items())])
            failures += not r.agree
    tasks = [(rule, tb, m, n, budget) for rule in rules
             for m in grid["equity_ms"] for n in grid["equity_ns"]]
    for rep in _parallel_map(_equity_task, tasks, args.jobs):
        detail = (f"histograms={rep.histograms};problematic={rep.problematic};"
                  f"violations={len(rep.violations)};bad_witnesses={len(rep.witness_failures)}")
        w.writerow(["equity", rep.setting.split(">")[0][1:], rep.n, rep.setting,
                    f"{rep.rule}+{rep.tiebreak}", fmt(rep.ok), detail])
        failures += not rep.ok
    return EXIT_DISAGREE if failures else EXIT_OK


def _table_rows(name: str):
    if name == "coins-m4-l2":
        yield ["partition", "circledast", "oslash"]
        for p in partitions(4):
            yield [fmt_partition(p), fmt_set(lcmset(p, 2, circledast)), fmt_set(lcmset(p, 2, oslash))]
    elif name == "coins-8-6":
        yield ["op", "partition", "sub", "result"]
        for op_name, op in (("circledast", circledast), ("oslash", oslash)):
            yield [op_name, "(8,6)", "(6,4)", fmt_partition(combine((8, 6), (6, 4), op))]
    elif name == "list2-list2":
        yield ["pref", "dec", "impossible_n", "partitions"]
        for pk in "LC":
            for dk in "LC":
                setting = Setting(Space(pk, 2, 4), Space(dk, 2, 4))
                ns = [n for n in range(1, 25) if anr_impossible(setting, n)]
                parts = [f"{fmt_partition(p)}:{fmt_set(coin_set(p, setting.pref))}"
                         for p in partitions(4) if subvector_ok(p, dk, 2)]
                yield [f"{pk}2", f"{dk}2", " ".join(map(str, ns)), ";".join(parts)]
    elif name == "alpha":
        yield ["m", "n", "alpha_max", "alpha_max_plus"]
        for m, n in ((3, 5), (3, 8), (5, 12), (6, 12)):
            b = alpha_bounds(m, n)
            yield [m, n, fmt(b.alpha_max), fmt(b.alpha_max_plus)]
    elif name == "at-large":
        yield ["m", "setting", "verdict"]
        for m in range(2, 9):
            for pk in "LC":
                for dk in "LC":
                    for L in range(1, min(m, 3) + 1):
                        for k in range(1, min(m, 2) + 1):
                            s = Setting(Space(pk, L, m, upto=True), Space(dk, k, m))
                            yield [m, str(s), at_large(s).verdict]
    else:
        raise UsageError(f"unknown table {name!r}; choose from {', '.join(TABLES)}")


TABLES = ("coins-m4-l2", "coins-8-6", "list2-list2", "alpha", "at-large")


def cmd_table(args, out) -> int:
    _writer(out).writerows(_table_rows(args.name))
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="equivote", description="Anonymous, neutral and resolute voting tools.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="decide whether ANR rules exist")
    p.add_argument("--setting", required=True, help="e.g. L2>L1, C<=5>L1, Cm>Cm")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--n-range")
    p.add_argument("--at-large", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("resolve", help="apply a rule and a tie-breaker to a profile file")
    p.add_argument("--profile", required=True)
    p.add_argument("--rule", required=True)
    p.add_argument("--tiebreak", default="mfp")
    p.add_argument("--dec", default="L1", help="decision space, e.g. L1, C2, L3")
    p.add_argument("--m", type=int, help="number of alternatives (default: largest seen)")
    p.add_argument("--priority", help="base ranking for priority, e.g. 2>1>3")
    p.add_argument("--explain", action="store_true")
    p.add_argument("--strict", action="store_true", help="exit 3 on problematic profiles")
    p.set_defaults(func=cmd_resolve)

    p = sub.add_parser("estimate", help="violation rates on random profiles")
    p.add_argument("--rule", required=True)
    p.add_argument("--tiebreak", default="mfp")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--n-range")
    p.add_argument("--dist", default="ic")
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("verify", help="cross-check closed forms and MFP on a grid")
    p.add_argument("--grid", default="small")
    p.add_argument("--rules", help="comma-separated rule names")
    p.add_argument("--tiebreak", default="mfp")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("table", help="regenerate a reference table")
    p.add_argument("--name", required=True, choices=TABLES)
    p.set_defaults(func=cmd_table)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
