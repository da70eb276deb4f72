"""Exhaustive checks used as ground truth on small instances.

These routines deliberately avoid the partition formulas.  They enumerate
histograms and permutations directly, so agreement with the closed forms
in ``impossibility`` and with the MFP mechanism in ``tiebreak`` is
meaningful.
"""

from __future__ import annotations

import math
import os
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field, replace

import numpy as np

from .core import (BudgetExceeded, Histogram, PriorityOrder, Profile, Setting,
                   Space, format_element)
from .groups import all_permutations, fpd, stab_histogram
from .impossibility import anr_impossible, condition1_holds, impossibility_witness, partitions
from .likelihood import compositions, count_histograms
from .rules import as_rule
from .tiebreak import anr_witness, as_tiebreaker, resolve


@dataclass(frozen=True)
class EnumerationBudget:
    max_histograms: int = 10**7
    max_groups: int = 10**4
    max_permutations: int = math.factorial(8)

    def __post_init__(self):
        for name in ("max_histograms", "max_groups", "max_permutations"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def from_env(cls, var: str = "EQUIVOTE_BUDGET") -> EnumerationBudget:
        """Read overrides like ``max_histograms=1000,max_groups=50``.

        A bare integer sets ``max_histograms``.
        """
        text = os.environ.get(var, "").strip()
        if not text:
            return cls()
        if text.isdigit():
            return cls(max_histograms=int(text))
        fields = {}
        for item in text.split(","):
            key, _, value = item.partition("=")
            key = key.strip()
            if key not in ("max_histograms", "max_groups", "max_permutations"):
                raise ValueError(f"unknown budget key {key!r} in {var}")
            fields[key] = int(value)
        return cls(**fields)

    def check_histograms(self, count: int) -> None:
        if count > self.max_histograms:
            raise BudgetExceeded(f"{count} histograms exceed the budget of {self.max_histograms}")

    def check_permutations(self, m: int) -> None:
        if math.factorial(m) > self.max_permutations:
            raise BudgetExceeded(
                f"{m}! permutations exceed the budget of {self.max_permutations}")


def _budget(budget: EnumerationBudget | None) -> EnumerationBudget:
    return budget if budget is not None else EnumerationBudget.from_env()


def enumerate_histograms(space: Space, n: int,
                         budget: EnumerationBudget | None = None) -> Iterator[Histogram]:
    """Every histogram of ``n`` votes from ``space``, each exactly once."""
    elements = space.elements()
    _budget(budget).check_histograms(count_histograms(len(elements), n))
    for counts in compositions(n, len(elements)):
        yield Histogram._trusted({e: c for e, c in zip(elements, counts) if c}, space.m)


# ---------------------------------------------------------------------------
# Impossibility by scanning histograms


def problematic_histogram(setting: Setting, n: int, budget: EnumerationBudget | None = None,
                          batch: int = 4096) -> Histogram | None:
    """A histogram whose stabilizer fixes no decision, or None if none exists."""
    budget = _budget(budget)
    m = setting.m
    budget.check_permutations(m)
    prefs = setting.pref.elements()
    decisions = setting.dec.elements()
    budget.check_histograms(count_histograms(len(prefs), n))
    index = {e: i for i, e in enumerate(prefs)}
    perms = all_permutations(m)
    image = np.array([[index[s(e)] for e in prefs] for s in perms])
    moves = np.array([[s(d) != d for d in decisions] for s in perms], dtype=np.int64)

    def scan(rows):
        H = np.array(rows, dtype=np.int64)
        stab = (H[:, image] == H[:, None, :]).all(axis=2)
        moved = stab.astype(np.int64) @ moves
        hit = np.flatnonzero((moved > 0).all(axis=1))
        if hit.size:
            counts = rows[hit[0]]
            return Histogram._trusted({e: c for e, c in zip(prefs, counts) if c}, m)
        return None

    rows = []
    for counts in compositions(n, len(prefs)):
        rows.append(counts)
        if len(rows) == batch:
            found = scan(rows)
            if found is not None:
                return found
            rows = []
    return scan(rows) if rows else None


def brute_force_anr_exists(setting: Setting, n: int,
                           budget: EnumerationBudget | None = None) -> bool:
    """True when the impossibility holds, found by scanning every histogram."""
    return problematic_histogram(setting, n, budget) is not None


def witness_is_valid(setting: Setting, h: Histogram) -> bool:
    """Recompute the stabilizer of ``h`` from scratch and confirm it fixes no decision."""
    stab = stab_histogram(h, "generic")
    return not fpd(h, setting.dec.elements(), stab)


def moulin_condition(m: int, n: int) -> bool:
    """``m`` is a sum of non-trivial divisors of ``n``."""
    divisors = [d for d in range(2, n + 1) if n % d == 0]
    reach = [True] + [False] * m
    for d in divisors:
        for total in range(d, m + 1):
            reach[total] = reach[total] or reach[total - d]
    return reach[m]


def bg_condition(m: int, n: int) -> bool:
    """``n`` has a non-trivial divisor no larger than ``m``."""
    return math.gcd(math.factorial(m), n) > 1


# ---------------------------------------------------------------------------
# Cross-checks


@dataclass
class CrossCheckRow:
    m: int
    n: int
    setting: str
    closed_form: bool
    others: dict
    witness: str = ""

    @property
    def agree(self) -> bool:
        return all(v == self.closed_form for v in self.others.values())


@dataclass
class CrossCheckReport:
    rows: list = field(default_factory=list)

    @property
    def disagreements(self) -> list:
        return [r for r in self.rows if not r.agree]

    @property
    def ok(self) -> bool:
        return not self.disagreements

    def csv_rows(self):
        yield ["m", "n", "setting", "closed_form", "checks", "agree", "witness"]
        for r in self.rows:
            checks = ";".join(f"{k}={'true' if v else 'false'}" for k, v in r.others.items())
            yield [r.m, r.n, r.setting, _tf(r.closed_form), checks, _tf(r.agree), r.witness]


def _tf(b: bool) -> str:
    return "true" if b else "false"


def default_settings(m: int, sizes: Sequence[int] = (1, 2)) -> list[Setting]:
    out = []
    for pk in "LC":
        for dk in "LC":
            for ell in sizes:
                for k in sizes:
                    if ell <= m and k <= m:
                        out.append(Setting(Space(pk, ell, m), Space(dk, k, m)))
    return out


def _check_point(args) -> CrossCheckRow:
    setting, n, budget = args
    closed = anr_impossible(setting, n)
    witness = problematic_histogram(setting, n, budget)
    brute = witness is not None
    if brute and not witness_is_valid(setting, witness):
        brute = not brute  # an invalid witness counts as a disagreement
    group = condition1_holds(setting, n)
    part = impossibility_witness(setting, n)
    return CrossCheckRow(setting.m, n, str(setting), closed,
                         {"histogram_scan": brute, "group_scan": group},
                         "(" + ",".join(map(str, part)) + ")" if part else "")


def _parallel_map(fn, tasks, jobs: int):
    if jobs > 1 and len(tasks) > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, tasks))
    return [fn(t) for t in tasks]


def cross_check_theorem1(m_range: Iterable[int], n_range: Iterable[int],
                         settings=None, budget: EnumerationBudget | None = None,
                         jobs: int = 1) -> CrossCheckReport:
    """Compare the partition criterion with both exhaustive oracles on a grid.

    ``settings`` maps ``m`` to a list of settings; by default all kind
    pairs with sizes 1 and 2 are used.
    """
    budget = _budget(budget)
    ns = list(n_range)
    tasks = []
    for m in m_range:
        for setting in (settings(m) if callable(settings) else settings or default_settings(m)):
            tasks.extend((setting, n, budget) for n in ns)
    return CrossCheckReport(_parallel_map(_check_point, tasks, jobs))


def cross_check_classical(m_range: Iterable[int], n_range: Iterable[int],
                          which: str = "moulin", with_groups: bool = True) -> CrossCheckReport:
    """Compare with the single-winner (``moulin``) or full-ranking (``bg``) criteria."""
    ns = list(n_range)
    rows = []
    for m in m_range:
        setting = Setting(Space("L", m, m), Space("L", 1 if which == "moulin" else m, m))
        reference = moulin_condition if which == "moulin" else bg_condition
        for n in ns:
            others = {which: reference(m, n)}
            if with_groups:
                others["group_scan"] = condition1_holds(setting, n)
            rows.append(CrossCheckRow(m, n, str(setting), anr_impossible(setting, n), others))
    return CrossCheckReport(rows)


# ---------------------------------------------------------------------------
# Most-equitable verification


@dataclass
class Violation:
    kind: str
    histogram: Histogram
    detail: str = ""

    def __str__(self) -> str:
        votes = " ".join(f"{c}x{format_element(v)}" for v, c in self.histogram.items())
        return f"{self.kind}: [{votes}] {self.detail}".rstrip()


@dataclass
class EquityReport:
    rule: str
    tiebreak: str
    setting: str
    n: int
    histograms: int = 0
    problematic: int = 0
    violations: list = field(default_factory=list)
    witness_failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations and not self.witness_failures

    def summary(self) -> str:
        return (f"{self.rule} with {self.tiebreak} on {self.setting}, n={self.n}: "
                f"{self.histograms} histograms, {self.problematic} problematic, "
                f"{len(self.violations)} violations, {len(self.witness_failures)} bad witnesses")


def verify_most_equitable(rule, tiebreak, setting: Setting, n: int,
                          budget: EnumerationBudget | None = None,
                          shuffles: int = 2, seed: int = 0,
                          priority: PriorityOrder | None = None) -> EquityReport:
    """Check anonymity and neutrality of ``tiebreak * rule`` on every histogram.

    Non-problematic histograms must give the same decision under vote
    shuffles.  The decision must also lie among the stabilizer-fixed
    winners and move correctly under every permutation of the alternatives.
    Problematic histograms must come with a stabilizer element that moves
    the decision.
    """
    budget = _budget(budget)
    budget.check_permutations(setting.m)
    rule, tb = as_rule(rule), as_tiebreaker(tiebreak)
    report = EquityReport(str(rule), str(tb), str(setting), n)
    rng = np.random.default_rng(seed)
    dec = setting.dec
    perms = all_permutations(setting.m)

    decided: dict[Histogram, object] = {}
    fine: list[tuple[Histogram, Profile]] = []
    for h in enumerate_histograms(setting.pref, n, budget):
        report.histograms += 1
        P = h.representative(priority)
        winners = rule(P, dec)
        choice = tb(P, winners, priority)
        decided[h] = choice
        stab = stab_histogram(h)
        fixed = fpd(h, winners, stab)
        if not fixed:
            report.problematic += 1
            sigma = anr_witness(stab, choice)
            if sigma is None or h.permuted(sigma) != h or sigma(choice) == choice:
                report.witness_failures.append(Violation("witness", h, f"decision {format_element(choice)}"))
            continue
        if choice not in fixed:
            report.violations.append(Violation("not-fixed", h, f"decision {format_element(choice)}"))
        for _ in range(shuffles):
            order = rng.permutation(P.n)
            shuffled = Profile._trusted(tuple(P.votes[i] for i in order), P.m)
            other = resolve(rule, tb, shuffled, dec, priority)
            if other != choice:
                report.violations.append(Violation(
                    "anonymity", h, f"{format_element(choice)} vs {format_element(other)}"))
                break
        fine.append((h, P))

    for h, P in fine:
        choice = decided[h]
        for sigma in perms:
            if tb.is_anonymous:
                image = decided[h.permuted(sigma)]
            else:
                image = resolve(rule, tb, P.permuted(sigma), dec, priority)
            if image != sigma(choice):
                report.violations.append(Violation(
                    "neutrality", h, f"sigma={sigma}: {format_element(image)} != "
                                     f"{format_element(sigma(choice))}"))
                break
    return report
