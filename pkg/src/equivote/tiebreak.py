"""Tie-breaking mechanisms that turn an irresolute rule into a resolute one.

The most favorable permutation (MFP) mechanism first finds a permutation
that moves the profile's histogram as high as possible in the priority
order.  It then picks, among the winning decisions that every stabilizer
of the histogram leaves in place, the one whose image under that
permutation ranks highest.  If no winning decision is left in place, it
falls back to a simpler backup mechanism.
"""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass, field

from .core import (BudgetExceeded, Histogram, Permutation, PriorityOrder,
                   Profile, Space, SpaceError, format_element)
from .groups import (DEFAULT_M_CAP, PermutationGroup, all_permutations, fpd,
                     stab_histogram)
from .rules import as_rule


def _nonempty(D) -> frozenset:
    D = frozenset(D)
    if not D:
        raise ValueError("cannot break ties in an empty decision set")
    return D


def lexicographic_break(P: Profile, D: Iterable, priority: PriorityOrder | None = None):
    D = _nonempty(D)
    return (priority or PriorityOrder.default(P.m)).best(D)


def fixed_agent_break(P: Profile, D: Iterable, agent: int):
    """Rank ``D`` by the lexicographic extension of one agent's vote (1-based)."""
    D = _nonempty(D)
    if not 1 <= agent <= P.n:
        raise ValueError(f"agent {agent} outside 1..{P.n}")
    vote = P.votes[agent - 1]
    if type(vote) is not tuple or len(vote) != P.m:
        raise SpaceError("the tie-breaking agent must submit a full ranking")
    return PriorityOrder(vote).best(D)


@dataclass
class MFPTrace:
    """What the MFP mechanism saw while deciding."""

    stabilizer: PermutationGroup
    fpd: frozenset
    decision: object
    backup_fired: bool
    sigma: Permutation | None = None
    mpr: tuple = ()
    r_star: tuple | None = None
    witness: Permutation | None = None


def anr_witness(stab: PermutationGroup, decision) -> Permutation | None:
    """A stabilizer element that moves ``decision``, if one exists."""
    for sigma in sorted(stab.elements, key=lambda s: s.image):
        if sigma(decision) != decision:
            return sigma
    return None


def _backup(backup: TieBreaker | None, P, D, priority):
    backup = backup or TieBreaker("lex")
    if backup.kind == "mfp":
        raise ValueError("an MFP backup must not itself be MFP")
    return backup(P, D, priority)


def mfp_trace(P: Profile, D: Iterable, backup: TieBreaker | None = None,
              priority: PriorityOrder | None = None) -> MFPTrace:
    """The polynomial-time MFP procedure for profiles of full rankings."""
    D = _nonempty(D)
    if not P.is_full_rankings:
        raise SpaceError("fast MFP needs full rankings; use mfp_general")
    priority = priority or PriorityOrder.default(P.m)
    h = P.histogram
    stab = stab_histogram(h, "fast")
    fixed = fpd(h, D, stab)
    if not fixed:
        choice = _backup(backup, P, D, priority)
        return MFPTrace(stab, fixed, choice, True, witness=anr_witness(stab, choice))

    top = max(h.values())
    mpr = tuple(priority.sort(v for v, c in h.items() if c == top))
    best = None
    for R in mpr:
        img = [0] * (P.m + 1)
        for a, b in zip(R, priority.base):
            img[a] = b
        sigma = Permutation._trusted(tuple(img[1:]))
        key = priority.hist_key(h.permuted(sigma))
        # strict comparison keeps the highest-priority R among equal images
        if best is None or key < best[0]:
            best = (key, R, sigma)
    _, r_star, sigma = best
    choice = min(fixed, key=lambda d: priority.key(sigma(d)))
    return MFPTrace(stab, fixed, choice, False, sigma=sigma, mpr=mpr, r_star=r_star)


def mfp_fast(P: Profile, D: Iterable, backup: TieBreaker | None = None,
             priority: PriorityOrder | None = None):
    return mfp_trace(P, D, backup, priority).decision


def most_favorable_permutations(P: Profile, priority: PriorityOrder | None = None,
                                cap: int = DEFAULT_M_CAP) -> list[Permutation]:
    """Every permutation that maps the histogram to its highest-priority image."""
    priority = priority or PriorityOrder.default(P.m)
    h = P.histogram
    best_key, best = None, []
    for sigma in all_permutations(P.m, cap):
        key = priority.hist_key(h.permuted(sigma))
        if best_key is None or key < best_key:
            best_key, best = key, [sigma]
        elif key == best_key:
            best.append(sigma)
    return best


def mfp_general_trace(P: Profile, D: Iterable, backup: TieBreaker | None = None,
                      priority: PriorityOrder | None = None,
                      cap: int = DEFAULT_M_CAP) -> MFPTrace:
    """MFP by scanning all of S_m; works for any kind of ballot."""
    D = _nonempty(D)
    if P.m > cap:
        raise BudgetExceeded(f"m={P.m} exceeds the cap {cap} for scanning S_m")
    priority = priority or PriorityOrder.default(P.m)
    h = P.histogram
    stab = stab_histogram(h, "generic", cap)
    fixed = fpd(h, D, stab)
    if not fixed:
        choice = _backup(backup, P, D, priority)
        return MFPTrace(stab, fixed, choice, True, witness=anr_witness(stab, choice))
    sigma = most_favorable_permutations(P, priority, cap)[0]
    choice = min(fixed, key=lambda d: priority.key(sigma(d)))
    return MFPTrace(stab, fixed, choice, False, sigma=sigma)


def mfp_general(P: Profile, D: Iterable, backup: TieBreaker | None = None,
                priority: PriorityOrder | None = None, cap: int = DEFAULT_M_CAP):
    return mfp_general_trace(P, D, backup, priority, cap).decision


@dataclass(frozen=True)
class TieBreaker:
    """``lex``, ``agent:<i>`` or ``mfp[:<backup>]``; plain ``mfp`` backs up with ``lex``."""

    kind: str
    agent: int | None = None
    backup: TieBreaker | None = field(default=None)

    def __post_init__(self):
        if self.kind not in ("lex", "agent", "mfp"):
            raise ValueError(f"unknown tie-breaker kind {self.kind!r}")
        if self.kind == "agent" and (self.agent is None or self.agent < 1):
            raise ValueError("agent tie-breaking needs a 1-based agent index")
        if self.kind == "mfp":
            if self.backup is None:
                object.__setattr__(self, "backup", TieBreaker("lex"))
            elif self.backup.kind == "mfp":
                raise ValueError("an MFP backup must not itself be MFP")

    @classmethod
    def parse(cls, text: str) -> TieBreaker:
        text = text.strip().lower()
        if text == "lex":
            return cls("lex")
        if text.startswith("agent:"):
            try:
                return cls("agent", int(text[6:]))
            except ValueError:
                raise ValueError(f"bad agent index in {text!r}") from None
        if text == "mfp":
            return cls("mfp")
        if text.startswith("mfp:"):
            return cls("mfp", backup=cls.parse(text[4:]))
        raise ValueError(f"unknown tie-breaker {text!r}; use lex, agent:<i>, mfp or mfp:<backup>")

    @property
    def is_anonymous(self) -> bool:
        return self.kind != "agent"

    def trace(self, P: Profile, D: Iterable, priority: PriorityOrder | None = None) -> MFPTrace:
        if self.kind != "mfp":
            raise ValueError("only MFP produces a trace")
        if P.is_full_rankings:
            return mfp_trace(P, D, self.backup, priority)
        return mfp_general_trace(P, D, self.backup, priority)

    def __call__(self, P: Profile, D: Iterable, priority: PriorityOrder | None = None):
        if self.kind == "lex":
            return lexicographic_break(P, D, priority)
        if self.kind == "agent":
            return fixed_agent_break(P, D, self.agent)
        return self.trace(P, D, priority).decision

    def __str__(self) -> str:
        if self.kind == "agent":
            return f"agent:{self.agent}"
        if self.kind == "mfp":
            return "mfp" if self.backup == TieBreaker("lex") else f"mfp:{self.backup}"
        return "lex"


def as_tiebreaker(tb) -> TieBreaker:
    return tb if isinstance(tb, TieBreaker) else TieBreaker.parse(str(tb))


@dataclass
class Resolution:
    winners: frozenset
    decision: object
    problematic: bool
    trace: MFPTrace | None = None

    def describe(self) -> str:
        fmt = format_element
        lines = [f"decision: {fmt(self.decision)}",
                 "winners: " + " ".join(sorted(map(fmt, self.winners)))]
        t = self.trace
        if t is not None:
            gens = t.stabilizer.small_generating_set()
            lines.append("stabilizer order: %d" % t.stabilizer.order)
            lines.append("stabilizer generators: " + (" ".join(map(str, gens)) or "()"))
            lines.append("fixed-point decisions: " + (" ".join(sorted(map(fmt, t.fpd))) or "none"))
            if t.mpr:
                lines.append("most popular rankings: " + " ".join(map(fmt, t.mpr)))
            if t.r_star is not None:
                lines.append(f"chosen ranking: {fmt(t.r_star)}")
            if t.sigma is not None:
                lines.append(f"most favorable permutation: {t.sigma}")
            lines.append(f"backup fired: {'yes' if t.backup_fired else 'no'}")
            if t.witness is not None:
                lines.append(f"anonymity/neutrality witness: {t.witness}")
        lines.append(f"problematic: {'yes' if self.problematic else 'no'}")
        return "\n".join(lines)


def resolve_explain(rule, tb, P: Profile, dec: Space | None = None,
                    priority: PriorityOrder | None = None) -> Resolution:
    rule, tb = as_rule(rule), as_tiebreaker(tb)
    winners = rule(P, dec)
    if tb.kind == "mfp":
        trace = tb.trace(P, winners, priority)
        return Resolution(winners, trace.decision, not trace.fpd, trace)
    decision = tb(P, winners, priority)
    return Resolution(winners, decision, not fpd(P, winners), None)


def resolve(rule, tb, P: Profile, dec: Space | None = None,
            priority: PriorityOrder | None = None):
    """Apply tie-breaker ``tb`` to ``rule(P)``; the result is one decision."""
    rule, tb = as_rule(rule), as_tiebreaker(tb)
    return tb(P, rule(P, dec), priority)
