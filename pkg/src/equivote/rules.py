"""Irresolute voting rules and checkers for two of their axioms.

Each rule maps a profile to a non-empty ``frozenset`` of decisions from a
decision space, which defaults to single winners (``L1``).  Score-based
rules produce list and committee outputs from the weak order of scores: a
k-list is returned when scores never increase along it and nothing left
out beats its last entry.  A k-committee is returned when every member
scores at least as high as every non-member.

Ranked pairs and STV break internal ties in every possible way and return
the union of outcomes.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Callable, Iterable
from dataclasses import dataclass
from fractions import Fraction

from .core import (BudgetExceeded, Profile, Space, SpaceError,
                   enumerate_space)

DEFAULT_PUT_CAP = 10**6

Decision = tuple | frozenset


def _decision_space(P: Profile, dec: Space | None) -> Space:
    if dec is None:
        return Space("L", 1, P.m)
    if dec.m != P.m:
        raise SpaceError(f"decision space has m={dec.m}, profile has m={P.m}")
    if dec.upto:
        raise SpaceError("decision spaces must have a fixed size")
    return dec


def _require_full_rankings(P: Profile, rule: str) -> None:
    if not P.is_full_rankings:
        raise SpaceError(f"{rule} needs full rankings over all {P.m} alternatives")


def top_k_extensions(alternatives: Iterable[int], beats: Callable[[int, int], bool],
                     dec: Space) -> frozenset:
    """Top-k parts of all linear extensions of a strict partial order."""
    k = dec.size
    out = set()

    def grow(prefix, remaining):
        if len(prefix) == k:
            out.add(prefix if dec.kind == "L" else frozenset(prefix))
            return
        for a in sorted(remaining):
            if not any(beats(b, a) for b in remaining if b != a):
                grow(prefix + (a,), remaining - {a})

    grow((), frozenset(alternatives))
    return frozenset(out)


def _from_scores(scores: dict, dec: Space) -> frozenset:
    return top_k_extensions(scores, lambda a, b: scores[a] > scores[b], dec)


# ---------------------------------------------------------------------------
# Positional scoring


def scoring_vector(name: str, m: int) -> tuple:
    if name == "plurality":
        return (1,) + (0,) * (m - 1)
    if name == "borda":
        return tuple(range(m - 1, -1, -1))
    if name == "veto":
        return (1,) * (m - 1) + (0,)
    raise ValueError(f"unknown scoring rule {name!r}")


def _check_scoring_vector(s, m: int) -> tuple:
    s = tuple(s)
    if len(s) != m:
        raise SpaceError(f"scoring vector has length {len(s)}, expected m={m}")
    if any(x < y for x, y in zip(s, s[1:])) or not s[0] > s[-1]:
        raise ValueError(f"scoring vector must be non-increasing with s1 > sm: {s}")
    return s


def positional_scores(s, P: Profile) -> dict[int, float]:
    _require_full_rankings(P, "positional scoring")
    s = _check_scoring_vector(s, P.m)
    scores = dict.fromkeys(range(1, P.m + 1), 0)
    for vote, c in P.histogram.items():
        for pos, a in enumerate(vote):
            scores[a] += c * s[pos]
    return scores


def positional_scoring(s, P: Profile, dec: Space | None = None) -> frozenset:
    return _from_scores(positional_scores(s, P), _decision_space(P, dec))


def plurality(P, dec=None):
    return positional_scoring(scoring_vector("plurality", P.m), P, dec)


def borda(P, dec=None):
    return positional_scoring(scoring_vector("borda", P.m), P, dec)


def veto(P, dec=None):
    return positional_scoring(scoring_vector("veto", P.m), P, dec)


# ---------------------------------------------------------------------------
# Pairwise rules


class WeightedMajorityGraph:
    """Pairwise margins: ``g[a, b]`` is #(a over b) minus #(b over a)."""

    __slots__ = ("m", "_w")

    def __init__(self, weights: list[list[int]], m: int):
        self.m = m
        self._w = weights

    def __getitem__(self, ab: tuple[int, int]) -> int:
        a, b = ab
        return self._w[a][b]

    def edges(self):
        for a in range(1, self.m + 1):
            for b in range(1, self.m + 1):
                if a != b:
                    yield a, b, self._w[a][b]

    def as_matrix(self) -> list[list[int]]:
        return [row[1:] for row in self._w[1:]]


def wmg(P: Profile) -> WeightedMajorityGraph:
    _require_full_rankings(P, "the weighted majority graph")
    m = P.m
    w = [[0] * (m + 1) for _ in range(m + 1)]
    for vote, c in P.histogram.items():
        for i, a in enumerate(vote):
            row = w[a]
            for b in vote[i + 1:]:
                row[b] += c
                w[b][a] -= c
    return WeightedMajorityGraph(w, m)


def copeland_scores(alpha, P: Profile) -> dict[int, Fraction]:
    alpha = Fraction(alpha)
    if not 0 <= alpha <= 1:
        raise ValueError(f"Copeland alpha must lie in [0, 1], got {alpha}")
    g = wmg(P)
    scores = dict.fromkeys(range(1, P.m + 1), Fraction(0))
    for a, b, w in g.edges():
        if w > 0:
            scores[a] += 1
        elif w == 0:
            scores[a] += alpha
    return scores


def copeland(alpha, P: Profile, dec: Space | None = None) -> frozenset:
    return _from_scores(copeland_scores(alpha, P), _decision_space(P, dec))


def maximin_scores(P: Profile) -> dict[int, int]:
    g = wmg(P)
    return {a: min(g[a, b] for b in range(1, P.m + 1) if b != a)
            for a in range(1, P.m + 1)}


def maximin(P: Profile, dec: Space | None = None) -> frozenset:
    return _from_scores(maximin_scores(P), _decision_space(P, dec))


def schulze_strengths(P: Profile) -> list[list[int]]:
    """Strongest-path strengths over the margin graph (all edges, any sign)."""
    g = wmg(P)
    m = P.m
    s = [[0] * (m + 1) for _ in range(m + 1)]
    for a, b, w in g.edges():
        s[a][b] = w
    for k in range(1, m + 1):
        for i in range(1, m + 1):
            if i == k:
                continue
            for j in range(1, m + 1):
                if j != i and j != k:
                    via = min(s[i][k], s[k][j])
                    if via > s[i][j]:
                        s[i][j] = via
    return s


def schulze(P: Profile, dec: Space | None = None) -> frozenset:
    s = schulze_strengths(P)
    return top_k_extensions(range(1, P.m + 1), lambda a, b: s[a][b] > s[b][a],
                            _decision_space(P, dec))


def ranked_pairs_put(P: Profile, dec: Space | None = None,
                     cap: int = DEFAULT_PUT_CAP) -> frozenset:
    """Ranked pairs, returning every outcome reachable by some tie order."""
    dec = _decision_space(P, dec)
    g = wmg(P)
    m = P.m
    # Negative edges are skipped: by the time one is reached its reverse
    # has already been decided, so it can never change the final order.
    weights = sorted({w for _, _, w in g.edges() if w >= 0}, reverse=True)
    groups = [tuple((a, b) for a, b, w in g.edges() if w == wt) for wt in weights]

    def lock(closure: frozenset, a: int, b: int) -> frozenset:
        above = {x for x, y in closure if y == a} | {a}
        below = {y for x, y in closure if x == b} | {b}
        return closure | {(x, y) for x in above for y in below}

    memo: dict = {}
    branches = 0

    def run(gi: int, pending: frozenset, closure: frozenset) -> frozenset:
        nonlocal branches
        pending = frozenset(e for e in pending
                            if e not in closure and (e[1], e[0]) not in closure)
        while not pending and gi < len(groups):
            pending = frozenset(e for e in groups[gi]
                                if e not in closure and (e[1], e[0]) not in closure)
            gi += 1
        if not pending:
            wins = {a: sum(1 for x, _ in closure if x == a) for a in range(1, m + 1)}
            return frozenset([tuple(sorted(wins, key=lambda a: -wins[a]))])
        key = (gi, pending, closure)
        if key in memo:
            return memo[key]
        out = set()
        for a, b in sorted(pending):
            branches += 1
            if branches > cap:
                raise BudgetExceeded(f"ranked pairs explored more than {cap} branches")
            out |= run(gi, pending - {(a, b)}, lock(closure, a, b))
        memo[key] = frozenset(out)
        return memo[key]

    orders = run(0, frozenset(), frozenset())
    return _truncate(orders, dec)


def _truncate(orders: Iterable[tuple], dec: Space) -> frozenset:
    k = dec.size
    if dec.kind == "L":
        return frozenset(o[:k] for o in orders)
    return frozenset(frozenset(o[:k]) for o in orders)


def stv_put(P: Profile, dec: Space | None = None, cap: int = DEFAULT_PUT_CAP) -> frozenset:
    """STV with every elimination tie followed; rankings run from last survivor back."""
    _require_full_rankings(P, "STV")
    dec = _decision_space(P, dec)
    items = list(P.histogram.items())
    memo: dict = {}
    branches = 0

    def finish(remaining: frozenset) -> frozenset:
        nonlocal branches
        if len(remaining) == 1:
            return frozenset([tuple(remaining)])
        if remaining in memo:
            return memo[remaining]
        scores = dict.fromkeys(remaining, 0)
        for vote, c in items:
            for a in vote:
                if a in remaining:
                    scores[a] += c
                    break
        low = min(scores.values())
        out = set()
        for a in sorted(remaining):
            if scores[a] == low:
                branches += 1
                if branches > cap:
                    raise BudgetExceeded(f"STV explored more than {cap} branches")
                out.update(order + (a,) for order in finish(remaining - {a}))
        memo[remaining] = frozenset(out)
        return memo[remaining]

    return _truncate(finish(frozenset(range(1, P.m + 1))), dec)


# ---------------------------------------------------------------------------
# Committee ballots and the trivial rule


def approval_scores(P: Profile) -> dict[int, int]:
    if P.kind != "C":
        raise SpaceError("approval needs committee ballots")
    scores = dict.fromkeys(range(1, P.m + 1), 0)
    for vote, c in P.histogram.items():
        for a in vote:
            scores[a] += c
    return scores


def approval(P: Profile, dec: Space | None = None) -> frozenset:
    return _from_scores(approval_scores(P), _decision_space(P, dec))


def trivial_rule(P: Profile, dec: Space | None = None) -> frozenset:
    return frozenset(enumerate_space(_decision_space(P, dec)))


# ---------------------------------------------------------------------------
# Rule specifications

RULE_NAMES = ("plurality", "borda", "veto", "scoring", "copeland", "maximin",
              "rankedpairs", "schulze", "stv", "approval", "trivial")


@dataclass(frozen=True)
class RuleSpec:
    """A named rule plus its parameters, e.g. ``RuleSpec.parse("copeland:0.5")``."""

    name: str
    params: tuple = ()

    @classmethod
    def parse(cls, text: str) -> RuleSpec:
        name, _, arg = text.strip().lower().partition(":")
        if name not in RULE_NAMES:
            raise ValueError(f"unknown rule {text!r}; choose from {', '.join(RULE_NAMES)}")
        if name == "scoring":
            try:
                vec = tuple(Fraction(t) for t in arg.split(","))
            except (ValueError, ZeroDivisionError):
                raise ValueError(f"bad scoring vector in {text!r}") from None
            if len(vec) < 2 or any(x < y for x, y in zip(vec, vec[1:])) or not vec[0] > vec[-1]:
                raise ValueError(f"scoring vector must be non-increasing with s1 > sm: {arg}")
            return cls(name, vec)
        if name == "copeland":
            alpha = Fraction(arg) if arg else Fraction(1, 2)
            if not 0 <= alpha <= 1:
                raise ValueError("Copeland alpha must lie in [0, 1]")
            return cls(name, (alpha,))
        if arg:
            raise ValueError(f"rule {name!r} takes no parameters")
        return cls(name)

    @property
    def needs_full_rankings(self) -> bool:
        return self.name not in ("approval", "trivial")

    def scoring_vector(self, m: int) -> tuple | None:
        if self.name == "scoring":
            return self.params
        if self.name in ("plurality", "borda", "veto"):
            return scoring_vector(self.name, m)
        return None

    def __call__(self, P: Profile, dec: Space | None = None) -> frozenset:
        name = self.name
        if name in ("plurality", "borda", "veto", "scoring"):
            return positional_scoring(self.scoring_vector(P.m), P, dec)
        if name == "copeland":
            return copeland(self.params[0], P, dec)
        if name == "maximin":
            return maximin(P, dec)
        if name == "rankedpairs":
            return ranked_pairs_put(P, dec)
        if name == "schulze":
            return schulze(P, dec)
        if name == "stv":
            return stv_put(P, dec)
        if name == "approval":
            return approval(P, dec)
        return trivial_rule(P, dec)

    def __str__(self) -> str:
        if self.name == "scoring":
            return "scoring:" + ",".join(_num(x) for x in self.params)
        if self.name == "copeland":
            return "copeland:" + _num(self.params[0])
        return self.name


def _num(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else format(float(x), ".12g")


def as_rule(rule) -> RuleSpec:
    return rule if isinstance(rule, RuleSpec) else RuleSpec.parse(str(rule))


# ---------------------------------------------------------------------------
# Axiom checkers


def all_rankings_profile(m: int) -> Profile:
    return Profile(tuple(itertools.permutations(range(1, m + 1))), m)


def check_canceling_out(rule, P: Profile, dec: Space | None = None,
                        cap: int = math.factorial(8)) -> bool:
    """Does adding one copy of every ranking leave the output unchanged?"""
    if math.factorial(P.m) > cap:
        raise BudgetExceeded(f"m!={math.factorial(P.m)} exceeds the cap {cap}")
    rule = as_rule(rule) if not callable(rule) else rule
    return rule(P, dec) == rule(P + all_rankings_profile(P.m), dec)


def check_delta_unanimity(rule, delta: float, A: Iterable[int], P: Profile) -> bool:
    """True iff every single winner lies in ``A``.

    Raises ``ValueError`` when fewer than ``(1 - delta) n`` votes rank the
    members of ``A`` in their top ``|A|`` positions, since the instance
    then says nothing about the rule.
    """
    A = frozenset(A)
    _require_full_rankings(P, "delta-unanimity")
    top = sum(1 for v in P.votes if frozenset(v[:len(A)]) == A)
    if top < (1 - delta) * P.n:
        raise ValueError(f"only {top} of {P.n} votes put {sorted(A)} on top")
    rule = as_rule(rule) if not callable(rule) else rule
    return all(d[0] in A for d in rule(P, Space("L", 1, P.m)))


def delta_threshold(rule, m: int) -> Fraction:
    """Largest delta (exclusive) for which the rule is delta-unanimous."""
    rule = as_rule(rule)
    s = rule.scoring_vector(m)
    if s is not None:
        gap = min(x - y for x, y in zip(s, s[1:]))
        if gap <= 0:
            raise ValueError(f"{rule} has tied adjacent scores; no positive threshold")
        return Fraction(gap) / (Fraction(s[0]) - Fraction(s[-1]) + Fraction(gap))
    if rule.name == "stv":
        return Fraction(1, m + 1)
    if rule.name == "maximin":
        return Fraction(1, m)
    if rule.name in ("copeland", "rankedpairs", "schulze"):
        return Fraction(1, 3)
    raise ValueError(f"no delta-unanimity threshold for {rule}")
