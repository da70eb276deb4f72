"""When can no rule be anonymous, neutral and resolute at once?

For list and committee settings the answer reduces to integer partitions of
``m`` and a change-making problem.  Each admissible partition yields a set
of coin values, and the impossibility holds for ``n`` voters exactly when
``n`` can be paid with those coins.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

from .core import Setting, Space, SpaceError
from .groups import PermutationGroup, as_partition, fixed_points, orbit_sizes, subgroups

NEG_INF = -math.inf


def circledast(alpha: int, beta: int) -> int:
    _check_pair(alpha, beta)
    return alpha if beta > 0 else 1


def oslash(alpha: int, beta: int) -> int:
    _check_pair(alpha, beta)
    return math.lcm(alpha, beta) // beta if beta > 0 else 1


def _check_pair(alpha: int, beta: int) -> None:
    if not (alpha >= 1 and alpha >= beta >= 0):
        raise ValueError(f"need alpha >= beta >= 0 and alpha >= 1, got ({alpha}, {beta})")


OPS = {"circledast": circledast, "oslash": oslash}


def _op(op):
    if callable(op):
        return op
    try:
        return OPS[op]
    except KeyError:
        raise ValueError(f"unknown coin operation {op!r}") from None


def combine(parts: Iterable[int], sub: Iterable[int], op) -> tuple[int, ...]:
    """Element-wise ``parts op sub``."""
    f = _op(op)
    return tuple(f(a, b) for a, b in zip(parts, sub, strict=True))


@lru_cache(maxsize=None)
def partitions(m: int) -> tuple[tuple[int, ...], ...]:
    """Partitions of ``m`` in reverse-lexicographic order, ``(m,)`` first."""
    def gen(rest, largest):
        if rest == 0:
            yield ()
            return
        for p in range(min(rest, largest), 0, -1):
            for tail in gen(rest - p, p):
                yield (p,) + tail
    return tuple(gen(m, m))


def _sub_vectors(parts: tuple[int, ...], ell: int):
    ranges = [range(0, min(p, ell) + 1) for p in parts]
    for vec in itertools.product(*ranges):
        if sum(vec) == ell:
            yield vec


def lcmset(parts: Iterable[int], ell: int, op) -> frozenset[int]:
    """lcm of ``parts op sub`` over every ``0 <= sub <= parts`` summing to ``ell``."""
    parts = as_partition(parts)
    if not 1 <= ell <= sum(parts):
        raise ValueError(f"ell={ell} outside 1..{sum(parts)}")
    f = _op(op)
    return frozenset(math.lcm(*(f(a, b) for a, b in zip(parts, vec)))
                     for vec in _sub_vectors(parts, ell))


def feasible(n: int, coins: Iterable[int]) -> bool:
    """Can ``n >= 1`` be written as a non-negative combination of ``coins``?"""
    coins = sorted(set(int(c) for c in coins))
    if not coins or coins[0] < 1:
        raise ValueError("coins must be a non-empty set of positive integers")
    if n < 1:
        return False
    reach = [False] * (n + 1)
    reach[0] = True
    for c in coins:
        for total in range(c, n + 1):
            if reach[total - c]:
                reach[total] = True
    return reach[n]


def subvector_ok(parts: Iterable[int], dec_kind: str, k: int) -> bool:
    parts = as_partition(parts)
    if dec_kind == "L":
        return parts.count(1) < k
    if dec_kind == "C":
        sums = {0}
        for p in parts:
            sums |= {s + p for s in sums}
        return k not in sums
    raise SpaceError(f"unknown decision kind {dec_kind!r}")


def coin_set(parts: Iterable[int], pref: Space) -> frozenset[int]:
    """Coins contributed by one partition for the given preference space.

    For lists of every size up to L only the 1-lists matter, because their
    coins divide those of longer lists.  For committees the coin sets of
    all sizes are pooled.
    """
    parts = as_partition(parts)
    if pref.kind == "L":
        return lcmset(parts, 1 if pref.upto else pref.size, circledast)
    coins: set[int] = set()
    for ell in pref.sizes:
        coins |= lcmset(parts, ell, oslash)
    return frozenset(coins)


def impossibility_witness(setting: Setting, n: int) -> tuple[int, ...] | None:
    """The first partition (reverse-lexicographic) certifying impossibility, else None."""
    for parts in partitions(setting.m):
        if subvector_ok(parts, setting.dec.kind, setting.dec.size) and \
                feasible(n, coin_set(parts, setting.pref)):
            return parts
    return None


def anr_impossible(setting: Setting, n: int) -> bool:
    return impossibility_witness(setting, n) is not None


# ---------------------------------------------------------------------------
# Impossibility for all large n


class AtLarge(NamedTuple):
    verdict: str  # "holds", "holds_not" or "unknown"
    threshold: float | None


def at_large(setting: Setting) -> AtLarge:
    """Does the impossibility hold for every n >= m^2/2?

    Settings with an up-to-L preference space get a definite answer.  For
    fixed-size preferences only a sufficient condition is known, so the
    answer there is "holds" or "unknown".
    """
    m, pref, dec = setting.m, setting.pref, setting.dec
    k = dec.size
    if pref.sizes == range(1, 2) and k == 1:
        # single alternatives on both sides: known exactly whatever the kinds
        ok = m == 5 or m >= 7
        return AtLarge("holds" if ok else "holds_not", m * m / 2 if ok else None)
    if pref.upto:
        ok = _at_large_upto(pref.kind, dec.kind, m, pref.size, k)
        verdict = "holds" if ok else "holds_not"
    else:
        ok = _at_large_exact(pref.kind, dec.kind, m, pref.size, k)
        verdict = "holds" if ok else "unknown"
    return AtLarge(verdict, m * m / 2 if ok else None)


def _at_large_exact(pk: str, dk: str, m: int, ell: int, k: int) -> bool:
    if (pk, dk) == ("L", "L"):
        return m >= 8 and ell <= m / 2 - 2
    if (pk, dk) == ("L", "C"):
        return m >= 12 and ell <= m / 4 - 2 and k <= m - 1
    if (pk, dk) == ("C", "L"):
        return m >= 4 and ell <= m - 2
    return m >= 2 and k <= m - 1 and (ell not in (k, m - k) or ell <= m / 2 - 3)


def _at_large_upto(pk: str, dk: str, m: int, L: int, k: int) -> bool:
    big = m == 5 or m >= 7
    if (pk, dk) == ("L", "L"):
        # at m = 2 the only admissible partition for k = 2 is (2)
        return big or (k >= 2 and m >= 3)
    if (pk, dk) == ("L", "C"):
        return (big and k <= m - 1) or 2 <= k <= m - 2
    if (pk, dk) == ("C", "L"):
        if (m, L, k) in ((2, 1, 2), (3, 2, 1)):
            return False
        return big or max(L, k) >= 2
    return (big and k <= m - 1) or (not set(range(1, L + 1)) <= {k, m - k} and k <= m - 1)


# ---------------------------------------------------------------------------
# Exponents of the violation likelihood


@dataclass(frozen=True)
class AlphaBounds:
    alpha_max: float
    alpha_max_plus: float
    divisor_partitions: tuple = ()
    small_divisors: tuple = ()


def nontrivial_divisors(n: int) -> list[int]:
    return [d for d in range(2, n + 1) if n % d == 0]


def alpha_bounds(m: int, n: int) -> AlphaBounds:
    """Largest ``m!/lcm`` over partitions of ``m`` into divisors of ``n`` (parts >= 2),
    and largest ``m!/d`` over divisors ``1 < d <= m`` of ``n``; ``-inf`` when empty."""
    if m < 2 or n < 1:
        raise ValueError("need m >= 2 and n >= 1")
    fact = math.factorial(m)
    div_eq = tuple(p for p in partitions(m)
                   if min(p) >= 2 and n % math.lcm(*p) == 0)
    div_le = tuple(d for d in nontrivial_divisors(n) if d <= m)
    a = max((fact // math.lcm(*p) for p in div_eq), default=NEG_INF)
    a_plus = max((fact // d for d in div_le), default=NEG_INF)
    return AlphaBounds(a, a_plus, div_eq, div_le)


# ---------------------------------------------------------------------------
# Group formulation


def condition1_witness(setting: Setting, n: int,
                       groups: Iterable[PermutationGroup] | None = None) -> PermutationGroup | None:
    """A group fixing no decision whose preference orbit sizes can pay ``n``."""
    if groups is None:
        candidates = _moving_subgroups(setting)
    else:
        prefs = setting.pref.elements()
        decisions = setting.dec.elements()
        candidates = [(G, orbit_sizes(G, prefs)) for G in groups
                      if not fixed_points(G, decisions)]
    for G, sizes in candidates:
        if feasible(n, sizes):
            return G
    return None


@lru_cache(maxsize=None)
def _moving_subgroups(setting: Setting) -> tuple:
    """Subgroups of S_m that fix no decision, with their preference orbit sizes."""
    prefs = setting.pref.elements()
    decisions = setting.dec.elements()
    return tuple((G, orbit_sizes(G, prefs)) for G in subgroups(setting.m)
                 if not fixed_points(G, decisions))


def condition1_holds(setting: Setting, n: int,
                     groups: Iterable[PermutationGroup] | None = None) -> bool:
    return condition1_witness(setting, n, groups) is not None
