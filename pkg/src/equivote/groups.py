"""Permutation groups stored as explicit element sets.

Everything here works on concrete sets of permutations of ``1..m``.  That
is plenty for the sizes this package targets (``m <= 8`` by default).
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from collections.abc import Iterable
from dataclasses import dataclass
from functools import lru_cache

from .core import (BudgetExceeded, Histogram, Permutation, Profile, Space,
                   SpaceError)

DEFAULT_M_CAP = 8

Partition = tuple[int, ...]


@dataclass(frozen=True)
class PermutationGroup:
    elements: frozenset
    m: int
    generators: tuple = ()

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, sigma) -> bool:
        return sigma in self.elements

    def is_trivial(self) -> bool:
        return len(self.elements) == 1

    def sorted_elements(self) -> list[Permutation]:
        return sorted(self.elements, key=lambda s: s.image)

    def small_generating_set(self) -> list[Permutation]:
        """A short generating set, picked greedily from the sorted elements."""
        gens: list[Permutation] = []
        span = {Permutation.identity(self.m)}
        for sigma in self.sorted_elements():
            if sigma not in span:
                gens.append(sigma)
                span = set(closure(gens, self.m).elements)
            if len(span) == len(self.elements):
                break
        return gens

    def __str__(self) -> str:
        return "{" + ", ".join("Id" if s.is_identity() else str(s)
                               for s in self.sorted_elements()) + "}"


def closure(generators: Iterable[Permutation], m: int | None = None,
            cap: int = math.factorial(DEFAULT_M_CAP)) -> PermutationGroup:
    """Smallest group containing ``generators``."""
    gens = tuple(generators)
    if m is None:
        if not gens:
            raise SpaceError("m is required when there are no generators")
        m = gens[0].m
    if any(g.m != m for g in gens):
        raise SpaceError("generators act on different numbers of alternatives")
    ident = Permutation.identity(m)
    elements = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = g.compose(x)
                if y not in elements:
                    elements.add(y)
                    nxt.append(y)
                    if len(elements) > cap:
                        raise BudgetExceeded(f"group closure exceeds {cap} elements")
        frontier = nxt
    return PermutationGroup(frozenset(elements), m, gens)


@lru_cache(maxsize=None)
def all_permutations(m: int, cap: int = DEFAULT_M_CAP) -> tuple[Permutation, ...]:
    if m > cap:
        raise BudgetExceeded(f"m={m} exceeds the permutation cap m<={cap}")
    return tuple(Permutation._trusted(p) for p in itertools.permutations(range(1, m + 1)))


@lru_cache(maxsize=None)
def symmetric_group(m: int) -> PermutationGroup:
    return PermutationGroup(frozenset(all_permutations(m)), m)


def trivial_group(m: int) -> PermutationGroup:
    return PermutationGroup(frozenset([Permutation.identity(m)]), m)


# ---------------------------------------------------------------------------
# Stabilizers


def stab_histogram(h: Histogram | Profile, method: str = "auto",
                   cap: int = DEFAULT_M_CAP) -> PermutationGroup:
    """All permutations that leave the histogram unchanged.

    ``method="fast"`` is for full rankings only.  A permutation that fixes
    the histogram must send one chosen vote to a vote of equal
    multiplicity, and that target pins the permutation down uniquely, so
    only those few candidates are tested.  ``"generic"`` tests every
    permutation in S_m.
    """
    if isinstance(h, Profile):
        h = h.histogram
    if method == "auto":
        method = "fast" if h.is_full_rankings else "generic"
    if method == "fast":
        if not h.is_full_rankings:
            raise SpaceError("the fast stabilizer needs full-ranking votes")
        elements = _stab_full_rankings(h)
    elif method == "generic":
        items = list(h.items())
        get = h.count
        elements = [s for s in all_permutations(h.m, cap)
                    if all(get(s(v)) == c for v, c in items)]
    else:
        raise ValueError(f"unknown method {method!r}")
    return PermutationGroup(frozenset(elements), h.m)


def _stab_full_rankings(h: Histogram) -> list[Permutation]:
    m = h.m
    by_count = defaultdict(list)
    for vote, c in h.items():
        by_count[c].append(vote)
    # anchor on a vote whose multiplicity class is smallest
    anchor_count = min(by_count, key=lambda c: (len(by_count[c]), c))
    anchor = by_count[anchor_count][0]
    items = list(h.items())
    get = h.count
    out = []
    for target in by_count[anchor_count]:
        img = [0] * (m + 1)
        for a, b in zip(anchor, target):
            img[a] = b
        if all(get(tuple([img[a] for a in v])) == c for v, c in items):
            out.append(Permutation._trusted(tuple(img[1:])))
    return out


# ---------------------------------------------------------------------------
# Orbits and fixed points


def _elements_of(space, m: int):
    if space is None:
        return range(1, m + 1)
    if isinstance(space, Space):
        return space.elements()
    return space


def orbit(G: PermutationGroup, x) -> frozenset:
    return frozenset(g(x) for g in G.elements)


def orbits(G: PermutationGroup, space=None) -> list[frozenset]:
    """Disjoint orbits covering ``space`` (alternatives when ``space`` is None)."""
    seen = set()
    out = []
    for x in _elements_of(space, G.m):
        if x in seen:
            continue
        orb = orbit(G, x)
        seen.update(orb)
        out.append(orb)
    return out


def orbit_sizes(G: PermutationGroup, space=None) -> tuple[int, ...]:
    return tuple(sorted((len(o) for o in orbits(G, space)), reverse=True))


def fixed_points(G: PermutationGroup, space=None) -> frozenset:
    movers = G.generators or tuple(G.elements)
    return frozenset(x for x in _elements_of(space, G.m) if all(g(x) == x for g in movers))


def fpd(P: Profile | Histogram, D: Iterable, stab: PermutationGroup | None = None) -> frozenset:
    """Decisions in ``D`` that every stabilizer of the histogram leaves in place."""
    if stab is None:
        stab = stab_histogram(P)
    return fixed_points(stab, list(D))


# ---------------------------------------------------------------------------
# Partitions and the cyclic groups they induce


def as_partition(parts: Iterable[int]) -> Partition:
    parts = tuple(int(p) for p in parts)
    if not parts or any(p < 1 for p in parts) or list(parts) != sorted(parts, reverse=True):
        raise SpaceError(f"not a partition: {parts}")
    return parts


def partition_permutation(parts: Iterable[int]) -> Permutation:
    """``(1..m1)(m1+1..m1+m2)...``: one cycle per block."""
    parts = as_partition(parts)
    cycles = []
    start = 1
    for p in parts:
        cycles.append(range(start, start + p))
        start += p
    return Permutation.from_cycles(cycles, sum(parts))


def cyclic_group_from_partition(parts: Iterable[int]) -> PermutationGroup:
    return closure([partition_permutation(parts)])


@lru_cache(maxsize=None)
def subgroups(m: int, max_generators: int = 2,
              cap: int = 10_000) -> tuple[PermutationGroup, ...]:
    """Distinct subgroups of S_m that are generated by at most two elements.

    For m <= 5 every subgroup of S_m is two-generated, so the list is complete.
    """
    perms = all_permutations(m)
    found: dict[frozenset, PermutationGroup] = {}

    def add(gens):
        group = closure(gens, m)
        if group.elements not in found:
            found[group.elements] = group
            if len(found) > cap:
                raise BudgetExceeded(f"more than {cap} subgroups")

    add([])
    cyclic = {}
    for g in perms:
        grp = closure([g], m)
        cyclic.setdefault(grp.elements, g)
        add([g])
    if max_generators >= 2:
        reps = list(cyclic.values())
        for i, g in enumerate(reps):
            g_group = found[closure([g], m).elements].elements
            for h in reps[i + 1:]:
                if h in g_group:
                    continue
                add([g, h])
    return tuple(sorted(found.values(),
                        key=lambda G: (G.order, sorted(s.image for s in G.elements))))
