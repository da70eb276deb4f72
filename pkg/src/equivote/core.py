"""Alternatives, preferences, profiles, histograms and the priority order.

Alternatives are the integers ``1..m``.  A k-list is a plain ``tuple`` in
ranked order (``(1, 3, 2)`` reads ``1 > 3 > 2``) and a k-committee is a
``frozenset``.  Decisions use the same encodings, so a single winner is the
1-list ``(a,)``.
"""

from __future__ import annotations

import itertools
import math
import re
from collections import Counter
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Union

Element = Union[tuple, frozenset]

DEFAULT_SPACE_CAP = math.factorial(8)


class EquivoteError(Exception):
    """Base class for errors raised by this package."""


class SpaceError(EquivoteError, ValueError):
    """An object does not belong to the space it was used with."""


class BudgetExceeded(EquivoteError):
    """An enumeration would exceed its configured budget."""


# ---------------------------------------------------------------------------
# Permutations


@dataclass(frozen=True)
class Permutation:
    """A bijection on ``1..m`` stored by its image ``(σ(1), ..., σ(m))``."""

    image: tuple[int, ...]
    _map: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        image = tuple(int(a) for a in self.image)
        if sorted(image) != list(range(1, len(image) + 1)):
            raise SpaceError(f"not a permutation of 1..{len(image)}: {self.image}")
        object.__setattr__(self, "image", image)
        object.__setattr__(self, "_map", (0,) + image)

    @classmethod
    def _trusted(cls, image: tuple[int, ...]) -> Permutation:
        obj = object.__new__(cls)
        object.__setattr__(obj, "image", image)
        object.__setattr__(obj, "_map", (0,) + image)
        return obj

    @classmethod
    def identity(cls, m: int) -> Permutation:
        return cls._trusted(tuple(range(1, m + 1)))

    @classmethod
    def from_cycles(cls, cycles: Iterable[Iterable[int]], m: int) -> Permutation:
        img = list(range(m + 1))
        seen: set[int] = set()
        for cyc in cycles:
            cyc = [int(a) for a in cyc]
            for a in cyc:
                if not 1 <= a <= m or a in seen:
                    raise SpaceError(f"bad cycle {cyc} for m={m}")
                seen.add(a)
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                img[a] = b
        return cls._trusted(tuple(img[1:]))

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, int], m: int) -> Permutation:
        img = [mapping.get(a, a) for a in range(1, m + 1)]
        return cls(tuple(img))

    @classmethod
    def parse(cls, text: str, m: int) -> Permutation:
        """Parse cycle notation such as ``"(1,3)(2,4)"``; ``"()"`` is the identity."""
        text = text.replace(" ", "")
        if not re.fullmatch(r"(\([0-9,]*\))+", text):
            raise SpaceError(f"cannot parse permutation {text!r}")
        cycles = []
        for body in re.findall(r"\(([0-9,]*)\)", text):
            if body:
                cycles.append([int(t) for t in body.split(",")])
        return cls.from_cycles(cycles, m)

    @property
    def m(self) -> int:
        return len(self.image)

    def __call__(self, x):
        mp = self._map
        t = type(x)
        if t is int:
            return mp[x]
        if t is tuple:
            return tuple([mp[a] for a in x])
        if t is frozenset:
            return frozenset([mp[a] for a in x])
        if isinstance(x, (Profile, Histogram)):
            return x.permuted(self)
        if isinstance(x, Permutation):
            return self.compose(x)
        raise TypeError(f"cannot apply a permutation to {type(x).__name__}")

    def compose(self, other: Permutation) -> Permutation:
        """Return ``self ∘ other`` (apply ``other`` first)."""
        mp = self._map
        return Permutation._trusted(tuple([mp[a] for a in other.image]))

    __mul__ = compose

    def inverse(self) -> Permutation:
        inv = [0] * (self.m + 1)
        for a, b in enumerate(self.image, start=1):
            inv[b] = a
        return Permutation._trusted(tuple(inv[1:]))

    def is_identity(self) -> bool:
        return all(a == b for a, b in enumerate(self.image, start=1))

    def cycles(self) -> list[tuple[int, ...]]:
        """Non-trivial cycles, each starting from its smallest element."""
        seen = set()
        out = []
        for start in range(1, self.m + 1):
            if start in seen:
                continue
            cyc = [start]
            seen.add(start)
            nxt = self._map[start]
            while nxt != start:
                cyc.append(nxt)
                seen.add(nxt)
                nxt = self._map[nxt]
            if len(cyc) > 1:
                out.append(tuple(cyc))
        return out

    def order(self) -> int:
        return math.lcm(*(len(c) for c in self.cycles())) if self.cycles() else 1

    def __str__(self) -> str:
        cyc = self.cycles()
        if not cyc:
            return "()"
        return "".join("(" + ",".join(map(str, c)) + ")" for c in cyc)


def apply_perm(sigma: Permutation, x):
    """Apply ``sigma`` to an alternative, preference, decision, profile or histogram."""
    return sigma(x)


# ---------------------------------------------------------------------------
# Preference and decision spaces

_SPACE_RE = re.compile(r"^([LC])(<=)?(m|\d+)$")


@dataclass(frozen=True)
class Space:
    """``L``/``C`` spaces of k-lists or k-committees, optionally of all sizes up to k."""

    kind: str
    size: int
    m: int
    upto: bool = False

    def __post_init__(self):
        if self.kind not in ("L", "C"):
            raise SpaceError(f"unknown space kind {self.kind!r}")
        if self.m < 1 or not 1 <= self.size <= self.m:
            raise SpaceError(f"size {self.size} invalid for m={self.m}")

    @classmethod
    def parse(cls, text: str, m: int) -> Space:
        match = _SPACE_RE.match(text.strip())
        if not match:
            raise SpaceError(f"cannot parse space {text!r}")
        kind, upto, size = match.groups()
        return cls(kind, m if size == "m" else int(size), m, bool(upto))

    @property
    def sizes(self) -> range:
        return range(1, self.size + 1) if self.upto else range(self.size, self.size + 1)

    @property
    def is_full_rankings(self) -> bool:
        return self.kind == "L" and not self.upto and self.size == self.m

    def cardinality(self) -> int:
        count = math.perm if self.kind == "L" else math.comb
        return sum(count(self.m, s) for s in self.sizes)

    def contains(self, x) -> bool:
        want = tuple if self.kind == "L" else frozenset
        if type(x) is not want or len(x) not in self.sizes:
            return False
        return len(set(x)) == len(x) and all(
            type(a) is int and 1 <= a <= self.m for a in x)

    def elements(self, priority: PriorityOrder | None = None,
                 cap: int = DEFAULT_SPACE_CAP) -> list:
        return enumerate_space(self, priority, cap)

    def __str__(self) -> str:
        return f"{self.kind}{'<=' if self.upto else ''}{self.size}"


def enumerate_space(space: Space, priority: PriorityOrder | None = None,
                    cap: int = DEFAULT_SPACE_CAP) -> list:
    """All elements of ``space`` sorted from highest to lowest priority."""
    if space.cardinality() > cap:
        raise BudgetExceeded(
            f"space {space} with m={space.m} has {space.cardinality()} elements (cap {cap})")
    alts = range(1, space.m + 1)
    out: list = []
    for s in space.sizes:
        if space.kind == "L":
            out.extend(itertools.permutations(alts, s))
        else:
            out.extend(frozenset(c) for c in itertools.combinations(alts, s))
    priority = priority or PriorityOrder.default(space.m)
    out.sort(key=priority.key)
    return out


@dataclass(frozen=True)
class Setting:
    """A (preference space, decision space) pair over the same alternatives."""

    pref: Space
    dec: Space

    def __post_init__(self):
        if self.pref.m != self.dec.m:
            raise SpaceError("preference and decision spaces disagree on m")
        if self.pref.m < 2:
            raise SpaceError("a setting needs at least two alternatives")
        if self.dec.upto:
            raise SpaceError("decision spaces must have a fixed size")

    @property
    def m(self) -> int:
        return self.pref.m

    @classmethod
    def parse(cls, text: str, m: int) -> Setting:
        parts = text.replace(" ", "").split(">")
        if len(parts) != 2:
            raise SpaceError(f"cannot parse setting {text!r}; expected e.g. 'L2>L1'")
        return cls(Space.parse(parts[0], m), Space.parse(parts[1], m))

    def __str__(self) -> str:
        return f"{self.pref}>{self.dec}"


# ---------------------------------------------------------------------------
# Priority order


@dataclass(frozen=True)
class PriorityOrder:
    """The order ⊳ induced by a base ranking and its lexicographic extensions.

    ``key`` maps any object to a sort key where smaller means higher
    priority.  Lists compare position by position, committees compare their
    members from most to least preferred, and shorter objects come first in
    mixed-size spaces.  Histograms compare their count vectors with the
    coordinates arranged in priority order, larger counts winning.
    """

    base: tuple[int, ...]
    _rank: tuple[int, ...] = field(init=False, repr=False, compare=False)
    _natural: bool = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        base = tuple(int(a) for a in self.base)
        if sorted(base) != list(range(1, len(base) + 1)):
            raise SpaceError(f"priority base must rank 1..m exactly once: {self.base}")
        rank = [0] * (len(base) + 1)
        for i, a in enumerate(base):
            rank[a] = i
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "_rank", tuple(rank))
        object.__setattr__(self, "_natural", base == tuple(range(1, len(base) + 1)))

    @classmethod
    def default(cls, m: int) -> PriorityOrder:
        return _default_priority(m)

    @classmethod
    def parse(cls, text: str) -> PriorityOrder:
        return cls(tuple(int(t) for t in text.split(">")))

    @property
    def m(self) -> int:
        return len(self.base)

    def key(self, x):
        rank = self._rank
        t = type(x)
        if t is int:
            return rank[x]
        if self._natural:
            # ranks are a - 1, so the alternatives themselves order correctly
            if t is tuple:
                return (len(x), x)
            if t is frozenset:
                return (len(x), tuple(sorted(x)))
        if t is tuple:
            return (len(x), tuple([rank[a] for a in x]))
        if t is frozenset:
            return (len(x), tuple(sorted([rank[a] for a in x])))
        if isinstance(x, Histogram):
            return self.hist_key(x)
        raise SpaceError(f"no priority defined for {type(x).__name__}")

    def hist_key(self, h: Mapping) -> tuple:
        key = self.key
        entries = sorted([(key(r), -c) for r, c in h.items()])
        # the sentinel makes a histogram with extra support rank higher than a prefix
        entries.append(((math.inf,), 0))
        return tuple(entries)

    def compare(self, x, y) -> int:
        """-1 if ``x`` has higher priority than ``y``, 1 if lower, 0 if equal."""
        if type(x) is not type(y) and not (
                isinstance(x, Histogram) and isinstance(y, Histogram)):
            raise SpaceError(f"cannot compare {type(x).__name__} with {type(y).__name__}")
        if isinstance(x, Histogram) and x.kind != y.kind:
            raise SpaceError("cannot compare histograms over different kinds")
        kx, ky = self.key(x), self.key(y)
        return (kx > ky) - (kx < ky)

    def best(self, items: Iterable):
        """The highest-priority item."""
        return min(items, key=self.key)

    def sort(self, items: Iterable) -> list:
        return sorted(items, key=self.key)


@lru_cache(maxsize=None)
def _default_priority(m: int) -> PriorityOrder:
    return PriorityOrder(tuple(range(1, m + 1)))


def priority_compare(x, y, priority: PriorityOrder | None = None) -> int:
    if priority is None:
        m = x.m if isinstance(x, Histogram) else max(_alternatives_of(x) | _alternatives_of(y))
        priority = PriorityOrder.default(m)
    return priority.compare(x, y)


def _alternatives_of(x) -> set[int]:
    if type(x) is int:
        return {x}
    return set(x)


# ---------------------------------------------------------------------------
# Profiles and histograms


def _kind_of(vote) -> str:
    t = type(vote)
    if t is tuple:
        return "L"
    if t is frozenset:
        return "C"
    raise SpaceError(f"a vote must be a tuple (list) or frozenset (committee), got {vote!r}")


def _check_vote(vote, m: int) -> None:
    kind = _kind_of(vote)
    if not vote:
        raise SpaceError("empty vote")
    if kind == "L" and len(set(vote)) != len(vote):
        raise SpaceError(f"repeated alternative in {format_element(vote)}")
    for a in vote:
        if type(a) is not int or not 1 <= a <= m:
            raise SpaceError(f"alternative {a!r} outside 1..{m}")


@dataclass(frozen=True)
class Profile:
    """An ordered sequence of votes over the alternatives ``1..m``."""

    votes: tuple
    m: int

    def __post_init__(self):
        votes = tuple(self.votes)
        if not votes:
            raise SpaceError("a profile needs at least one vote")
        kinds = {_kind_of(v) for v in votes}
        if len(kinds) > 1:
            raise SpaceError("mixed preference kinds in profile")
        for v in votes:
            _check_vote(v, self.m)
        object.__setattr__(self, "votes", votes)

    @classmethod
    def _trusted(cls, votes: tuple, m: int) -> Profile:
        obj = object.__new__(cls)
        object.__setattr__(obj, "votes", votes)
        object.__setattr__(obj, "m", m)
        return obj

    @classmethod
    def from_counts(cls, counts: Mapping | Iterable, m: int,
                    priority: PriorityOrder | None = None) -> Profile:
        return Histogram(counts, m).representative(priority)

    @property
    def n(self) -> int:
        return len(self.votes)

    @property
    def kind(self) -> str:
        return _kind_of(self.votes[0])

    @property
    def is_full_rankings(self) -> bool:
        return self.kind == "L" and all(len(v) == self.m for v in self.votes)

    @cached_property
    def histogram(self) -> Histogram:
        return Histogram._trusted(dict(Counter(self.votes)), self.m)

    def permuted(self, sigma: Permutation) -> Profile:
        if sigma.m != self.m:
            raise SpaceError("permutation and profile disagree on m")
        return Profile._trusted(tuple([sigma(v) for v in self.votes]), self.m)

    def __iter__(self) -> Iterator:
        return iter(self.votes)

    def __len__(self) -> int:
        return len(self.votes)

    def __add__(self, other: Profile) -> Profile:
        if other.m != self.m:
            raise SpaceError("profiles disagree on m")
        return Profile(self.votes + other.votes, self.m)


def histogram(profile: Profile) -> Histogram:
    return profile.histogram


class Histogram(Mapping):
    """Immutable, hashable multiplicity map from votes to positive counts."""

    __slots__ = ("_counts", "m", "_hash", "_n")

    def __init__(self, counts: Mapping | Iterable, m: int):
        items = counts.items() if isinstance(counts, Mapping) else counts
        clean: dict = {}
        kinds = set()
        for vote, c in items:
            if int(c) != c or c < 0:
                raise SpaceError(f"counts must be non-negative integers, got {c!r}")
            if c == 0:
                continue
            _check_vote(vote, m)
            kinds.add(_kind_of(vote))
            clean[vote] = clean.get(vote, 0) + int(c)
        if len(kinds) > 1:
            raise SpaceError("mixed preference kinds in histogram")
        self._set(clean, m)

    def _set(self, counts: dict, m: int) -> None:
        self._counts = counts
        self.m = m
        self._hash = None
        self._n = None

    @classmethod
    def _trusted(cls, counts: dict, m: int) -> Histogram:
        obj = object.__new__(cls)
        obj._set(counts, m)
        return obj

    def __getitem__(self, vote) -> int:
        return self._counts[vote]

    def count(self, vote) -> int:
        return self._counts.get(vote, 0)

    def __iter__(self):
        return iter(self._counts)

    def __len__(self) -> int:
        return len(self._counts)

    def __contains__(self, vote) -> bool:
        return vote in self._counts

    def items(self):
        return self._counts.items()

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._counts.items()))
        return self._hash

    def __eq__(self, other) -> bool:
        if isinstance(other, Histogram):
            return self._counts == other._counts
        if isinstance(other, Mapping):
            return self._counts == dict(other)
        return NotImplemented

    @property
    def n(self) -> int:
        if self._n is None:
            self._n = sum(self._counts.values())
        return self._n

    @property
    def kind(self) -> str | None:
        for vote in self._counts:
            return _kind_of(vote)
        return None

    @property
    def is_full_rankings(self) -> bool:
        return all(type(v) is tuple and len(v) == self.m for v in self._counts)

    def permuted(self, sigma: Permutation) -> Histogram:
        mp = sigma._map
        if self.kind == "C":
            out = {frozenset([mp[a] for a in v]): c for v, c in self._counts.items()}
        else:
            out = {tuple([mp[a] for a in v]): c for v, c in self._counts.items()}
        return Histogram._trusted(out, self.m)

    def representative(self, priority: PriorityOrder | None = None) -> Profile:
        """A profile with this histogram, votes sorted by priority."""
        if not self._counts:
            raise SpaceError("empty histogram has no representative profile")
        priority = priority or PriorityOrder.default(self.m)
        votes = []
        for vote in sorted(self._counts, key=priority.key):
            votes.extend([vote] * self._counts[vote])
        return Profile._trusted(tuple(votes), self.m)

    def __repr__(self) -> str:
        body = ", ".join(f"{format_element(v)}: {c}" for v, c in sorted(
            self._counts.items(), key=lambda vc: PriorityOrder.default(self.m).key(vc[0])))
        return f"Histogram({{{body}}}, m={self.m})"


# ---------------------------------------------------------------------------
# Text encodings


def parse_element(text: str) -> Element:
    """``"1>3>2"`` is a list, ``"{1,3}"`` a committee, ``"3"`` the 1-list ``(3,)``."""
    text = text.strip()
    try:
        if text.startswith("{"):
            if not text.endswith("}"):
                raise ValueError
            body = text[1:-1].strip()
            members = [int(t) for t in body.split(",")] if body else []
            if len(set(members)) != len(members) or not members:
                raise ValueError
            return frozenset(members)
        vote = tuple(int(t) for t in text.split(">"))
        if len(set(vote)) != len(vote):
            raise ValueError
        return vote
    except ValueError:
        raise SpaceError(f"cannot parse vote {text!r}") from None


def format_element(x) -> str:
    if type(x) is int:
        return str(x)
    if type(x) is frozenset:
        return "{" + ",".join(map(str, sorted(x))) + "}"
    return ">".join(map(str, x))


_COUNT_RE = re.compile(r"^(\d+)\s*[xX]\s+(.+)$")


def parse_profile(text: str, m: int | None = None) -> Profile:
    """Parse the line-oriented profile format.

    One vote per line, ``#`` starts a comment and an optional ``COUNT x``
    prefix repeats the vote.  When ``m`` is omitted it is the largest
    alternative mentioned.
    """
    votes = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        count = 1
        match = _COUNT_RE.match(line)
        if match:
            count, line = int(match.group(1)), match.group(2)
        try:
            vote = parse_element(line)
        except SpaceError as exc:
            raise SpaceError(f"line {lineno}: {exc}") from None
        votes.extend([vote] * count)
    if not votes:
        raise SpaceError("profile contains no votes")
    if m is None:
        m = max(max(v) for v in votes)
    return Profile(tuple(votes), m)


def read_profile(path, m: int | None = None) -> Profile:
    with open(path, encoding="utf-8") as fh:
        return parse_profile(fh.read(), m)


def format_profile(profile: Profile) -> str:
    return "\n".join(format_element(v) for v in profile.votes) + "\n"
