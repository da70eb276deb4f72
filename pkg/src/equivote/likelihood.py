"""How often do tie-broken rules fail anonymity or neutrality on random profiles?

Votes are drawn independently from a distribution over full rankings.  For
MFP tie-breaking a failure happens exactly when the profile is
problematic, so ``is_problematic`` is the indicator being averaged.  Other
tie-breakers are checked directly by permuting voters and alternatives.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import BudgetExceeded, Histogram, PriorityOrder, Profile, Space, SpaceError
from .groups import all_permutations, fpd, stab_histogram
from .impossibility import alpha_bounds
from .rules import as_rule
from .tiebreak import TieBreaker, as_tiebreaker, resolve

CHUNK = 1000


def kendall_tau(r1: Sequence[int], r2: Sequence[int]) -> int:
    pos = {a: i for i, a in enumerate(r2)}
    seq = [pos[a] for a in r1]
    return sum(1 for i, j in itertools.combinations(range(len(seq)), 2) if seq[i] > seq[j])


def _rankings(m: int) -> list[tuple[int, ...]]:
    return list(itertools.permutations(range(1, m + 1)))


class ImpartialCulture:
    def __init__(self, m: int):
        if m < 1:
            raise ValueError("m must be positive")
        self.m = m

    def probabilities(self) -> dict[tuple, float]:
        rankings = _rankings(self.m)
        return dict.fromkeys(rankings, 1 / len(rankings))

    def sample(self, rng: np.random.Generator) -> tuple[int, ...]:
        return tuple((rng.permutation(self.m) + 1).tolist())

    def __str__(self) -> str:
        return "ic"


class Mallows:
    """Mallows model: P(R) is proportional to phi ** kendall_tau(R, reference)."""

    def __init__(self, phi: float, reference: Sequence[int]):
        if not 0 < phi <= 1:
            raise ValueError("Mallows phi must lie in (0, 1]")
        reference = tuple(reference)
        if sorted(reference) != list(range(1, len(reference) + 1)):
            raise ValueError(f"reference must be a full ranking, got {reference}")
        self.phi = phi
        self.reference = reference
        self.m = len(reference)
        # insertion weights for position j when inserting the (i+1)-th item
        self._insert_p = []
        for i in range(self.m):
            w = np.array([phi ** (i - j) for j in range(i + 1)])
            self._insert_p.append(w / w.sum())

    def probabilities(self) -> dict[tuple, float]:
        weights = {r: self.phi ** kendall_tau(r, self.reference) for r in _rankings(self.m)}
        z = sum(weights.values())
        return {r: w / z for r, w in weights.items()}

    def sample(self, rng: np.random.Generator) -> tuple[int, ...]:
        # repeated insertion: item i goes to slot j with weight phi^(i-j)
        out: list[int] = []
        for i, item in enumerate(self.reference):
            j = int(rng.choice(i + 1, p=self._insert_p[i]))
            out.insert(j, item)
        return tuple(out)

    def __str__(self) -> str:
        ref = ">".join(map(str, self.reference))
        return f"mallows:{self.phi:.12g}:{ref}"


class Mixture:
    def __init__(self, components: Sequence[tuple[float, object]]):
        if not components:
            raise ValueError("a mixture needs at least one component")
        weights = np.array([w for w, _ in components], dtype=float)
        if (weights <= 0).any() or abs(weights.sum() - 1) > 1e-9:
            raise ValueError("mixture weights must be positive and sum to 1")
        ms = {d.m for _, d in components}
        if len(ms) != 1:
            raise ValueError("mixture components disagree on m")
        self.m = ms.pop()
        self.weights = weights / weights.sum()
        self.components = [d for _, d in components]

    def probabilities(self) -> dict[tuple, float]:
        out = dict.fromkeys(_rankings(self.m), 0.0)
        for w, d in zip(self.weights, self.components):
            for r, p in d.probabilities().items():
                out[r] += w * p
        return out

    def sample(self, rng: np.random.Generator) -> tuple[int, ...]:
        i = int(rng.choice(len(self.components), p=self.weights))
        return self.components[i].sample(rng)

    def __str__(self) -> str:
        return "mix(" + ";".join(f"{w:.12g}*{d}" for w, d in zip(self.weights, self.components)) + ")"


def parse_distribution(text: str, m: int):
    """``ic``, ``mallows:<phi>`` or ``mallows:<phi>:<reference ranking>``."""
    text = text.strip().lower()
    if text == "ic":
        return ImpartialCulture(m)
    if text.startswith("mallows:"):
        parts = text.split(":")
        try:
            phi = float(parts[1])
            ref = tuple(int(t) for t in parts[2].split(">")) if len(parts) > 2 else tuple(range(1, m + 1))
        except (ValueError, IndexError):
            raise ValueError(f"cannot parse distribution {text!r}") from None
        if len(ref) != m:
            raise ValueError(f"reference ranking must cover all {m} alternatives")
        return Mallows(phi, ref)
    raise ValueError(f"unknown distribution {text!r}; use ic or mallows:<phi>[:<ref>]")


def sample_profile(dists, seed, n: int | None = None) -> Profile:
    """Draw vote ``i`` from ``dists[i]``; a single distribution is used for all ``n`` votes."""
    if not isinstance(dists, Sequence):
        if n is None:
            raise ValueError("n is required with a single distribution")
        dists = [dists] * n
    if not dists:
        raise ValueError("need at least one vote")
    ms = {d.m for d in dists}
    if len(ms) != 1:
        raise SpaceError("distributions disagree on m")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return Profile._trusted(tuple(d.sample(rng) for d in dists), ms.pop())


# ---------------------------------------------------------------------------
# Violation indicators


def is_problematic(P: Profile, rule, dec: Space | None = None) -> bool:
    """True iff every stabilizer-fixed winner set is empty."""
    winners = as_rule(rule)(P, dec)
    return not fpd(P, winners, stab_histogram(P.histogram))


def anr_violated(P: Profile, rule, tb, dec: Space | None = None,
                 priority: PriorityOrder | None = None) -> bool:
    """Directly test anonymity and neutrality of ``tb * rule`` at ``P``.

    Neutrality is checked against every permutation of the alternatives.
    Anonymity is checked by moving each distinct vote into the first and
    last slots and, for agent tie-breaking, into the agent's slot.  The
    tie-breakers here look at no other voter positions.
    """
    rule, tb = as_rule(rule), as_tiebreaker(tb)
    base = resolve(rule, tb, P, dec, priority)
    for sigma in all_permutations(P.m):
        if resolve(rule, tb, P.permuted(sigma), dec, priority) != sigma(base):
            return True
    slots = {0, P.n - 1}
    if tb.kind == "agent":
        slots.add(tb.agent - 1)
    for vote in set(P.votes):
        i = P.votes.index(vote)
        for j in slots:
            votes = list(P.votes)
            votes[i], votes[j] = votes[j], votes[i]
            if resolve(rule, tb, Profile._trusted(tuple(votes), P.m), dec, priority) != base:
                return True
    return False


def _violation(P, rule, tb: TieBreaker, dec) -> bool:
    if tb.kind == "mfp":
        return is_problematic(P, rule, dec)
    return anr_violated(P, rule, tb, dec)


# ---------------------------------------------------------------------------
# Estimators


@dataclass(frozen=True)
class ViolationEstimate:
    rate: float
    trials: int
    stderr: float
    exact: bool


def _chunk_hits(args) -> int:
    rule, tb, dist, n, seed, chunk, size, dec = args
    rng = np.random.default_rng([seed, chunk])
    hits = 0
    for _ in range(size):
        P = sample_profile([dist] * n, rng)
        hits += _violation(P, rule, tb, dec)
    return hits


def estimate_violation(rule, dist, n: int, trials: int, seed: int = 0,
                       tb="mfp", dec: Space | None = None, jobs: int = 1) -> ViolationEstimate:
    """Monte Carlo estimate with binomial standard error.

    Trials are cut into fixed chunks of 1000; chunk ``c`` draws from
    ``default_rng([seed, c])``, so the result does not depend on ``jobs``.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rule, tb = as_rule(rule), as_tiebreaker(tb)
    tasks = []
    for c, start in enumerate(range(0, trials, CHUNK)):
        tasks.append((rule, tb, dist, n, seed, c, min(CHUNK, trials - start), dec))
    if jobs > 1 and len(tasks) > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            hits = sum(pool.map(_chunk_hits, tasks))
    else:
        hits = sum(map(_chunk_hits, tasks))
    rate = hits / trials
    return ViolationEstimate(rate, trials, math.sqrt(rate * (1 - rate) / trials), False)


def count_histograms(support: int, n: int) -> int:
    return math.comb(n + support - 1, support - 1)


def compositions(n: int, parts: int):
    """All tuples of ``parts`` non-negative integers summing to ``n``."""
    for bars in itertools.combinations(range(n + parts - 1), parts - 1):
        prev = -1
        out = []
        for b in bars:
            out.append(b - prev - 1)
            prev = b
        out.append(n + parts - 1 - prev - 1)
        yield tuple(out)


def exact_violation(rule, dist, n: int, tb="mfp", dec: Space | None = None,
                    max_histograms: int = 10**7) -> ViolationEstimate:
    """Total probability of the histograms at which the tie-broken rule fails."""
    rule, tb = as_rule(rule), as_tiebreaker(tb)
    probs = dist.probabilities()
    rankings = sorted(probs)
    if count_histograms(len(rankings), n) > max_histograms:
        raise BudgetExceeded(
            f"{count_histograms(len(rankings), n)} histograms exceed the budget {max_histograms}")
    uniform = isinstance(dist, ImpartialCulture)
    logp = [math.log(probs[r]) for r in rankings]
    log_nfact = math.lgamma(n + 1)
    total, ways = 0.0, 0
    for counts in compositions(n, len(rankings)):
        h = Histogram._trusted({r: c for r, c in zip(rankings, counts) if c}, dist.m)
        if not _violation(h.representative(), rule, tb, dec):
            continue
        if uniform:
            ways += _multinomial(n, counts)
        else:
            total += math.exp(log_nfact + sum(c * lq - math.lgamma(c + 1)
                                              for c, lq in zip(counts, logp) if c))
    if uniform:
        # every profile is equally likely, so count them exactly
        total = float(Fraction(ways, len(rankings) ** n))
    return ViolationEstimate(min(total, 1.0), 0, 0.0, True)


def _multinomial(n: int, counts) -> int:
    out = math.factorial(n)
    for c in counts:
        out //= math.factorial(c)
    return out


def theoretical_exponents(m: int, n: int) -> tuple[float, float]:
    b = alpha_bounds(m, n)
    fact = math.factorial(m)
    return ((b.alpha_max - fact) / 2, (b.alpha_max_plus - fact) / 2)


def slope_fit(rates: Sequence[tuple[float, float]]) -> float:
    """Least-squares slope of log(rate) against log(n)."""
    pts = [(n, r) for n, r in rates if r > 0]
    if len(pts) < 3:
        raise ValueError("slope fitting needs at least three positive rates")
    x = np.log([n for n, _ in pts])
    y = np.log([r for _, r in pts])
    return float(np.polyfit(x, y, 1)[0])
