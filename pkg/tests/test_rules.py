import itertools
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from equivote import (Profile, RuleSpec, Space, approval, borda, copeland, maximin,
                      parse_profile, plurality, ranked_pairs_put, read_profile, schulze,
                      stv_put, trivial_rule, veto, wmg)
from equivote.core import SpaceError
from equivote.rules import (all_rankings_profile, check_canceling_out, check_delta_unanimity,
                            delta_threshold, maximin_scores, positional_scores,
                            top_k_extensions)
from strategies import perms, ranking_profiles

DATA = Path(__file__).parent / "data"
CYCLE = Profile(((1, 2, 3), (2, 3, 1), (3, 1, 2)), 3)
TIE2 = Profile(((1, 2), (2, 1)), 2)
ALL_RANKING_RULES = ("plurality", "borda", "veto", "copeland:0.5", "copeland:0", "copeland:1",
                     "maximin", "rankedpairs", "schulze", "stv", "scoring:3,1,1,0")


def singles(*alts):
    return frozenset((a,) for a in alts)


class TestScoring:
    def test_veto_on_worked_profiles(self):
        assert veto(read_profile(DATA / "p_plus.txt")) == singles(1, 2, 3, 4)
        assert veto(read_profile(DATA / "p_minus.txt")) == singles(1, 2)

    def test_unanimous_plurality(self):
        assert plurality(Profile(((1, 2, 3, 4),) * 3, 4)) == singles(1)

    def test_borda_scores(self):
        assert positional_scores((2, 1, 0), CYCLE) == {1: 3, 2: 3, 3: 3}

    def test_list_and_committee_outputs(self):
        P = Profile(((1, 2, 3), (1, 3, 2)), 3)
        assert borda(P, Space("L", 2, 3)) == {(1, 2), (1, 3)}
        assert borda(P, Space("C", 2, 3)) == {frozenset({1, 2}), frozenset({1, 3})}
        assert borda(P, Space("L", 3, 3)) == {(1, 2, 3), (1, 3, 2)}

    def test_bad_vector(self):
        with pytest.raises(ValueError):
            RuleSpec.parse("scoring:0,1,2")
        with pytest.raises(SpaceError):
            RuleSpec.parse("scoring:2,1,0")(Profile(((1, 2),), 2))

    def test_needs_full_rankings(self):
        with pytest.raises(SpaceError):
            plurality(Profile(((1,),), 2))


class TestMajorityGraph:
    def test_examples(self):
        g = wmg(Profile(((1, 2, 3),) * 2, 3))
        assert g[1, 2] == g[1, 3] == g[2, 3] == 2
        assert wmg(TIE2)[1, 2] == 0
        assert wmg(read_profile(DATA / "p_plus.txt"))[3, 4] == 2

    @given(ranking_profiles())
    def test_antisymmetric(self, P):
        g = wmg(P)
        for a, b, w in g.edges():
            assert g[b, a] == -w
            assert abs(w) <= P.n and (w - P.n) % 2 == 0


class TestPairwiseRules:
    def test_condorcet_winner(self):
        P = Profile(((2, 1, 3), (2, 3, 1), (1, 2, 3)), 3)
        for rule in ("copeland:0", "copeland:0.5", "copeland:1", "maximin", "rankedpairs",
                     "schulze"):
            assert RuleSpec.parse(rule)(P) == singles(2), rule

    def test_symmetric_tie(self):
        for rule in ("copeland:0.5", "maximin", "rankedpairs", "schulze", "stv", "borda"):
            assert RuleSpec.parse(rule)(TIE2) == singles(1, 2), rule

    def test_cycle(self):
        everything = frozenset(itertools.permutations((1, 2, 3)))
        rotations = {(1, 2, 3), (2, 3, 1), (3, 1, 2)}
        assert copeland(1, CYCLE) == singles(1, 2, 3)
        for rule in ("copeland:0.5", "maximin", "schulze", "borda"):
            assert RuleSpec.parse(rule)(CYCLE, Space("L", 3, 3)) == everything, rule
        assert ranked_pairs_put(CYCLE, Space("L", 3, 3)) == rotations
        assert stv_put(CYCLE, Space("L", 3, 3)) == rotations

    def test_maximin_excludes_self(self):
        assert maximin_scores(Profile(((1, 2, 3),), 3)) == {1: 1, 2: -1, 3: -1}

    def test_copeland_alpha_range(self):
        with pytest.raises(ValueError):
            RuleSpec.parse("copeland:2")
        assert RuleSpec.parse("copeland").params == (Fraction(1, 2),)


def ranked_pairs_oracle(P, k):
    """Every strict weight-ordered sequence of non-negative edges, locked greedily."""
    g = wmg(P)
    edges = [(a, b, w) for a, b, w in g.edges() if w >= 0]
    out = set()
    for order in itertools.permutations(edges):
        if any(x[2] < y[2] for x, y in zip(order, order[1:])):
            continue
        locked = set()
        for a, b, _ in order:
            reach = {b}
            stack = [b]
            while stack:
                x = stack.pop()
                for u, v in locked:
                    if u == x and v not in reach:
                        reach.add(v)
                        stack.append(v)
            if a not in reach and (b, a) not in locked:
                locked.add((a, b))
        ranking = sorted(range(1, P.m + 1), key=lambda a: -sum(1 for u, _ in locked if u == a))
        out.add(tuple(ranking[:k]))
    return out


def stv_oracle(P, k):
    out = set()
    for order in itertools.permutations(range(1, P.m + 1)):
        remaining = set(order)
        ok = True
        for a in order[:-1]:
            scores = {x: sum(1 for v in P.votes if next(y for y in v if y in remaining) == x)
                      for x in remaining}
            if scores[a] != min(scores.values()):
                ok = False
                break
            remaining.discard(a)
        if ok:
            out.add(tuple(reversed(order))[:k])
    return out


@given(ranking_profiles(m_lo=3, m_hi=3, n_max=8), st.integers(1, 3))
def test_ranked_pairs_matches_oracle(P, k):
    assert ranked_pairs_put(P, Space("L", k, 3)) == ranked_pairs_oracle(P, k)


@given(ranking_profiles(m_lo=2, m_hi=4, n_max=9), st.integers(1, 2))
def test_stv_matches_oracle(P, k):
    assert stv_put(P, Space("L", k, P.m)) == stv_oracle(P, k)


def test_top_k_extensions_of_partial_order():
    beats = lambda a, b: (a, b) in {(1, 3), (2, 3)}  # noqa: E731
    assert top_k_extensions([1, 2, 3], beats, Space("L", 2, 3)) == {(1, 2), (2, 1)}
    assert top_k_extensions([1, 2, 3], beats, Space("C", 1, 3)) == {frozenset({1}), frozenset({2})}


class TestApprovalAndTrivial:
    def test_committee_example(self):
        P = parse_profile("2 x {2}\n{3}\n2 x {1,3}\n{2,4}\n", 4)
        assert approval(P) == singles(2, 3)

    def test_unanimous_and_all_tied(self):
        assert approval(parse_profile("3 x {4}", 4)) == singles(4)
        assert approval(parse_profile("{1,2}\n{3}\n{4}", 4)) == singles(1, 2, 3, 4)
        assert approval(parse_profile("{1}\n{2}\n{3}", 3)) == singles(1, 2, 3)

    def test_needs_committees(self):
        with pytest.raises(SpaceError):
            approval(CYCLE)

    def test_trivial_rule(self):
        P = Profile(((1,),), 4)
        assert trivial_rule(P) == singles(1, 2, 3, 4)
        assert len(trivial_rule(Profile(((1,),), 3), Space("C", 2, 3))) == 3
        assert len(trivial_rule(Profile(((1,),), 3), Space("L", 2, 3))) == 6


@given(ranking_profiles(m_hi=4, n_max=8), st.data())
def test_rules_are_anonymous_and_neutral(P, data):
    sigma = data.draw(perms(P.m))
    shuffled = Profile(tuple(data.draw(st.permutations(P.votes))), P.m)
    dec = Space("L", min(2, P.m), P.m)
    for name in ALL_RANKING_RULES:
        if name.startswith("scoring") and P.m != 4:
            continue
        rule = RuleSpec.parse(name)
        out = rule(P, dec)
        assert out and rule(shuffled, dec) == out, name
        assert rule(P.permuted(sigma), dec) == frozenset(sigma(d) for d in out), name


class TestAxioms:
    def test_all_rankings_profile(self):
        assert all_rankings_profile(3).n == 6

    @given(ranking_profiles(m_lo=3, m_hi=4, n_max=10))
    def test_canceling_out(self, P):
        for name in ALL_RANKING_RULES:
            if name.startswith("scoring") and P.m != 4:
                continue
            assert check_canceling_out(name, P), name

    def test_canceling_out_with_dictator_rule(self):
        def first_voter(P, dec=None):
            return frozenset([P.votes[0][:1]])
        P = Profile(((2, 1, 3), (1, 2, 3)), 3)
        assert check_canceling_out(first_voter, P)

    def test_thresholds(self):
        assert delta_threshold("borda", 4) == Fraction(1, 4)
        assert delta_threshold("stv", 4) == Fraction(1, 5)
        assert delta_threshold("maximin", 4) == Fraction(1, 4)
        assert delta_threshold("schulze", 5) == Fraction(1, 3)
        with pytest.raises(ValueError):
            delta_threshold("plurality", 3)
        with pytest.raises(ValueError):
            delta_threshold("trivial", 3)

    def test_delta_unanimity(self):
        P = Profile(((1, 2, 3, 4),) * 4 + ((3, 4, 2, 1),), 4)
        assert check_delta_unanimity("borda", 0.24, {1, 2}, P)
        assert check_delta_unanimity("stv", 0.1, {1, 2, 3, 4}, P)

    def test_precondition(self):
        P = Profile(((1, 2, 3),) + ((3, 2, 1),) * 2, 3)
        with pytest.raises(ValueError):
            check_delta_unanimity("borda", 0.2, {1}, P)
