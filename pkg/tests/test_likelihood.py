import itertools
import math
from collections import Counter
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from equivote import Profile, Space, read_profile
from equivote.core import BudgetExceeded
from equivote.likelihood import (ImpartialCulture, Mallows, Mixture, anr_violated,
                                 compositions, count_histograms, estimate_violation,
                                 exact_violation, is_problematic, kendall_tau,
                                 parse_distribution, sample_profile, slope_fit,
                                 theoretical_exponents)
from equivote.oracle import enumerate_histograms
from strategies import ranking_profiles

DATA = Path(__file__).parent / "data"


def brute_problematic_rate(m, n, winners_of):
    """Share of all (m!)^n profiles whose symmetry group fixes no winner."""
    rankings = list(itertools.permutations(range(1, m + 1)))
    perms = list(itertools.permutations(range(1, m + 1)))
    bad = 0
    for votes in itertools.product(rankings, repeat=n):
        counts = Counter(votes)
        sym = []
        for p in perms:
            move = lambda r: tuple(p[a - 1] for a in r)  # noqa: E731
            if Counter(move(v) for v in votes) == counts:
                sym.append(p)
        winners = winners_of(votes)
        if not any(all(p[w - 1] == w for p in sym) for w in winners):
            bad += 1
    return Fraction(bad, len(rankings) ** n)


class TestDistributions:
    def test_kendall_tau(self):
        assert kendall_tau((1, 2, 3), (1, 2, 3)) == 0
        assert kendall_tau((3, 2, 1), (1, 2, 3)) == 3

    def test_ic_is_uniform(self):
        probs = ImpartialCulture(3).probabilities()
        assert len(probs) == 6 and all(p == pytest.approx(1 / 6) for p in probs.values())

    def test_mallows_normaliser(self):
        phi = 0.5
        probs = Mallows(phi, (1, 2, 3)).probabilities()
        z = (1 + phi) * (1 + phi + phi ** 2)
        assert probs[(1, 2, 3)] == pytest.approx(1 / z)
        assert probs[(3, 2, 1)] == pytest.approx(phi ** 3 / z)
        assert sum(probs.values()) == pytest.approx(1)

    def test_mallows_one_is_ic(self):
        probs = Mallows(1.0, (2, 1, 3, 4)).probabilities()
        assert all(p == pytest.approx(1 / 24) for p in probs.values())

    def test_mallows_sampler_matches_probabilities(self):
        d = Mallows(0.4, (1, 2, 3))
        rng = np.random.default_rng(7)
        draws = Counter(d.sample(rng) for _ in range(20000))
        for r, p in d.probabilities().items():
            assert draws[r] / 20000 == pytest.approx(p, abs=0.015)

    def test_ic_sampler_is_roughly_uniform(self):
        rng = np.random.default_rng(3)
        draws = Counter(ImpartialCulture(3).sample(rng) for _ in range(12000))
        assert len(draws) == 6 and all(abs(c / 12000 - 1 / 6) < 0.02 for c in draws.values())

    def test_mixture(self):
        mix = Mixture([(0.5, Mallows(0.1, (1, 2, 3))), (0.5, Mallows(0.1, (3, 2, 1)))])
        probs = mix.probabilities()
        assert probs[(1, 2, 3)] == pytest.approx(probs[(3, 2, 1)])
        with pytest.raises(ValueError):
            Mixture([(0.3, ImpartialCulture(3))])
        with pytest.raises(ValueError):
            Mixture([(0.5, ImpartialCulture(3)), (0.5, ImpartialCulture(4))])

    @pytest.mark.parametrize("text", ["uniform", "mallows:", "mallows:x", "mallows:0.5:1>2",
                                      "mallows:0:1>2>3", "mallows:1.5"])
    def test_parse_errors(self, text):
        with pytest.raises(ValueError):
            parse_distribution(text, 3)

    def test_parse(self):
        assert isinstance(parse_distribution("IC", 3), ImpartialCulture)
        d = parse_distribution("mallows:0.3:3>1>2", 3)
        assert d.reference == (3, 1, 2) and d.phi == 0.3
        assert parse_distribution("mallows:0.3", 4).reference == (1, 2, 3, 4)


class TestSampling:
    def test_deterministic(self):
        d = ImpartialCulture(4)
        assert sample_profile(d, 11, 9) == sample_profile(d, 11, 9)
        assert sample_profile(d, 11, 9) != sample_profile(d, 12, 9)

    def test_per_voter_distributions(self):
        dists = [Mallows(0.001, (1, 2, 3)), Mallows(0.001, (3, 2, 1))]
        P = sample_profile(dists, 0)
        assert P.votes == ((1, 2, 3), (3, 2, 1))

    def test_needs_n(self):
        with pytest.raises(ValueError):
            sample_profile(ImpartialCulture(3), 0)


class TestIndicators:
    def test_worked_profiles(self):
        plus, minus = read_profile(DATA / "p_plus.txt"), read_profile(DATA / "p_minus.txt")
        assert not is_problematic(plus, "veto")
        assert is_problematic(minus, "veto")

    @given(ranking_profiles(m_hi=3, n_max=5))
    def test_problematic_implies_anr_fails_for_fixed_tiebreakers(self, P):
        # a problematic profile defeats every tie-breaker, so lex must fail there too
        if is_problematic(P, "plurality"):
            assert anr_violated(P, "plurality", "lex")
        assert not anr_violated(P, "plurality", "mfp") or is_problematic(P, "plurality")

    @pytest.mark.parametrize("m,n", [(2, 3), (3, 3), (3, 4)])
    def test_problematic_exactly_where_mfp_fails(self, m, n):
        for h in enumerate_histograms(Space("L", m, m), n):
            P = h.representative()
            assert anr_violated(P, "borda", "mfp") == is_problematic(P, "borda")

    @pytest.mark.parametrize("m,n", [(3, 3), (3, 4)])
    def test_problematic_sets_are_nested(self, m, n):
        # a narrower winner set can only make fixed points harder to find
        for h in enumerate_histograms(Space("L", m, m), n):
            P = h.representative()
            if is_problematic(P, "trivial"):
                assert is_problematic(P, "borda")
                assert is_problematic(P, "plurality")


class TestExact:
    def test_histogram_counting(self):
        assert count_histograms(6, 3) == 56
        assert len(list(compositions(3, 6))) == 56
        assert all(sum(c) == 5 for c in compositions(5, 3))

    @pytest.mark.parametrize("n", [1, 3, 5, 7])
    def test_two_alternatives_odd_n(self, n):
        assert exact_violation("plurality", ImpartialCulture(2), n).rate == 0

    def test_two_alternatives_even_n(self):
        # a split electorate is problematic; half of all two-vote profiles are split
        assert exact_violation("plurality", ImpartialCulture(2), 2).rate == 0.5

    @pytest.mark.parametrize("rule,n", [("trivial", 2), ("trivial", 3), ("plurality", 3),
                                        ("borda", 4)])
    def test_against_brute_force(self, rule, n):
        if rule == "trivial":
            winners_of = lambda votes: (1, 2, 3)  # noqa: E731
        elif rule == "plurality":
            def winners_of(votes):
                c = Counter(v[0] for v in votes)
                best = max(c.values())
                return [a for a in (1, 2, 3) if c[a] == best]
        else:
            def winners_of(votes):
                s = Counter()
                for v in votes:
                    for i, a in enumerate(v):
                        s[a] += 2 - i
                best = max(s[a] for a in (1, 2, 3))
                return [a for a in (1, 2, 3) if s[a] == best]
        expected = brute_problematic_rate(3, n, winners_of)
        assert exact_violation(rule, ImpartialCulture(3), n).rate == pytest.approx(float(expected))

    def test_frozen_values(self):
        assert exact_violation("trivial", ImpartialCulture(3), 3).rate == pytest.approx(1 / 18)

    def test_mallows_one_matches_ic(self):
        ic = exact_violation("borda", ImpartialCulture(3), 4).rate
        assert exact_violation("borda", Mallows(1.0, (1, 2, 3)), 4).rate == pytest.approx(ic)

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            exact_violation("borda", ImpartialCulture(4), 8, max_histograms=100)


class TestMonteCarlo:
    def test_deterministic_and_job_independent(self):
        a = estimate_violation("plurality", ImpartialCulture(3), 4, 2500, seed=5)
        b = estimate_violation("plurality", ImpartialCulture(3), 4, 2500, seed=5)
        assert a == b
        assert a.trials == 2500 and not a.exact

    @settings(max_examples=5)
    @given(st.integers(0, 10**6))
    def test_close_to_exact(self, seed):
        exact = exact_violation("plurality", ImpartialCulture(3), 4).rate
        est = estimate_violation("plurality", ImpartialCulture(3), 4, 2000, seed=seed)
        assert abs(est.rate - exact) < 5 * max(est.stderr, 0.005)

    def test_rejects_zero_trials(self):
        with pytest.raises(ValueError):
            estimate_violation("borda", ImpartialCulture(3), 3, 0)

    def test_non_mfp_uses_direct_check(self):
        est = estimate_violation("plurality", ImpartialCulture(3), 3, 200, seed=1, tb="lex")
        mfp = estimate_violation("plurality", ImpartialCulture(3), 3, 200, seed=1)
        assert est.rate >= mfp.rate


class TestExponents:
    def test_values(self):
        assert theoretical_exponents(3, 8) == (-math.inf, -1.5)
        assert theoretical_exponents(5, 12) == (-50, -30)

    def test_slope_fit(self):
        pts = [(n, 3 * n ** -1.5) for n in (10, 20, 40, 80)]
        assert slope_fit(pts) == pytest.approx(-1.5)
        pts = [(n, 0.2) for n in (4, 8, 16)]
        assert slope_fit(pts) == pytest.approx(0, abs=1e-12)

    def test_slope_fit_needs_points(self):
        with pytest.raises(ValueError):
            slope_fit([(4, 0.1), (8, 0.0), (16, 0.05)])
