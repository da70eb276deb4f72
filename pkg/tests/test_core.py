import itertools
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from equivote import (BudgetExceeded, Histogram, Permutation, PriorityOrder, Profile,
                      Setting, Space, SpaceError, apply_perm, enumerate_space, format_element,
                      format_profile, histogram, parse_element, parse_profile,
                      priority_compare, read_profile)
from strategies import m_and_perm, perms, ranking_profiles

DATA = Path(__file__).parent / "data"


def plus():
    return read_profile(DATA / "p_plus.txt")


def r(text):
    return tuple(int(c) for c in text)


class TestPermutation:
    def test_parse_and_print(self):
        s = Permutation.parse("(1,3)(2,4)", 5)
        assert s.image == (3, 4, 1, 2, 5)
        assert str(s) == "(1,3)(2,4)"
        assert str(Permutation.identity(3)) == "()"

    def test_compose_applies_right_first(self):
        a = Permutation.parse("(1,2)", 3)
        b = Permutation.parse("(2,3)", 3)
        assert (a * b)(2) == a(b(2)) == 3
        assert (a * b)(1) == 2 and (b * a)(1) == 3

    def test_order_and_inverse(self):
        s = Permutation.parse("(1,2,3)(4,5)", 5)
        assert s.order() == 6
        assert s.compose(s.inverse()).is_identity()

    @pytest.mark.parametrize("image", [(1, 1, 2), (0, 1), (2, 3)])
    def test_rejects_non_bijection(self, image):
        with pytest.raises(SpaceError):
            Permutation(image)

    def test_rejects_bad_cycle_text(self):
        with pytest.raises(SpaceError):
            Permutation.parse("(1,2", 3)
        with pytest.raises(SpaceError):
            Permutation.parse("(1,2)(2,3)", 3)

    def test_applies_to_committee(self):
        assert apply_perm(Permutation.parse("(1,2)", 3), frozenset({1, 3})) == frozenset({2, 3})

    def test_identity_is_neutral(self):
        P = plus()
        assert apply_perm(Permutation.identity(5), P) == P
        assert apply_perm(Permutation.identity(5), P.histogram) == P.histogram

    def test_worked_profile_image(self):
        h = apply_perm(Permutation.parse("(1,3)(2,4)", 5), plus().histogram)
        expected = {r("12345"): 2, r("12435"): 2, r("21345"): 2, r("21435"): 2,
                    r("31425"): 1, r("41325"): 1}
        assert dict(h) == expected

    def test_unknown_target(self):
        with pytest.raises(TypeError):
            Permutation.identity(2)("x")


@given(m_and_perm(), st.data())
def test_group_action_and_bijectivity(mp, data):
    m, s1 = mp
    s2 = data.draw(perms(m))
    x = tuple(data.draw(st.permutations(range(1, m + 1))))[: data.draw(st.integers(1, m))]
    assert apply_perm(s1, apply_perm(s2, x)) == apply_perm(s1 * s2, x)
    assert apply_perm(s1.inverse(), apply_perm(s1, x)) == x
    c = frozenset(x)
    assert apply_perm(s1, apply_perm(s2, c)) == apply_perm(s1 * s2, c)


@given(ranking_profiles(), st.data())
def test_histogram_commutes_with_permutation(P, data):
    sigma = data.draw(perms(P.m))
    assert histogram(apply_perm(sigma, P)) == apply_perm(sigma, histogram(P))
    # the coordinate rule: [sigma(h)]_R = [h]_{sigma^-1(R)}
    h = P.histogram
    image = h.permuted(sigma)
    inv = sigma.inverse()
    for R in itertools.permutations(range(1, P.m + 1)):
        assert image.count(R) == h.count(inv(R))


class TestSpace:
    def test_parse_forms(self):
        assert Space.parse("Cm", 4) == Space("C", 4, 4)
        assert Space.parse("L<=5", 13) == Space("L", 5, 13, True)
        assert str(Space.parse("L<=5", 13)) == "L<=5"
        with pytest.raises(SpaceError):
            Space.parse("Q2", 3)
        with pytest.raises(SpaceError):
            Space.parse("L5", 3)

    def test_enumeration_examples(self):
        assert enumerate_space(Space("C", 2, 3)) == [frozenset({1, 2}), frozenset({1, 3}),
                                                     frozenset({2, 3})]
        assert enumerate_space(Space("L", 1, 4)) == [(1,), (2,), (3,), (4,)]
        pairs = enumerate_space(Space("L", 2, 4))
        assert len(pairs) == 12 and pairs[0] == (1, 2)

    def test_up_to_spaces_put_short_lists_first(self):
        elems = enumerate_space(Space("L", 2, 3, True))
        assert elems[:3] == [(1,), (2,), (3,)]
        assert len(elems) == 9

    @pytest.mark.parametrize("kind,size,m,count", [("L", 3, 5, 60), ("C", 3, 5, 10),
                                                   ("L", 5, 5, 120)])
    def test_cardinality(self, kind, size, m, count):
        space = Space(kind, size, m)
        assert space.cardinality() == count == len(space.elements())

    def test_cap(self):
        with pytest.raises(BudgetExceeded):
            enumerate_space(Space("L", 9, 9))

    def test_contains(self):
        s = Space("L", 2, 3)
        assert s.contains((1, 3)) and not s.contains((1, 1)) and not s.contains(frozenset({1, 2}))


class TestSetting:
    def test_parse(self):
        s = Setting.parse("C<=5>L1", 13)
        assert s.pref == Space("C", 5, 13, True) and s.dec == Space("L", 1, 13)
        assert str(Setting.parse("Cm>Cm", 3)) == "C3>C3"

    @pytest.mark.parametrize("text,m", [("L2", 3), ("L2>L<=2", 3), ("L1>L1", 1)])
    def test_rejects(self, text, m):
        with pytest.raises(SpaceError):
            Setting.parse(text, m)


class TestPriority:
    def test_worked_ranking_order(self):
        chain = ["12345", "12435", "21345", "21435", "31425", "32415", "41325", "42315"]
        p = PriorityOrder.default(5)
        keys = [p.key(r(x)) for x in chain]
        assert keys == sorted(keys)

    def test_histogram_order_favours_better_image(self):
        h = plus().histogram
        first = h.permuted(Permutation.parse("(1,3)(2,4)", 5))
        second = h.permuted(Permutation.parse("(1,3,2,4)", 5))
        assert priority_compare(first, second) == -1
        assert priority_compare(first, first) == 0

    def test_committees_compare_best_member_first(self):
        p = PriorityOrder.default(4)
        assert p.best([frozenset({2, 3}), frozenset({1, 4})]) == frozenset({1, 4})

    def test_custom_base(self):
        p = PriorityOrder.parse("3>1>2")
        assert p.sort([1, 2, 3]) == [3, 1, 2]
        assert p.best([(1, 2), (3, 2)]) == (3, 2)

    def test_mixed_kinds_rejected(self):
        with pytest.raises(SpaceError):
            PriorityOrder.default(3).key("x")

    @pytest.mark.parametrize("space", [Space("L", 2, 4), Space("C", 2, 4), Space("L", 4, 4),
                                       Space("L", 3, 4, True)])
    def test_strict_total_order(self, space):
        p = PriorityOrder.default(4)
        elems = space.elements()
        keys = [p.key(x) for x in elems]
        assert len(set(keys)) == len(keys)
        for x, y in itertools.combinations(elems, 2):
            assert priority_compare(x, y) == -priority_compare(y, x) != 0

    @given(st.permutations(range(1, 5)))
    def test_total_order_for_any_base(self, base):
        p = PriorityOrder(tuple(base))
        elems = Space("L", 2, 4).elements()
        ordered = p.sort(elems)
        for a, b, c in zip(ordered, ordered[1:], ordered[2:]):
            assert p.compare(a, b) == -1 and p.compare(b, c) == -1 and p.compare(a, c) == -1


class TestProfile:
    def test_histogram_examples(self):
        P = Profile(((1, 2), (2, 1)), 2)
        assert dict(P.histogram) == {(1, 2): 1, (2, 1): 1}
        assert dict(Profile(((1, 2),) * 4, 2).histogram) == {(1, 2): 4}

    def test_mixed_kinds_rejected(self):
        with pytest.raises(SpaceError):
            Profile(((1, 2), frozenset({1})), 2)

    def test_vote_out_of_range(self):
        with pytest.raises(SpaceError):
            Profile(((1, 4),), 3)

    def test_add(self):
        P = Profile(((1, 2),), 2) + Profile(((2, 1),), 2)
        assert P.n == 2

    def test_histogram_hash_ignores_vote_order(self):
        a = Profile(((1, 2, 3), (3, 2, 1)), 3)
        b = Profile(((3, 2, 1), (1, 2, 3)), 3)
        assert a.histogram == b.histogram and hash(a.histogram) == hash(b.histogram)

    def test_representative_roundtrip(self):
        h = plus().histogram
        assert h.representative().histogram == h

    def test_histogram_from_counts(self):
        h = Histogram({(1, 2): 2, (2, 1): 0}, 2)
        assert h.n == 2 and dict(h) == {(1, 2): 2}


class TestText:
    def test_elements(self):
        assert parse_element("1>3>2") == (1, 3, 2)
        assert parse_element("{3,1}") == frozenset({1, 3})
        assert format_element(frozenset({3, 1})) == "{1,3}"
        assert format_element((1, 3, 2)) == "1>3>2"
        with pytest.raises(SpaceError):
            parse_element("1>1")

    def test_profile_file(self):
        P = plus()
        assert P.m == 5 and P.n == 10

    def test_parse_errors_mention_line(self):
        with pytest.raises(SpaceError, match="line 2"):
            parse_profile("1>2\nbad vote\n")
        with pytest.raises(SpaceError):
            parse_profile("# only a comment\n")

    def test_roundtrip(self):
        P = parse_profile("2 x {1,3}\n{2}\n")
        assert parse_profile(format_profile(P), P.m).histogram == P.histogram
