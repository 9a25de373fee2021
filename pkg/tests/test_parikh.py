import random
import unittest

from nielsen_strings.parikh import (
    MAX,
    MIN,
    ParikhSum,
    count_occurrences,
    crossing,
    enumerate_patterns,
    is_gap,
    is_unbordered,
    parikh_rewrite,
    unsat_filter,
)
from nielsen_strings.terms import Var, chars

from tests import eq, term


class CountTest(unittest.TestCase):
    def test_overlapping_occurrences(self):
        assert count_occurrences("ab", "abababab") == 4
        assert count_occurrences("aa", "aaa") == 2
        assert count_occurrences("ab", "") == 0

    def test_unbordered(self):
        assert is_unbordered("a")
        assert is_unbordered("ab")
        assert is_unbordered("abc")
        assert not is_unbordered("aba")
        assert not is_unbordered("aa")

    def test_gaps(self):
        assert is_gap(term("x a y"), 2)
        assert is_gap(term("a y"), 2)
        assert not is_gap(term("x ab y"), 2)
        assert not is_gap((), 3)
        assert not is_gap(term("abc"), 3)

    def test_crossing(self):
        assert crossing("ab", term("x b y"))
        assert not crossing("ab", term("x c y"))
        assert crossing("ab", term("a y"))


class ParikhRewriteTest(unittest.TestCase):
    def test_upper_bound(self):
        x, y = Var("x"), Var("y")

        assert parikh_rewrite(
            MAX, "ab", term("x a x aabbb y")
        ) == ParikhSum(2, {x: 2, y: 1})

    def test_lower_bound(self):
        x, y = Var("x"), Var("y")

        assert parikh_rewrite(
            MIN, "ab", term("x y ababab x")
        ) == ParikhSum(3, {x: 2, y: 1})

    def test_ground_term(self):
        assert parikh_rewrite(MAX, "ab", chars("abab")) == ParikhSum(2, {})

    def test_single_variable(self):
        expected = ParikhSum(0, {Var("x"): 1})

        assert parikh_rewrite(MAX, "ab", term("x")) == expected
        assert parikh_rewrite(MIN, "ab", term("x")) == expected

    def test_leading_character_bounds_differ(self):
        assert parikh_rewrite(MAX, "ab", term("a x")) == ParikhSum(
            1, {Var("x"): 1}
        )
        assert parikh_rewrite(MIN, "ab", term("a x")) == ParikhSum(
            0, {Var("x"): 1}
        )


class UnsatFilterTest(unittest.TestCase):
    def test_letter_count(self):
        verdict = unsat_filter(eq("x a y", "y b x"))

        assert verdict
        assert verdict.pattern == "a"

    def test_pattern_count(self):
        verdict = unsat_filter(eq("a x a a b b b y", "y a b a b a b x"))

        assert verdict
        assert verdict.pattern == "ab"

    def test_longer_pattern(self):
        equation = eq("x x a c z z b", "z z a b c x x")

        assert "abc" in enumerate_patterns(equation)
        assert unsat_filter(equation)

    def test_only_longest_patterns_are_kept(self):
        assert enumerate_patterns(eq("x abc y", "y x")) == {"abc", "bc"}
        assert enumerate_patterns(eq("x abcd", "x"), max_len=3) == {
            "abc",
            "bcd",
            "cd",
        }

    def test_patterns(self):
        assert "bc" in enumerate_patterns(eq("x abc y", "y bac x"))
        assert enumerate_patterns(eq("x y", "y x")) == frozenset()

    def test_satisfiable_equation_is_not_refuted(self):
        assert not unsat_filter(eq("x x", "y b"))
        assert not unsat_filter(eq("x b x a", "a x b x"))


class GroundCountPropertyTest(unittest.TestCase):
    def test_bounds_are_exact_on_ground_terms(self):
        rng = random.Random(11)
        checked = 0
        while checked < 200:
            w = "".join(rng.choice("ab") for _ in range(rng.randint(1, 3)))
            if not is_unbordered(w):
                continue
            u = "".join(rng.choice("ab") for _ in range(rng.randint(0, 12)))
            expected = ParikhSum(count_occurrences(w, u), {})

            assert parikh_rewrite(MIN, w, chars(u)) == expected, (w, u)
            assert parikh_rewrite(MAX, w, chars(u)) == expected, (w, u)
            checked += 1


class SubstitutionPropertyTest(unittest.TestCase):
    def random_term(self, rng):
        words = ["x", "y", "a", "b"]
        return tuple(
            Var(word) if word in "xy" else chars(word)[0]
            for word in (rng.choice(words) for _ in range(rng.randint(0, 8)))
        )

    def instantiate(self, u, values):
        return "".join(
            values[t.name] if type(t) is Var else t.symbol for t in u
        )

    def test_bounds_hold_for_every_substitution(self):
        rng = random.Random(23)
        checked = 0
        while checked < 300:
            w = rng.choice(["a", "b", "ab", "ba", "aab", "abb", "aabab"])
            u = self.random_term(rng)
            lower = parikh_rewrite(MIN, w, u)
            upper = parikh_rewrite(MAX, w, u)
            if lower is None or upper is None:
                continue
            for _ in range(10):
                values = {
                    name: "".join(
                        rng.choice("ab") for _ in range(rng.randint(0, 4))
                    )
                    for name in ("x", "y")
                }
                actual = count_occurrences(w, self.instantiate(u, values))

                def bound(total):
                    return total.constant + sum(
                        c * count_occurrences(w, values[token.name])
                        for token, c in total.coefficients.items()
                    )

                assert bound(lower) <= actual <= bound(upper), (w, u, values)
            checked += 1

    def test_two_occurrences_cross_one_inner_run(self):
        upper = parikh_rewrite(MAX, "aabab", term("x ba y"))

        assert upper == ParikhSum(2, {Var("x"): 1, Var("y"): 1})
        assert count_occurrences("aabab", "aaba" + "ba" + "abab") == 2
