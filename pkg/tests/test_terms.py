import unittest

from nielsen_strings.errors import ModelVerificationError, SubstitutionError
from nielsen_strings.terms import (
    FALSE,
    TRUE,
    Branch,
    Equation,
    FreshNames,
    IntConstraint,
    IntTerm,
    Model,
    Orientation,
    Power,
    Substitution,
    SymChar,
    Var,
    alphabet_of,
    apply_substitution,
    chars,
    concrete_text,
    consecutive_tokens,
    is_ground,
    length,
    reverse,
    witness_alphabet,
)

from tests import eq, term


class IntTermTest(unittest.TestCase):
    def test_length_of_term(self):
        assert length(term("x a x")) == IntTerm.length_of("x") * 2 + 1

    def test_length_of_power(self):
        m = IntTerm.var("m")
        power = Power(chars("ab"), m)

        assert length((power, Var("x"))) == m * 2 + IntTerm.length_of("x")

    def test_arithmetic_normalizes(self):
        x = IntTerm.length_of("x")

        assert (x + 3) - x == 3
        assert (x - x).is_constant()
        assert str(x * 2 - 1) == "2*|x| - 1"

    def test_substitute_and_evaluate(self):
        m = IntTerm.var("m")
        images = {("int", "m"): IntTerm.const(4)}

        assert (m * m).substitute(images) == 16
        assert (m + 1).evaluate({("int", "m"): 2}) == 3

    def test_evaluate_missing_atom(self):
        with self.assertRaises(KeyError):
            IntTerm.var("m").evaluate({})


class IntConstraintTest(unittest.TestCase):
    def test_canonical_divides_by_gcd(self):
        x = IntTerm.length_of("x")

        assert (
            IntConstraint.eq(x * 2, 4).canonical()
            == IntConstraint.eq(x, 2).canonical()
        )

    def test_canonical_detects_parity_conflict(self):
        x = IntTerm.length_of("x")

        assert IntConstraint.eq(x * 2, 3).canonical() == FALSE

    def test_constant_constraints(self):
        assert IntConstraint.le(1, 2).canonical() == TRUE
        assert IntConstraint.gt(0, 0).canonical() == FALSE
        assert IntConstraint.ge(3, 0).truth is True

    def test_strict_becomes_non_strict(self):
        x = IntTerm.length_of("x")

        assert (
            IntConstraint.lt(x, 3).canonical()
            == IntConstraint.le(x, 2).canonical()
        )

    def test_negations_of_equality(self):
        x = IntTerm.length_of("x")
        negations = IntConstraint.eq(x, 1).negations()

        assert len(negations) == 2
        values = [{("len", "x"): v} for v in (0, 1, 2)]
        assert [any(n.evaluate(v) for n in negations) for v in values] == [
            True,
            False,
            True,
        ]


class TermTest(unittest.TestCase):
    def test_power_base_must_be_ground(self):
        with self.assertRaises(SubstitutionError):
            Power((Var("x"),), IntTerm.var("m"))

    def test_is_ground(self):
        assert is_ground(chars("ab") + (SymChar("o"),))
        assert not is_ground(term("a x"))

    def test_reverse_descends_into_powers(self):
        power = Power(chars("ab"), IntTerm.var("m"))

        assert reverse((Var("x"), power)) == (
            Power(chars("ba"), IntTerm.var("m")),
            Var("x"),
        )

    def test_consecutive_tokens(self):
        power = Power(chars("abc"), IntTerm.var("m"))

        windows = consecutive_tokens((power, Var("x")) + chars("b"))

        assert len(windows) == 12
        assert () in windows
        assert chars("bc") in windows
        assert (power, Var("x")) in windows

    def test_concrete_text(self):
        assert concrete_text(chars("abc")) == "abc"
        assert concrete_text(term("a x")) is None

    def test_equation_str(self):
        assert str(eq("x x", "y b")) == "x x = y b"

    def test_orientation_apply(self):
        equation = eq("x a", "b y")

        assert Orientation.SWAPPED.apply(equation) == eq("b y", "x a")
        assert Orientation.REVERSED.apply(equation) == eq("a x", "y b")
        assert Orientation.SWAPPED_REVERSED.apply(equation) == eq(
            "y b", "a x"
        )

    def test_branch_restored_reverses_images(self):
        sigma = Substitution.single(Var("x"), term("a y"))
        branch = Branch(sigma).restored(Orientation.REVERSED)

        assert branch.substitution.strings == {"x": term("y a")}


class SubstitutionTest(unittest.TestCase):
    def test_identity_bindings_are_dropped(self):
        sigma = Substitution({"x": (Var("x"),)})

        assert sigma.is_identity()

    def test_not_fully_extended(self):
        with self.assertRaises(SubstitutionError):
            Substitution({"x": (Var("y"),), "y": chars("a")})

    def test_apply_to_equation(self):
        sigma = Substitution.single(Var("x"), term("a y"))

        assert apply_substitution(eq("x b", "y x"), sigma) == eq(
            "a y b", "y a y"
        )

    def test_apply_to_constraint(self):
        sigma = Substitution.single(Var("x"), term("a y"))
        constraint = IntConstraint.eq(IntTerm.length_of("x"), 3)

        assert apply_substitution(constraint, sigma) == IntConstraint.eq(
            IntTerm.length_of("y") + 1, 3
        )

    def test_apply_binds_symbolic_characters(self):
        sigma = Substitution(chars={"o": chars("a")[0]})

        assert apply_substitution((SymChar("o"), Var("x")), sigma) == term(
            "a x"
        )


class FreshNamesTest(unittest.TestCase):
    def test_names_are_primed_and_counted(self):
        fresh = FreshNames()

        assert fresh.fresh("x") == "x'1"
        assert fresh.fresh("x") == "x'2"
        assert fresh.var(Var("x'1")) == Var("x'3")
        assert fresh.symchar() == SymChar("o'1")
        assert fresh.int_var() == IntTerm.var("m'1")


class ModelTest(unittest.TestCase):
    def test_unwind_power(self):
        model = Model(strings={"x": "c"}, ints={"m": 2})
        power = Power(chars("ab"), IntTerm.var("m"))

        assert model.unwind((power, Var("x"))) == "ababc"

    def test_verify(self):
        model = Model(strings={"x": "b", "y": "b"})

        assert model.verify([eq("x x", "y b")])

    def test_verify_failure_names_equation(self):
        model = Model(strings={"x": "a", "y": "a"})

        with self.assertRaises(ModelVerificationError) as context:
            model.verify([eq("x x", "y b")])

        assert context.exception.equation == eq("x x", "y b")


class AlphabetTest(unittest.TestCase):
    def test_witness_is_added(self):
        assert witness_alphabet("ab") == ("a", "b", "c")
        assert witness_alphabet("bc") == ("a", "b", "c")

    def test_witness_outside_lowercase(self):
        letters = "abcdefghijklmnopqrstuvwxyz"

        assert witness_alphabet(letters)[-1] == chr(0x100)

    def test_alphabet_of_equations(self):
        assert alphabet_of([eq("x a", "b y")]) == ("a", "b", "c")

    def test_empty_equations(self):
        assert alphabet_of([Equation((), ())]) == ("a",)
