import random
import unittest

from nielsen_strings.intsolver import IntStore
from nielsen_strings.oracle import assignments
from nielsen_strings.rewrite import lemma_constraints
from nielsen_strings.rules import (
    CONFLICT,
    GENERATE,
    REWRITE,
    match_rule,
    prefix_compatible,
    rule_priority,
)
from nielsen_strings.terms import (
    IDENTITY,
    Char,
    Equation,
    FreshNames,
    IntConstraint,
    IntTerm,
    Model,
    Power,
    SymChar,
    Var,
    apply_substitution,
    chars,
    variables,
)

from tests import eq, term

M = IntTerm.var("m")


class MatchRuleTest(unittest.TestCase):
    def setUp(self):
        self.store = IntStore()
        self.fresh = FreshNames()

    def match(self, equation, **kwargs):
        return match_rule(equation, self.store, self.fresh, **kwargs)

    def test_cancel_common_prefix(self):
        app = self.match(eq("a x", "a y"))

        assert app.kind == REWRITE
        assert app.rule == "cancel"
        assert app.replacement == (eq("x", "y"),)

    def test_char_clash(self):
        app = self.match(eq("a x", "b y"))

        assert app.kind == CONFLICT
        assert app.rule == "char-clash"

    def test_empty_side_against_char(self):
        app = self.match(Equation((), chars("a")))

        assert app.kind == CONFLICT
        assert app.rule == "empty-vs-char"

    def test_empty_side_against_variable(self):
        app = self.match(Equation((), (Var("x"),)))

        assert app.kind == GENERATE
        assert len(app.branches) == 1
        assert app.branches[0].substitution.strings == {"x": ()}

    def test_blocked_equation(self):
        assert self.match(Equation((), ())) is None

    def test_symbolic_character_is_bound(self):
        app = self.match(Equation((SymChar("o"), Var("x")), term("a y")))

        assert app.rule == "symchar-bind"
        assert app.branches[0].substitution.chars == {"o": Char("a")}

    def test_rewrites_only_skips_generating_rules(self):
        assert self.match(eq("x x", "y b"), rewrites_only=True) is None

    def test_prefix_run_look_ahead(self):
        app = self.match(eq("x x", "y b"))

        assert app.rule == "prefix-run"
        assert len(app.branches) == 1
        image = app.branches[0].substitution.strings["x"]
        assert len(image) == 2
        assert type(image[0]) is Var
        assert image[1] == Char("b")

    def test_without_look_ahead_fewest_branches_win(self):
        app = self.match(eq("x x", "y b"), look_ahead=False)

        assert app.rule == "char-vs-var"
        assert len(app.branches) == 2

    def test_solved_form(self):
        app = self.match(eq("x", "a y b"))

        assert app.rule == "solved-form"
        assert app.branches[0].substitution.strings == {"x": term("a y b")}

    def test_var_vs_var_branches(self):
        app = self.match(eq("x y", "y x"), look_ahead=False)

        assert app.rule == "var-vs-var"
        assert len(app.branches) == 4

    def test_power_mismatch_drops_power(self):
        equation = Equation(term("a x"), (Power(chars("b"), M), Var("y")))

        app = self.match(equation)

        assert app.kind == REWRITE
        assert app.rule == "power-mismatch"
        assert IntConstraint.eq(M, 0) in app.constraints

    def test_power_mismatch_conflict(self):
        self.store = IntStore([IntConstraint.gt(M, 0)])
        equation = Equation(term("a x"), (Power(chars("b"), M), Var("y")))

        app = self.match(equation)

        assert app.kind == CONFLICT

    def test_char_against_power_splits_on_exponent(self):
        equation = Equation(term("a x"), (Power(chars("a"), M), Var("y")))

        app = self.match(equation, look_ahead=False)

        assert app.rule in ("char-vs-power", "char-vs-var")
        assert app.kind == GENERATE

    def test_same_base_powers_are_compared(self):
        n = IntTerm.var("n")
        self.store = IntStore([IntConstraint.ge(M, n)])
        base = chars("ab")
        equation = Equation(
            (Power(base, M), Var("x")), (Power(base, n), Var("y"))
        )

        app = self.match(equation)

        assert app.kind == REWRITE
        assert app.rule == "power-vs-power"
        assert app.replacement[0].lhs[0] == Power(base, M - n)


class PrefixCompatibleTest(unittest.TestCase):
    def test_compatible_runs(self):
        assert prefix_compatible("ab", chars("ab"))
        assert prefix_compatible("aba", chars("ab"))
        assert prefix_compatible(chars("a"), chars("ab"))

    def test_incompatible_runs(self):
        assert not prefix_compatible("b", chars("ab"))
        assert not prefix_compatible(chars("ac"), chars("ab"))

    def test_symbolic_characters_match_anything(self):
        assert prefix_compatible("c", (SymChar("o"),))

    def test_inner_power_may_vanish(self):
        base = (Power(chars("a"), M),) + chars("b")

        assert prefix_compatible("b", base)
        assert prefix_compatible("aab", base)
        assert not prefix_compatible("c", base)


class RulePriorityTest(unittest.TestCase):
    def test_conflict_beats_everything(self):
        store, fresh = IntStore(), FreshNames()
        apps = [
            match_rule(eq("x y", "y x"), store, fresh, index=0),
            match_rule(eq("a", "b"), store, fresh, index=1),
        ]

        assert rule_priority(apps).kind == CONFLICT
        assert rule_priority(apps).index == 1


def random_side(rng):
    return tuple(
        Var(word) if word in "xy" else Char(word)
        for word in (
            rng.choice(["x", "y", "a", "b"]) for _ in range(rng.randint(0, 4))
        )
    )


def successors(app, equation):
    """``(sigma, equations, constraints)`` for every successor of ``app``."""
    if app.kind == REWRITE:
        return [(IDENTITY, app.replacement, app.constraints)]
    return [
        (
            branch.substitution,
            (apply_substitution(equation, branch.substitution),)
            + branch.equations,
            branch.constraints,
        )
        for branch in app.branches
    ]


class BoundedSemanticsTest(unittest.TestCase):
    max_len = 2

    def models(self, names, equations, constraints=()):
        for values in assignments(sorted(names), self.max_len, "ab"):
            model = Model(strings=values)
            lengths = model.int_values()
            if all(model.satisfies(e) for e in equations) and all(
                c.evaluate(lengths, default=0) for c in constraints
            ):
                yield model

    def preimages(self, names, sigma, equations, constraints):
        """Values of ``names`` produced by bounded successor models."""
        free = set(names) - set(sigma.strings)
        for image in sigma.strings.values():
            free |= variables(image)
        for e in equations:
            free |= e.variables()
        for c in constraints:
            free |= {name for kind, name in c.atoms() if kind == "len"}
        for model in self.models(free, equations, constraints):
            yield tuple(
                model.unwind(sigma.strings.get(name, (Var(name),)))
                for name in names
            )

    def check(self, equation, look_ahead):
        names = sorted(equation.variables())
        store = IntStore(lemma_constraints([equation]))
        app = match_rule(equation, store, FreshNames(), look_ahead=look_ahead)
        if app is None:
            return
        solutions = {
            tuple(model.strings[name] for name in names)
            for model in self.models(names, [equation])
        }
        if app.kind == CONFLICT:
            assert not solutions, (str(equation), app.rule)
            return
        produced = set()
        for sigma, equations, constraints in successors(app, equation):
            for values in self.preimages(names, sigma, equations, constraints):
                model = Model(strings=dict(zip(names, values)))
                assert model.satisfies(equation), (str(equation), app.rule)
                produced.add(values)
        assert solutions <= produced, (str(equation), app.rule)

    def test_rules_keep_exactly_the_solutions(self):
        rng = random.Random(9)
        for _ in range(150):
            equation = Equation(random_side(rng), random_side(rng))
            for look_ahead in (True, False):
                self.check(equation, look_ahead)

    def test_var_vs_var_branches_are_disjoint(self):
        equation = eq("x y", "y x")
        app = match_rule(equation, IntStore(), FreshNames(), look_ahead=False)
        regions = []
        for sigma, _, constraints in successors(app, equation):
            regions.append(
                {
                    values
                    for values in self.preimages(
                        ["x", "y"], sigma, (), constraints
                    )
                    if all(len(v) <= self.max_len for v in values)
                }
            )

        assert len(regions) == 4
        for i, first in enumerate(regions):
            for second in regions[i + 1:]:
                assert not first & second
