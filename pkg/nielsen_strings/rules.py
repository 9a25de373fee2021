"""Equation rewriting and generating rules.

Rules look at the first tokens of both sides. Each equation is read in
four orientations (as is, swapped, reversed, swapped and reversed), so a
rule written for prefixes also handles suffixes and mirrored sides.
Before matching, both sides are normalized in the orientation at hand and
runs of copies of a leading power's base on the other side are folded.

Applications come in three kinds: an in-place rewrite of the equation, a
conflict, or a set of branches for the search to explore.
"""

import dataclasses
import logging
from dataclasses import dataclass
from typing import FrozenSet, Tuple

from nielsen_strings.powers import sdec
from nielsen_strings.rewrite import fold_copies, normalize
from nielsen_strings.terms import (
    CHARACTER_TYPES,
    Branch,
    Char,
    Equation,
    IntConstraint,
    Orientation,
    Power,
    Substitution,
    SymChar,
    Var,
    apply_substitution,
    length,
    variables,
)

logger = logging.getLogger(__name__)

REWRITE = "rewrite"
CONFLICT = "conflict"
GENERATE = "generate"

ELIMINATE = "eliminate"
POWER = "power"
GENERIC = "generic"

RANKS = {CONFLICT: 0, REWRITE: 1, ELIMINATE: 2, POWER: 3, GENERIC: 4}

_UNWIND_DEPTH = 8


@dataclass(frozen=True)
class RuleApplication:
    kind: str
    rule: str
    equation: Equation
    orientation: Orientation = Orientation.AS_IS
    branches: Tuple = ()
    replacement: Tuple = ()
    constraints: FrozenSet = frozenset()
    category: str = GENERIC
    index: int = 0

    @property
    def rank(self):
        if self.kind != GENERATE:
            return RANKS[self.kind]
        if len(self.branches) == 1:
            return RANKS[ELIMINATE]
        return RANKS[self.category]

    def __str__(self):
        return f"{self.rule} on {self.equation} ({self.orientation.value})"


def rule_priority(apps):
    """Conflicts, then rewrites, then single-branch and variable
    eliminating generation, then power handling, then the rest. Ties go
    to fewer branches and then to the leftmost equation."""
    return min(apps, key=lambda a: (a.rank, len(a.branches), a.index))


def _prepare(u, v):
    u, v = normalize(u), normalize(v)
    if v and type(v[0]) is Power:
        u = fold_copies(u, v[0].base)
    if u and type(u[0]) is Power:
        v = fold_copies(v, u[0].base)
    return u, v


def _leading_chars(term):
    end = 0
    while end < len(term) and type(term[end]) is Char:
        end += 1
    return term[:end]


def _clash_at_front(u, v):
    i = 0
    while i < len(u) and i < len(v) and u[i] == v[i]:
        i += 1
    u, v = u[i:], v[i:]
    if not u and not v:
        return False
    if not u or not v:
        rest = u or v
        return type(rest[0]) in CHARACTER_TYPES
    return type(u[0]) is Char and type(v[0]) is Char


def _clashes(u, v):
    """Whether ``u = v`` fails on its first or last differing tokens."""
    return _clash_at_front(u, v) or _clash_at_front(u[::-1], v[::-1])


def _advance(run, positions, term):
    n = len(run)
    for token in term:
        if not positions:
            break
        kind = type(token)
        if kind is Power:
            reach = set(positions)
            frontier = set(positions)
            while frontier:
                frontier = _advance(run, frontier, token.base) - reach
                reach |= frontier
            positions = reach
        else:
            positions = {
                n if p == n else p + 1
                for p in positions
                if p == n or kind is SymChar or run[p] == token.symbol
            }
    return positions


def prefix_compatible(run, base):
    """Whether some unwinding of one copy of ``base`` agrees with the
    concrete ``run`` on their common length."""
    if not isinstance(run, str):
        run = "".join(token.symbol for token in run)
    return bool(_advance(run, {0}, base))


class _Matcher:
    def __init__(self, equation, store, fresh, look_ahead, rewrites_only):
        self.equation = equation
        self.store = store
        self.fresh = fresh
        self.look_ahead = look_ahead
        self.rewrites_only = rewrites_only

    def entails(self, constraint):
        return self.store.entails(constraint)

    def rewrite(self, rule, orientation, u, v, constraints=()):
        return RuleApplication(
            REWRITE,
            rule,
            self.equation,
            orientation,
            replacement=(Equation(u, v),),
            constraints=frozenset(constraints),
            category=REWRITE,
        )

    def conflict(self, rule, orientation):
        return RuleApplication(
            CONFLICT, rule, self.equation, orientation, category=CONFLICT
        )

    def generate(self, rule, category, orientation, branches):
        if self.rewrites_only:
            return None
        return RuleApplication(
            GENERATE,
            rule,
            self.equation,
            orientation,
            branches=tuple(branches),
            category=category,
        )

    def match(self, orientation, u, v, depth=0):
        if not u and not v:
            return None
        if not u:
            return self.empty_side(orientation, v, depth)
        if not v:
            return None
        s, t = u[0], v[0]
        if s == t:
            return self.rewrite("cancel", orientation, u[1:], v[1:])
        ks, kt = type(s), type(t)
        if ks is Char and kt is Char:
            return self.conflict("char-clash", orientation)
        if ks is SymChar and kt in CHARACTER_TYPES:
            if self.rewrites_only:
                return None
            sigma = Substitution(chars={s.name: t})
            return self.generate(
                "symchar-bind", ELIMINATE, orientation, [Branch(sigma)]
            )
        if ks in CHARACTER_TYPES and kt is Var:
            return self.char_vs_var(orientation, s, t)
        if ks in CHARACTER_TYPES and kt is Power:
            return self.char_vs_power(orientation, u, v, depth)
        if ks is Var and kt is Var:
            return self.var_vs_var(orientation, s, t)
        if ks is Var and kt is Power:
            return self.var_vs_power(orientation, s, t)
        if ks is Power and kt is Power:
            if s.base == t.base:
                return self.same_base(orientation, u, v)
            return self.power_vs_power(orientation, u, v, depth)
        return None

    def empty_side(self, orientation, v, depth):
        token = v[0]
        kind = type(token)
        if kind in CHARACTER_TYPES:
            return self.conflict("empty-vs-char", orientation)
        if kind is Var:
            sigma = Substitution.single(token, ())
            return self.generate(
                "empty-vs-var", ELIMINATE, orientation, [Branch(sigma)]
            )
        zero = IntConstraint.eq(token.exponent, 0)
        positive = IntConstraint.gt(token.exponent, 0)
        vanishing = not any(type(t) in CHARACTER_TYPES for t in token.base)
        if vanishing:
            if self.entails(positive):
                return self.unwound(
                    "empty-vs-power", orientation, (), v, positive, depth
                )
            return self.generate(
                "empty-vs-power",
                POWER,
                orientation,
                [
                    Branch(constraints=frozenset({zero})),
                    Branch(
                        constraints=frozenset({positive}),
                        equations=(Equation(token.base, ()),),
                    ),
                ],
            )
        if self.entails(positive):
            return self.conflict("empty-vs-power", orientation)
        return self.rewrite("empty-vs-power", orientation, (), v[1:], {zero})

    def char_vs_var(self, orientation, char, var):
        if self.rewrites_only:
            return None
        tail = self.fresh.var(var)
        return self.generate(
            "char-vs-var",
            GENERIC,
            orientation,
            [
                Branch(Substitution.single(var, ())),
                Branch(Substitution.single(var, (char, tail))),
            ],
        )

    def char_vs_power(self, orientation, u, v, depth):
        power = v[0]
        zero = IntConstraint.eq(power.exponent, 0)
        positive = IntConstraint.gt(power.exponent, 0)
        run = _leading_chars(u)
        if self.look_ahead and run and not prefix_compatible(run, power.base):
            if self.entails(positive):
                return self.conflict("power-mismatch", orientation)
            return self.rewrite("power-mismatch", orientation, u, v[1:], {zero})
        if self.entails(zero):
            return self.rewrite("char-vs-power", orientation, u, v[1:], {zero})
        if self.entails(positive):
            return self.unwound(
                "char-vs-power", orientation, u, v, positive, depth
            )
        return self.generate(
            "char-vs-power",
            POWER,
            orientation,
            [
                Branch(constraints=frozenset({zero})),
                Branch(constraints=frozenset({positive})),
            ],
        )

    def var_vs_var(self, orientation, x, y):
        if self.rewrites_only:
            return None
        x_tail, y_tail = self.fresh.var(x), self.fresh.var(y)
        x_positive = IntConstraint.gt(length((x,)), 0)
        y_positive = IntConstraint.gt(length((y,)), 0)
        x_tail_positive = IntConstraint.gt(length((x_tail,)), 0)
        return self.generate(
            "var-vs-var",
            GENERIC,
            orientation,
            [
                Branch(Substitution.single(x, ())),
                Branch(
                    Substitution.single(y, ()), frozenset({x_positive})
                ),
                Branch(
                    Substitution.single(y, (x, y_tail)),
                    frozenset({x_positive}),
                ),
                Branch(
                    Substitution.single(x, (y, x_tail)),
                    frozenset({y_positive, x_tail_positive}),
                ),
            ],
        )

    def var_vs_power(self, orientation, x, power):
        if self.rewrites_only:
            return None
        tail = self.fresh.var(x)
        branches = [Branch(Substitution.single(x, (power, tail)))]
        for case in sdec((power,), self.fresh):
            branches.append(
                Branch(
                    Substitution.single(x, case.prefix), case.side_conditions
                )
            )
        return self.generate("var-vs-power", POWER, orientation, branches)

    def same_base(self, orientation, u, v):
        base = u[0].base
        m1, m2 = u[0].exponent, v[0].exponent
        ge, lt = IntConstraint.ge(m1, m2), IntConstraint.lt(m1, m2)
        if self.entails(ge):
            return self.rewrite(
                "power-vs-power",
                orientation,
                (Power(base, m1 - m2),) + u[1:],
                v[1:],
                {ge},
            )
        if self.entails(lt):
            return self.rewrite(
                "power-vs-power",
                orientation,
                u[1:],
                (Power(base, m2 - m1),) + v[1:],
                {lt},
            )
        return self.generate(
            "power-vs-power",
            POWER,
            orientation,
            [
                Branch(constraints=frozenset({ge})),
                Branch(constraints=frozenset({lt})),
            ],
        )

    def power_vs_power(self, orientation, u, v, depth):
        power = v[0]
        zero = IntConstraint.eq(power.exponent, 0)
        positive = IntConstraint.gt(power.exponent, 0)
        if self.entails(zero):
            return self.rewrite("power-unwind", orientation, u, v[1:], {zero})
        if self.entails(positive):
            return self.unwound(
                "power-unwind", orientation, u, v, positive, depth
            )
        return self.generate(
            "power-unwind",
            POWER,
            orientation,
            [
                Branch(constraints=frozenset({zero})),
                Branch(constraints=frozenset({positive})),
            ],
        )

    def unwound(self, rule, orientation, u, v, condition, depth):
        """Unwind one copy of the power leading ``v`` and match again.

        The unwound pair is matched right away; handing it back as a
        rewrite would let normalization fold the copy in again.
        """
        if depth >= _UNWIND_DEPTH:
            logger.debug(f"Unwinding depth reached on {self.equation}")
            return None
        power = v[0]
        v = power.base + (Power(power.base, power.exponent - 1),) + v[1:]
        candidates = [
            app
            for app in (
                self.match(orientation, u, v, depth + 1),
                self.match(orientation, v, u, depth + 1),
            )
            if app is not None
        ]
        if not candidates:
            return None
        inner = rule_priority(candidates)
        if inner.kind == CONFLICT:
            return self.conflict(rule, orientation)
        if inner.kind == REWRITE:
            return dataclasses.replace(
                inner, rule=rule, constraints=inner.constraints | {condition}
            )
        return inner

    def apply_look_ahead(self, app, orientation, u, v):
        if len(u) == 1 and type(u[0]) is Var and u[0].name not in variables(v):
            sigma = Substitution.single(u[0], v)
            solved = self.generate("solved-form", ELIMINATE, orientation, ())
            return self.single(solved, "solved-form", Branch(sigma))
        if app is None:
            return None
        if app.rule == "char-vs-var":
            return self.prefix_run(app, u, v)
        if app.rule == "var-vs-var":
            return self.length_order(app, u[0], v[0])
        return app

    def single(self, app, rule, branch):
        return dataclasses.replace(
            app, rule=rule, branches=(branch,), category=ELIMINATE
        )

    def prefix_run(self, app, u, v):
        run = _leading_chars(u)
        var = v[0]
        known = 0
        for k in range(len(run)):
            sigma = Substitution.single(var, run[:k])
            if not _clashes(
                apply_substitution(u, sigma), apply_substitution(v, sigma)
            ):
                break
            known = k + 1
        if not known:
            return app
        tail = self.fresh.var(var)
        sigma = Substitution.single(var, run[:known] + (tail,))
        return self.single(app, "prefix-run", Branch(sigma))

    def length_order(self, app, x, y):
        lx, ly = length((x,)), length((y,))
        if self.entails(IntConstraint.eq(lx, 0)):
            return self.single(
                app, "length-order", Branch(Substitution.single(x, ()))
            )
        if self.entails(IntConstraint.eq(lx, ly)):
            return self.single(
                app, "length-order", Branch(Substitution.single(x, (y,)))
            )
        if self.entails(IntConstraint.gt(lx, ly)):
            tail = self.fresh.var(x)
            return self.single(
                app,
                "length-order",
                Branch(
                    Substitution.single(x, (y, tail)),
                    frozenset({IntConstraint.gt(length((tail,)), 0)}),
                ),
            )
        return app


def _restore(app, orientation):
    if not orientation.is_reversed:
        return app
    return dataclasses.replace(
        app,
        replacement=tuple(e.reversed() for e in app.replacement),
        branches=tuple(b.restored(orientation) for b in app.branches),
    )


def match_rule(
    equation, store, fresh, look_ahead=True, rewrites_only=False, index=0
):
    """The highest-priority rule for ``equation`` over all orientations.

    With ``rewrites_only`` only in-place rewrites and conflicts are
    reported. Returns None when the equation is blocked.
    """
    matcher = _Matcher(equation, store, fresh, look_ahead, rewrites_only)
    apps = []
    for orientation in Orientation:
        oriented = orientation.apply(equation)
        u, v = _prepare(oriented.lhs, oriented.rhs)
        app = matcher.match(orientation, u, v)
        if look_ahead and not rewrites_only:
            if app is None or app.kind == GENERATE:
                app = matcher.apply_look_ahead(app, orientation, u, v)
        if app is None:
            continue
        app = dataclasses.replace(_restore(app, orientation), index=index)
        if app.kind == CONFLICT:
            return app
        apps.append(app)
    return rule_priority(apps) if apps else None
