"""Lemma constraints and normalization of terms.

``rewrite_term`` applies, innermost-leftmost and up to a fixpoint:

    ε^m ⤳ ε                      (u^m1)^m2 ⤳ u^(m1·m2)
    u^m1 u^m2 ⤳ u^(m1+m2)        u^m ⤳ ε   if m = 0 is entailed
    u^m ⤳ u  if m = 1 is entailed
    u u^m ⤳ u^(m+1)              u^m u ⤳ u^(m+1)
    w2 (w1 w2)^m ⤳ (w2 w1)^m w2

Every step strictly decreases the measure returned by ``measure``: the
number of power tokens at any depth, then the number of tokens at any
depth, then the per-depth sums of power positions (shallow depths first).
The mirrored rotation is obtained by normalizing reversed terms.
"""

import logging
from dataclasses import dataclass
from typing import FrozenSet, Tuple

from nielsen_strings.terms import (
    CHARACTER_TYPES,
    IntConstraint,
    IntTerm,
    Power,
    Var,
    length,
    powers,
    variables,
)

logger = logging.getLogger(__name__)

_DEPTHS = 8


@dataclass(frozen=True)
class RewriteOutcome:
    term: Tuple
    changed: bool
    used_entailments: FrozenSet = frozenset()


def lemma_constraints(equations):
    """Facts every model satisfies: lengths agree, lengths and exponents
    are non-negative."""
    lemmas = set()
    for equation in equations:
        lemmas.add(IntConstraint.eq(length(equation.lhs), length(equation.rhs)))
        for side in (equation.lhs, equation.rhs):
            for name in variables(side):
                lemmas.add(IntConstraint.ge(length((Var(name),)), 0))
            for power in powers(side):
                lemmas.add(IntConstraint.ge(power.exponent, 0))
    return lemmas


def rewrite_int_constraint(constraint):
    """Normalize a constraint. ``TRUE`` marks it removable, ``FALSE`` ⊥."""
    return constraint.canonical()


def measure(term):
    counts = [0, 0]
    positions = [0] * _DEPTHS
    _measure(term, 0, counts, positions)
    return (counts[0], counts[1], tuple(positions))


def _measure(term, depth, counts, positions):
    for i, token in enumerate(term):
        counts[1] += 1
        if type(token) is Power:
            counts[0] += 1
            positions[min(depth, _DEPTHS - 1)] += i
            _measure(token.base, depth + 1, counts, positions)


def rewrite_term(term, oracle=None):
    """Normalize power tokens in ``term``.

    ``oracle`` answers ``entails(constraint)``; without it only the
    unconditional rules fire.
    """
    used = set()
    current = term
    current_measure = measure(current)
    while True:
        step = _step(current, oracle, used)
        if step is None:
            break
        step_measure = measure(step)
        assert step_measure < current_measure, (current, step)
        current, current_measure = step, step_measure
    return RewriteOutcome(current, current != term, frozenset(used))


def normalize(term):
    return rewrite_term(term).term


def _entailed(oracle, exponent, value, used):
    if exponent.is_constant():
        return exponent.constant == value
    if oracle is None:
        return False
    constraint = IntConstraint.eq(exponent, value)
    if oracle.entails(constraint):
        used.add(constraint)
        return True
    return False


def _step(term, oracle, used):
    for i, token in enumerate(term):
        if type(token) is Power:
            inner = _step(token.base, oracle, used)
            if inner is not None:
                return term[:i] + (Power(inner, token.exponent),) + term[i + 1:]

    for i, token in enumerate(term):
        if type(token) is not Power:
            continue
        base, m = token.base, token.exponent
        before, after = term[:i], term[i + 1:]
        if not base:
            return before + after
        if len(base) == 1 and type(base[0]) is Power:
            inner = base[0]
            return before + (Power(inner.base, inner.exponent * m),) + after
        if _entailed(oracle, m, 0, used):
            return before + after
        if _entailed(oracle, m, 1, used):
            return before + base + after
        if after and type(after[0]) is Power and after[0].base == base:
            merged = Power(base, m + after[0].exponent)
            return before + (merged,) + after[1:]
        n = len(base)
        if after[:n] == base:
            return before + (Power(base, m + 1),) + after[n:]
        if len(before) >= n and before[-n:] == base:
            return before[:-n] + (Power(base, m + 1),) + after
        for k in range(n - 1, 0, -1):
            suffix = base[n - k:]
            if (
                len(before) >= k
                and before[-k:] == suffix
                and all(type(t) in CHARACTER_TYPES for t in suffix)
            ):
                rotated = Power(suffix + base[:n - k], m)
                return before[:-k] + (rotated,) + suffix + after
    return None


def fold_copies(term, base):
    """Fold a leading run of two or more copies of ``base`` into a power.

    Only used when the opposite side of an equation starts with a power
    of ``base``.
    """
    n = len(base)
    if n == 0:
        return term
    copies = 0
    while term[copies * n:(copies + 1) * n] == base:
        copies += 1
    if copies < 2:
        return term
    return (Power(base, IntTerm.const(copies)),) + term[copies * n:]
