import logging
from dataclasses import dataclass
from typing import Tuple

from nielsen_strings.terms import (
    Equation,
    Power,
    Var,
    length,
    show,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Split:
    """``u1 u2 = v1 v2`` with ``|u1| - |v1| = d`` entailed, ``d >= 0``."""

    u1: Tuple
    u2: Tuple
    v1: Tuple
    v2: Tuple
    d: int

    def __str__(self):
        return (
            f"{show(self.u1)} | {show(self.u2)} = "
            f"{show(self.v1)} | {show(self.v2)} (d={self.d})"
        )


def _open(term):
    return any(type(t) in (Var, Power) for t in term)


def _eligible(u1, u2, v1, v2, d):
    if d == 0:
        return all(_open(part) for part in (u1, u2, v1, v2))
    if not u1 or not v2:
        return False
    # Taking a whole side only trades the closed part of the other side
    # for padding, which binding the padding undoes.
    if not u2 and (not v1 or not _open(v2)):
        return False
    return bool(v1) or _open(u1)


def _candidates(equation, store):
    lhs, rhs = equation.lhs, equation.rhs
    for i in range(1, len(lhs) + 1):
        for j in range(0, len(rhs) + 1):
            if (i, j) == (len(lhs), len(rhs)):
                continue
            d = store.value_of(length(lhs[:i]) - length(rhs[:j]))
            if d is None:
                continue
            u1, u2, v1, v2 = lhs[:i], lhs[i:], rhs[:j], rhs[j:]
            if d < 0:
                u1, u2, v1, v2 = v1, v2, u1, u2
            if _eligible(u1, u2, v1, v2, abs(d)):
                yield (d != 0, i, j), Split(u1, u2, v1, v2, abs(d))


def find_split(equation, store):
    """The preferred boundary whose length difference the store's
    equalities fix to a constant: d = 0 before d != 0, then the shortest
    left part."""
    best = min(_candidates(equation, store), key=lambda c: c[0], default=None)
    if best is None:
        return None
    split = best[1]
    logger.debug(f"Split {equation} at {split}")
    return split


def decompose(equation, split, fresh):
    """Replace ``equation`` by two equations, padding with ``d`` fresh
    symbolic characters."""
    if split.d == 0:
        return (
            Equation(split.u1, split.v1),
            Equation(split.u2, split.v2),
        )
    padding = tuple(fresh.symchar() for _ in range(split.d))
    return (
        Equation(split.u1, split.v1 + padding),
        Equation(padding + split.u2, split.v2),
    )
