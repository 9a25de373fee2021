"""Ground power introduction.

A chain of equations ``w_i x_(i-1) u_i = x_i v_i`` closing on itself
forces every ``x_i`` to be a power of the rotation ``w̄_i`` of the joint
ground prefix, followed by a strict prefix of it. ``detect_chain`` finds
such cycles and ``introduce_powers`` turns them into branches.
"""

import logging
from dataclasses import dataclass
from typing import FrozenSet, Tuple

from nielsen_strings.errors import SubstitutionError
from nielsen_strings.terms import (
    CHARACTER_TYPES,
    Branch,
    Equation,
    IntConstraint,
    Orientation,
    Power,
    Substitution,
    Var,
    is_ground,
    show,
)

logger = logging.getLogger(__name__)

_PREFIX_ORIENTATIONS = (Orientation.AS_IS, Orientation.SWAPPED)
_SUFFIX_ORIENTATIONS = (Orientation.REVERSED, Orientation.SWAPPED_REVERSED)


@dataclass(frozen=True)
class PrefixCase:
    prefix: Tuple
    side_conditions: FrozenSet = frozenset()

    def __str__(self):
        conditions = ", ".join(sorted(str(s) for s in self.side_conditions))
        return f"<{show(self.prefix)}, {{{conditions}}}>"


@dataclass(frozen=True)
class ChainLink:
    """``w x_prev u = x v`` read in ``orientation``."""

    index: int
    orientation: Orientation
    ground: Tuple
    consumed: Var
    produced: Var


@dataclass(frozen=True)
class CyclicChain:
    links: Tuple

    @property
    def reversed(self):
        return self.links[0].orientation.is_reversed

    def rotation(self, i):
        """``w_i w_(i-1) ... w_1 w_k ... w_(i+1)`` for the 0-based link i."""
        k = len(self.links)
        order = list(range(i, -1, -1)) + list(range(k - 1, i, -1))
        return sum((self.links[j].ground for j in order), ())

    def __len__(self):
        return len(self.links)


def sdec(w, fresh):
    """Strict prefixes of ground ``w`` with their exponent side conditions.

    Every power token in ``w`` gets its own fresh exponent ``m'`` bounded
    by ``0 <= m' < m``.
    """
    if not is_ground(w):
        raise SubstitutionError(f"Prefix analysis of non-ground {show(w)}")
    cases = []
    for i, token in enumerate(w):
        head = w[:i]
        if type(token) is Power:
            exponent = fresh.int_var()
            bounds = frozenset(
                {
                    IntConstraint.ge(exponent, 0),
                    IntConstraint.lt(exponent, token.exponent),
                }
            )
            for case in sdec(token.base, fresh):
                cases.append(
                    PrefixCase(
                        head + (Power(token.base, exponent),) + case.prefix,
                        case.side_conditions | bounds,
                    )
                )
        else:
            cases.append(PrefixCase(head))
    return tuple(cases)


def _links(equations, orientations):
    for index, equation in enumerate(equations):
        for orientation in orientations:
            oriented = orientation.apply(equation)
            a, b = oriented.lhs, oriented.rhs
            if not b or type(b[0]) is not Var:
                continue
            split = next(
                (i for i, t in enumerate(a) if type(t) is Var), None
            )
            if split is None:
                continue
            yield ChainLink(index, orientation, a[:split], a[split], b[0])


def _cycles(links, k):
    def extend(path):
        if len(path) == k:
            if path[-1].produced == path[0].consumed:
                yield tuple(path)
            return
        used = {link.index for link in path}
        for link in links:
            if link.index not in used and link.consumed == path[-1].produced:
                yield from extend(path + [link])

    for link in links:
        yield from extend([link])


def detect_chain(equations, max_length=4):
    """The shortest cycle of equations admitting power introduction."""
    equations = tuple(equations)
    for orientations in (_PREFIX_ORIENTATIONS, _SUFFIX_ORIENTATIONS):
        links = list(_links(equations, orientations))
        for k in range(1, max_length + 1):
            for cycle in _cycles(links, k):
                chain = CyclicChain(cycle)
                if chain.rotation(0):
                    return chain
    return None


def _may_vanish(w):
    return not any(type(t) in CHARACTER_TYPES for t in w)


def introduce_powers(chain, store, fresh):
    """Branches ``x_i / w̄_i^m p`` for every ``<p, s>`` in sdec(w̄_i), plus
    ``w̄_1 = ε`` when ``w̄_1`` may vanish. ``m`` is shared by all branches.
    """
    exponent = fresh.int_var()
    restore = chain.links[0].orientation.restore
    branches = []
    for i, link in enumerate(chain.links):
        rotation = chain.rotation(i)
        for case in sdec(rotation, fresh):
            conditions = case.side_conditions | {IntConstraint.ge(exponent, 0)}
            if store.solver.refutes(store.constraints | conditions):
                logger.debug(f"Dropping prefix case {case} of {show(rotation)}")
                continue
            image = restore((Power(rotation, exponent),) + case.prefix)
            branches.append(
                Branch(
                    Substitution.single(link.produced, image),
                    frozenset(conditions),
                )
            )
    first = chain.rotation(0)
    if _may_vanish(first):
        branches.append(Branch(equations=(Equation(restore(first), ()),)))
    return tuple(branches)
