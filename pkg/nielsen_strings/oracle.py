"""Bounded brute-force decision for plain equations.

Used to cross-check the solver in tests and benchmarks. An unsat answer
from here only means no model exists within the length bound.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Optional

from nielsen_strings.parikh import count_occurrences
from nielsen_strings.terms import Model, symbolic_chars

__all__ = ["OracleResult", "brute_force", "count_occurrences"]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OracleResult:
    model: Optional[Model] = None
    max_len: int = 0

    @property
    def sat(self):
        return self.model is not None

    def __str__(self):
        return "sat" if self.sat else f"unsat (length <= {self.max_len})"


def _compositions(total, parts, bound):
    """Length vectors summing to ``total`` in lexicographic order."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(min(total, bound) + 1):
        for rest in _compositions(total - first, parts - 1, bound):
            yield (first,) + rest


def _words(alphabet, n):
    for letters in itertools.product(alphabet, repeat=n):
        yield "".join(letters)


def assignments(names, max_len, alphabet):
    """Every assignment of strings up to ``max_len``, ordered by total
    length and then lexicographically."""
    for total in range(len(names) * max_len + 1):
        for lengths in _compositions(total, len(names), max_len):
            pools = [list(_words(alphabet, n)) for n in lengths]
            for values in itertools.product(*pools):
                yield dict(zip(names, values))


def brute_force(equations, max_len, alphabet):
    equations = tuple(equations)
    alphabet = tuple(sorted(set(alphabet)))
    names = sorted(
        set().union(*(e.variables() for e in equations)) if equations else ()
    )
    symbols = sorted(
        set().union(
            *(symbolic_chars(e.lhs) | symbolic_chars(e.rhs) for e in equations)
        )
        if equations
        else ()
    )
    char_choices = itertools.product(alphabet, repeat=len(symbols))
    char_assignments = [dict(zip(symbols, c)) for c in char_choices]
    tried = 0
    for strings in assignments(names, max_len, alphabet):
        for chars in char_assignments:
            tried += 1
            model = Model(strings=strings, chars=chars)
            if all(model.satisfies(e) for e in equations):
                logger.debug(f"Bounded model found after {tried} candidates")
                return OracleResult(model, max_len)
    logger.debug(f"No model up to length {max_len} in {tried} candidates")
    return OracleResult(None, max_len)

