"""Pattern-counting filter for refuting single equations.

For an unbordered pattern ``w`` the number of occurrences of ``w`` in a
term is rewritten to ``k + Σ c·count(w, x)``. Exact rules split a term
into segments until only short segments between variables remain; those
residues are then bounded from above (max) or below (min). Symbolic
characters and power tokens are treated as variables throughout.
"""

import collections
import logging
from dataclasses import dataclass
from typing import Mapping, Optional

from nielsen_strings.terms import Char
from nielsen_strings.util import cache

logger = logging.getLogger(__name__)

MIN = "min"
MAX = "max"


@dataclass(frozen=True)
class ParikhSum:
    constant: int
    coefficients: Mapping

    def __str__(self):
        parts = [f"{c}*#{token}" for token, c in self.coefficients.items()]
        return " + ".join(parts + [str(self.constant)])


@dataclass(frozen=True)
class ParikhVerdict:
    refuted: bool
    pattern: Optional[str] = None

    def __bool__(self):
        return self.refuted


INCONCLUSIVE = ParikhVerdict(False)


def _is_char(token):
    return type(token) is Char


def _text(tokens):
    return "".join(token.symbol for token in tokens)


@cache()
def is_unbordered(w):
    return all(w[:k] != w[-k:] for k in range(1, len(w)))


def count_occurrences(w, s):
    """Start positions of ``w`` in ``s``, overlaps included."""
    if not w:
        return len(s) + 1
    return sum(1 for i in range(len(s) - len(w) + 1) if s.startswith(w, i))


def is_gap(u, d):
    """``x v y``, ``x v`` or ``v y`` with v concrete and ``|v| + 1 <= d``."""
    ends = [i for i, token in enumerate(u) if not _is_char(token)]
    if not u or len(u) - len(ends) + 1 > d:
        return False
    if ends == [0, len(u) - 1] and len(u) >= 2:
        return True
    if ends == [0]:
        return len(u) >= 2
    if ends == [len(u) - 1]:
        return len(u) >= 2
    return False


def crossing(w, u):
    """Whether an occurrence of ``w`` may cross the concrete part of gap
    ``u`` into a neighbouring variable."""
    first, last = not _is_char(u[0]), not _is_char(u[-1])
    if first and last:
        v = _text(u[1:-1])
        return any(
            w.startswith(v, p) and (p > 0 or p + len(v) < len(w))
            for p in range(len(w) - len(v) + 1)
        )
    if last:
        v = _text(u[:-1])
        return w.startswith(v) and len(v) < len(w)
    v = _text(u[1:])
    return w.endswith(v) and len(v) < len(w)


def _concrete_run_end(segment, start):
    end = start
    while end < len(segment) and _is_char(segment[end]):
        end += 1
    return end


def _exact_step(w, segment):
    """One exact rule: ``(constant, parts)``, or None when irreducible."""
    n = len(w)
    if all(_is_char(t) for t in segment):
        if len(segment) < n:
            return 0, ()
    elif len(segment) == 1:
        return None

    for i in range(len(segment) - n + 1):
        window = segment[i:i + n]
        if all(_is_char(t) for t in window):
            if _text(window) == w:
                return 1, (segment[:i], segment[i + n:])
            return 0, (segment[:i + n - 1], segment[i + 1:])

    for i, token in enumerate(segment):
        if _is_char(token):
            continue
        j = _concrete_run_end(segment, i + 1)
        if j == len(segment):
            break
        run = j - i - 1
        if run > n - 2 or not crossing(w, segment[i:j + 1]):
            return 0, (segment[:j], segment[i + 1:])

    head = _concrete_run_end(segment, 0)
    if 0 < head < len(segment) and not crossing(w, segment[:head + 1]):
        return 0, (segment[1:],)

    tail = len(segment)
    while tail > 0 and _is_char(segment[tail - 1]):
        tail -= 1
    if 0 < tail < len(segment) and not crossing(w, segment[tail - 1:]):
        return 0, (segment[:-1],)
    return None


@cache()
def exact_form(w, term):
    """Exact rewriting: ``(constant, residues)`` with residues a counter of
    irreducible segments."""
    constant = 0
    residues = collections.Counter()
    work = [tuple(term)]
    while work:
        segment = work.pop()
        step = _exact_step(w, segment)
        if step is None:
            residues[segment] += 1
        else:
            k, parts = step
            constant += k
            work.extend(parts)
    return constant, residues


def _crossing_bound(w, v):
    """Most occurrences of ``w`` that cross into the variables around the
    inner run ``v``; at most one per boundary."""
    return 1 + any(
        w.endswith(v[:p]) and w.startswith(v[q:])
        for p in range(1, len(v))
        for q in range(p, len(v))
    )


def _approximate(mode, w, segment):
    """Bound an irreducible segment: ``(constant, variables)`` or None."""
    variables = collections.Counter()
    constant = 0
    i = 0
    head = _concrete_run_end(segment, 0)
    if head >= len(w):
        return None
    if head:
        constant += mode == MAX
        i = head
    while i < len(segment):
        variables[segment[i]] += 1
        j = _concrete_run_end(segment, i + 1)
        if j - i - 1 >= len(w):
            return None
        if j == len(segment):
            if j > i + 1:
                constant += mode == MAX
            break
        if mode == MAX:
            constant += _crossing_bound(w, _text(segment[i + 1:j]))
        i = j
    return constant, variables


def parikh_rewrite(mode, w, u):
    """``P(w, u)`` bounded in ``mode``; None when blocked."""
    constant, residues = exact_form(w, tuple(u))
    coefficients = collections.Counter()
    for segment, count in residues.items():
        bound = _approximate(mode, w, segment)
        if bound is None:
            return None
        k, variables = bound
        constant += count * k
        for token, c in variables.items():
            coefficients[token] += count * c
    return ParikhSum(constant, dict(coefficients))


def _refutes(w, lhs, rhs):
    cu, ru = exact_form(w, lhs)
    cv, rv = exact_form(w, rhs)
    residues = collections.Counter(ru)
    residues.subtract(rv)
    upper = collections.Counter()
    lower = collections.Counter()
    upper_k = lower_k = cu - cv
    for segment, c in residues.items():
        if not c:
            continue
        high = _approximate(MAX, w, segment)
        low = _approximate(MIN, w, segment)
        if high is None or low is None:
            return False
        top, bottom = (high, low) if c > 0 else (low, high)
        upper_k += c * top[0]
        lower_k += c * bottom[0]
        for token, k in top[1].items():
            upper[token] += c * k
        for token, k in bottom[1].items():
            lower[token] += c * k
    if upper_k < 0 and all(k <= 0 for k in upper.values()):
        return True
    return lower_k > 0 and all(k >= 0 for k in lower.values())


def _concrete_runs(term):
    run = []
    for token in term:
        if _is_char(token):
            run.append(token.symbol)
        elif run:
            yield "".join(run)
            run = []
    if run:
        yield "".join(run)


def enumerate_patterns(equation, max_len=8):
    """Per start position in the concrete runs of both sides, the longest
    unbordered factor of length 2 to ``max_len``."""
    patterns = set()
    for side in (equation.lhs, equation.rhs):
        for run in _concrete_runs(side):
            for i in range(len(run) - 1):
                longest = None
                for j in range(i + 2, min(len(run), i + max_len) + 1):
                    if is_unbordered(run[i:j]):
                        longest = run[i:j]
                if longest is not None:
                    patterns.add(longest)
    return frozenset(patterns)


def unsat_filter(equation, max_len=8):
    lhs, rhs = tuple(equation.lhs), tuple(equation.rhs)
    letters = sorted({t.symbol for t in lhs + rhs if _is_char(t)})
    for w in letters:
        if _refutes(w, lhs, rhs):
            logger.debug(f"Letter count {w!r} refutes {equation}")
            return ParikhVerdict(True, w)
    patterns = sorted(
        enumerate_patterns(equation, max_len), key=lambda p: (len(p), p)
    )
    for w in patterns:
        if _refutes(w, lhs, rhs):
            logger.debug(f"Pattern count {w!r} refutes {equation}")
            return ParikhVerdict(True, w)
    return INCONCLUSIVE
