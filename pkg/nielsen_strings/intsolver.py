"""Integer reasoning over length and exponent constraints.

Every atom ranges over the natural numbers. Linear reasoning is exact: a
two-phase simplex over ``Fraction`` with Bland's rule, and depth-first
branch and bound for integrality. Nonlinear monomials are relaxed to fresh
columns strengthened with interval bounds; satisfiability of nonlinear
stores falls back to probing small values of the atoms that occur in
products.
"""

import collections
import enum
import itertools
import logging
import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional

from nielsen_strings.terms import (
    EQ,
    FALSE,
    LE,
    TRUE,
    IntConstraint,
    IntTerm,
)

logger = logging.getLogger(__name__)


class Entailment(enum.Enum):
    ENTAILED = "entailed"
    UNKNOWN = "unknown"


class Satisfiability(enum.Enum):
    SAT = "sat"
    UNSAT = "unsat"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class SatResult:
    status: Satisfiability
    model: Optional[Dict] = None

    def __bool__(self):
        return self.status is Satisfiability.SAT


class _Exhausted(Exception):
    pass


class Interrupted(Exception):
    """Raised from inside a query once the deadline passed or the search
    was cancelled."""

    def __init__(self, reason):
        super().__init__(reason)
        self.reason = reason


def _pivot(tableau, cost, basis, r, j):
    prow = tableau[r]
    a = prow[j]
    if a != 1:
        prow = [v / a for v in prow]
        tableau[r] = prow
    for i, row in enumerate(tableau):
        f = row[j]
        if i != r and f:
            tableau[i] = [v - f * p for v, p in zip(row, prow)]
    f = cost[j]
    if f:
        cost[:] = [v - f * p for v, p in zip(cost, prow)]
    basis[r] = j


def _pivot_loop(tableau, cost, basis, allowed, interrupt=None):
    while True:
        if interrupt is not None:
            interrupt()
        entering = next((j for j in allowed if cost[j] < 0), None)
        if entering is None:
            return True
        best = None
        for i, row in enumerate(tableau):
            a = row[entering]
            if a > 0:
                ratio = row[-1] / a
                if (
                    best is None
                    or ratio < best[0]
                    or (ratio == best[0] and basis[i] < basis[best[1]])
                ):
                    best = (ratio, i)
        if best is None:
            return False
        _pivot(tableau, cost, basis, best[1], entering)


def simplex(rows, ncols, objective=None, interrupt=None):
    """Solve ``min objective·x`` over ``x >= 0`` subject to ``rows``.

    Each row is ``(coefficients, relation, rhs)`` with coefficients a
    mapping from column index to number and relation ``eq`` or ``le``.
    Returns None when infeasible, otherwise ``(point, value)`` where value
    is None for an unbounded objective (or when no objective was given).
    ``interrupt`` is called before every pivot.
    """
    m = len(rows)
    slacks = sum(1 for _, relation, _ in rows if relation == LE)
    first_artificial = ncols + slacks
    total = first_artificial + m
    tableau = []
    slack = ncols
    for i, (coefficients, relation, rhs) in enumerate(rows):
        row = [Fraction(0)] * (total + 1)
        for j, a in coefficients.items():
            row[j] = Fraction(a)
        if relation == LE:
            row[slack] = Fraction(1)
            slack += 1
        row[-1] = Fraction(rhs)
        if row[-1] < 0:
            row = [-v for v in row]
        row[first_artificial + i] = Fraction(1)
        tableau.append(row)
    basis = [first_artificial + i for i in range(m)]

    cost = [Fraction(0)] * (total + 1)
    for j in range(first_artificial, total):
        cost[j] = Fraction(1)
    for row in tableau:
        cost = [c - v for c, v in zip(cost, row)]
    _pivot_loop(tableau, cost, basis, range(total), interrupt)
    if -cost[-1] > 0:
        return None

    for i, b in enumerate(basis):
        if b >= first_artificial:
            j = next(
                (j for j in range(first_artificial) if tableau[i][j] != 0),
                None,
            )
            if j is not None:
                _pivot(tableau, cost, basis, i, j)

    value = None
    if objective:
        cost = [Fraction(0)] * (total + 1)
        for j, c in objective.items():
            cost[j] = Fraction(c)
        for i, b in enumerate(basis):
            f = cost[b]
            if f:
                cost = [c - f * v for c, v in zip(cost, tableau[i])]
        bounded = _pivot_loop(
            tableau, cost, basis, range(first_artificial), interrupt
        )
        if bounded:
            value = -cost[-1]

    point = [Fraction(0)] * ncols
    for i, b in enumerate(basis):
        if b < ncols:
            point[b] = tableau[i][-1]
    return point, value


def integer_point(rows, ncols, node_limit, interrupt=None):
    """Depth-first branch and bound for an integral feasible point.

    Returns None when none exists; raises ``_Exhausted`` past the limit.
    """
    stack = [list(rows)]
    while stack:
        node_limit -= 1
        if node_limit < 0:
            raise _Exhausted()
        current = stack.pop()
        solved = simplex(current, ncols, interrupt=interrupt)
        if solved is None:
            continue
        point, _ = solved
        j = next((j for j, v in enumerate(point) if v.denominator != 1), None)
        if j is None:
            return [int(v) for v in point]
        floor = math.floor(point[j])
        stack.append(current + [({j: -1}, LE, -(floor + 1))])
        stack.append(current + [({j: 1}, LE, floor)])
    return None


class _Relaxation:
    """Linear relaxation: one column per distinct monomial."""

    def __init__(self, constraints, interrupt=None):
        self.interrupt = interrupt
        self.columns = {}
        self.rows = []
        for constraint in constraints:
            p = constraint.lhs
            coefficients = {}
            for mono, coeff in p.monomials:
                if mono:
                    coefficients[self.column(mono)] = coeff
            self.rows.append((coefficients, constraint.relation, -p.constant))

    def column(self, mono):
        if mono not in self.columns:
            self.columns[mono] = len(self.columns)
        return self.columns[mono]

    @property
    def nonlinear(self):
        return [mono for mono in self.columns if len(mono) > 1]

    def extreme(self, mono, maximize):
        if mono not in self.columns:
            return None if maximize else 0
        j = self.columns[mono]
        objective = {j: -1 if maximize else 1}
        solved = simplex(
            self.rows, len(self.columns), objective, self.interrupt
        )
        if solved is None or solved[1] is None:
            return None if maximize else 0
        value = -solved[1] if maximize else solved[1]
        return math.floor(value) if maximize else math.ceil(value)

    def atom_bounds(self):
        bounds = {}
        for mono in self.nonlinear:
            for atom in mono:
                if atom not in bounds:
                    key = (atom,)
                    bounds[atom] = (
                        self.extreme(key, maximize=False),
                        self.extreme(key, maximize=True),
                    )
        return bounds

    def strengthen(self, bounds=None):
        """Add interval and product bounds for nonlinear columns.

        ``bounds`` may come from a weaker set of constraints; atoms it
        does not mention are only known to be non-negative.
        """
        if bounds is None:
            bounds = self.atom_bounds()
        bounds = {
            atom: bounds.get(atom, (0, None))
            for mono in self.nonlinear
            for atom in mono
        }
        for mono in self.nonlinear:
            j = self.columns[mono]
            lows = [bounds[a][0] for a in mono]
            highs = [bounds[a][1] for a in mono]
            low = math.prod(lows)
            if low > 0:
                self.rows.append(({j: -1}, LE, -low))
            if all(h is not None for h in highs):
                self.rows.append(({j: 1}, LE, math.prod(highs)))
            if len(mono) != 2:
                continue
            a, b = mono
            ja, jb = self.column((a,)), self.column((b,))
            (la, ha), (lb, hb) = bounds[a], bounds[b]
            self._product_row(j, ja, jb, la, lb, lower=True)
            if ha is not None and hb is not None:
                self._product_row(j, ja, jb, ha, hb, lower=True)
            if ha is not None:
                self._product_row(j, ja, jb, ha, lb, lower=False)
            if hb is not None:
                self._product_row(j, jb, ja, hb, la, lower=False)
        return bounds

    def _product_row(self, j, ja, jb, ka, kb, lower):
        # (a - ka)(b - kb) >= 0 gives ab >= ka*b + kb*a - ka*kb
        sign = 1 if lower else -1
        coefficients = collections.Counter()
        coefficients[ja] += sign * kb
        coefficients[jb] += sign * ka
        coefficients[j] -= sign
        coefficients = {k: c for k, c in coefficients.items() if c}
        self.rows.append((coefficients, LE, sign * ka * kb))


def _polynomial(term):
    return {mono: Fraction(coeff) for mono, coeff in term.monomials}


def _subtract(row, other, factor):
    result = dict(row)
    for key, value in other.items():
        result[key] = result.get(key, 0) - factor * value
        if not result[key]:
            del result[key]
    return result


class _Equalities:
    """Equality constraints in reduced row echelon form.

    Monomials are independent unknowns here, so every value derived is
    entailed by the constraints; the converse does not hold.
    """

    def __init__(self, constraints):
        self.rows = []
        for constraint in sorted(constraints, key=str):
            if constraint.relation == EQ:
                self._insert(_polynomial(constraint.lhs))

    def _insert(self, row):
        row = self.reduce(row)
        pivots = sorted(key for key in row if key)
        if not pivots:
            return
        pivot = pivots[0]
        scale = row[pivot]
        row = {key: value / scale for key, value in row.items()}
        self.rows = [
            (p, _subtract(r, row, r[pivot]) if pivot in r else r)
            for p, r in self.rows
        ]
        self.rows.append((pivot, row))

    def reduce(self, polynomial):
        for pivot, row in self.rows:
            factor = polynomial.get(pivot)
            if factor:
                polynomial = _subtract(polynomial, row, factor)
        return polynomial

    def value(self, term):
        reduced = self.reduce(_polynomial(term))
        if reduced.keys() - {()}:
            return None
        return reduced.get((), Fraction(0))


def _probe_values(atoms, bounds, probe_bound, rng, limit):
    """Assignments to ``atoms`` in order of increasing sum."""
    ranges = []
    for atom in atoms:
        low, high = bounds.get(atom, (0, None))
        high = probe_bound if high is None else min(high, probe_bound)
        ranges.append((low, high))
    if any(low > high for low, high in ranges):
        return
    emitted = 0
    top = sum(high for _, high in ranges)
    for total in range(sum(low for low, _ in ranges), top + 1):
        level = [
            combo
            for combo in itertools.product(
                *(range(low, high + 1) for low, high in ranges)
            )
            if sum(combo) == total
        ]
        rng.shuffle(level)
        for combo in level:
            yield dict(zip(atoms, combo))
            emitted += 1
            if emitted >= limit:
                return


class IntSolver:
    """Entailment and satisfiability with an instance-local answer cache.

    ``deadline`` (a ``time.monotonic`` value) and ``cancelled`` (an event)
    are checked before every simplex pivot; once either trips, the
    running query raises ``Interrupted``.
    """

    def __init__(self, probe_bound=16, node_limit=200, probe_limit=512, seed=0):
        self.probe_bound = probe_bound
        self.node_limit = node_limit
        self.probe_limit = probe_limit
        self.seed = seed
        self.deadline = None
        self.cancelled = None
        self.cache = {}
        self.bounds = {}
        self.equalities = {}
        self.queries = 0
        self.cache_hits = 0

    def interrupt(self):
        if self.cancelled is not None and self.cancelled.is_set():
            raise Interrupted("cancelled")
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise Interrupted("timeout")

    def _cached(self, key, compute):
        self.queries += 1
        try:
            value = self.cache[key]
            self.cache_hits += 1
            return value
        except KeyError:
            value = compute()
            self.cache[key] = value
            return value

    def _integer_point(self, relaxation):
        return integer_point(
            relaxation.rows,
            len(relaxation.columns),
            self.node_limit,
            self.interrupt,
        )

    def atom_bounds(self, constraints):
        """Interval bounds of the atoms in nonlinear monomials, computed
        once per constraint set."""
        try:
            return self.bounds[constraints]
        except KeyError:
            relaxation = _Relaxation(constraints, self.interrupt)
            bounds = relaxation.atom_bounds()
            self.bounds[constraints] = bounds
            return bounds

    def fixed_value(self, constraints, term):
        """The value the equalities among ``constraints`` force on
        ``term``, or None."""
        try:
            equalities = self.equalities[constraints]
        except KeyError:
            equalities = _Equalities(constraints)
            self.equalities[constraints] = equalities
        return equalities.value(term)

    def entails(self, constraints, constraint, witness=None):
        query = constraint.canonical()
        if query == TRUE or FALSE in constraints or query in constraints:
            return Entailment.ENTAILED
        if query == FALSE:
            return Entailment.UNKNOWN
        if witness is not None and not query.evaluate(witness, default=0):
            return Entailment.UNKNOWN
        if query.relation == EQ:
            if self.fixed_value(constraints, query.lhs) == 0:
                return Entailment.ENTAILED
        return self._cached(
            ("entails", constraints, query),
            lambda: self._entails(constraints, query),
        )

    def _entails(self, constraints, query):
        # Bounds valid for the store stay valid once a negation is added.
        bounds = self.atom_bounds(constraints)
        for negation in query.negations():
            if not self.refutes(constraints | {negation}, bounds):
                return Entailment.UNKNOWN
        return Entailment.ENTAILED

    def refutes(self, constraints, bounds=None):
        """True only when ``constraints`` provably have no natural model."""
        if FALSE in constraints:
            return True
        relaxation = _Relaxation(constraints, self.interrupt)
        if relaxation.nonlinear:
            relaxation.strengthen(bounds)
        try:
            point = self._integer_point(relaxation)
        except _Exhausted:
            return False
        return point is None

    def satisfiable(self, constraints):
        return self._cached(
            ("satisfiable", constraints),
            lambda: self._satisfiable(constraints),
        )

    def _satisfiable(self, constraints):
        if FALSE in constraints:
            return SatResult(Satisfiability.UNSAT)
        relaxation = _Relaxation(constraints, self.interrupt)
        bounds = {}
        if relaxation.nonlinear:
            bounds = relaxation.strengthen(self.atom_bounds(constraints))
        exhausted = False
        try:
            point = self._integer_point(relaxation)
        except _Exhausted:
            point, exhausted = None, True
        if point is None and not exhausted:
            return SatResult(Satisfiability.UNSAT)
        if point is not None:
            model = {
                mono[0]: point[j]
                for mono, j in relaxation.columns.items()
                if len(mono) == 1
            }
            if all(c.evaluate(model, default=0) for c in constraints):
                return SatResult(Satisfiability.SAT, model)
        if not relaxation.nonlinear:
            logger.debug("Linear store left undecided by branch and bound")
            return SatResult(Satisfiability.UNKNOWN)
        return self._probe(constraints, relaxation, bounds)

    def _probe(self, constraints, relaxation, bounds):
        atoms = sorted({a for mono in relaxation.nonlinear for a in mono})
        rng = random.Random(self.seed)
        for values in _probe_values(
            atoms, bounds, self.probe_bound, rng, self.probe_limit
        ):
            fixed = {atom: IntTerm.const(v) for atom, v in values.items()}
            reduced = set()
            for c in constraints:
                r = IntConstraint(c.relation, c.lhs.substitute(fixed))
                r = r.canonical()
                if r == FALSE:
                    break
                if r != TRUE:
                    reduced.add(r)
            else:
                linear = _Relaxation(reduced, self.interrupt)
                try:
                    point = self._integer_point(linear)
                except _Exhausted:
                    continue
                if point is None:
                    continue
                model = dict(values)
                for mono, j in linear.columns.items():
                    model[mono[0]] = point[j]
                return SatResult(Satisfiability.SAT, model)
        logger.debug(
            f"No model among {len(atoms)} probed atom(s) up to "
            f"{self.probe_bound}"
        )
        return SatResult(Satisfiability.UNKNOWN)


class IntStore:
    """An immutable set of canonical constraints bound to a solver."""

    __slots__ = ("constraints", "solver", "_result")

    def __init__(self, constraints=(), solver=None):
        self.solver = solver if solver is not None else IntSolver()
        canonical = set()
        for c in constraints:
            c = c.canonical()
            if c != TRUE:
                canonical.add(c)
        self.constraints = frozenset(canonical)
        self._result = None

    def __iter__(self):
        return iter(sorted(self.constraints, key=str))

    def __len__(self):
        return len(self.constraints)

    def __contains__(self, constraint):
        return constraint.canonical() in self.constraints

    @property
    def inconsistent(self):
        return FALSE in self.constraints

    def add(self, constraints):
        new = {c.canonical() for c in constraints} - {TRUE}
        if new <= self.constraints:
            return self
        return IntStore(self.constraints | new, self.solver)

    def substitute(self, substitute):
        return IntStore((substitute(c) for c in self.constraints), self.solver)

    def satisfiable(self):
        if self._result is None:
            self._result = self.solver.satisfiable(self.constraints)
        return self._result

    def model(self):
        result = self.satisfiable()
        return result.model if result else None

    def check(self, constraint):
        return self.solver.entails(self.constraints, constraint, self.model())

    def entails(self, constraint):
        return self.check(constraint) is Entailment.ENTAILED

    def value_of(self, term):
        """The integer ``term`` equals in every model, when the equality
        constraints determine it."""
        value = self.solver.fixed_value(self.constraints, term)
        if value is None or value.denominator != 1:
            return None
        return int(value)

    def __str__(self):
        return ", ".join(str(c) for c in self) or "true"
