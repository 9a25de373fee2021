"""Tokens, string terms, integer terms, constraints and substitutions.

A string term is a plain tuple of tokens; ``()`` is the empty term.
Integer terms are polynomials over two kinds of atoms: integer variables
``("int", name)`` and string lengths ``("len", name)``.
"""

import collections
import enum
import functools
import itertools
import logging
import math
import threading
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Mapping, Tuple

from nielsen_strings.errors import ModelVerificationError, SubstitutionError
from nielsen_strings.util import cache

logger = logging.getLogger(__name__)

INT = "int"
LEN = "len"

EQ = "eq"
LE = "le"
LT = "lt"
GE = "ge"
GT = "gt"

RELATION_SYMBOLS = {EQ: "=", LE: "<=", LT: "<", GE: ">=", GT: ">"}


def int_atom(name):
    return (INT, name)


def len_atom(name):
    return (LEN, name)


def _atom_str(atom):
    kind, name = atom
    return f"|{name}|" if kind == LEN else name


class IntTerm:
    """A normalized polynomial with integer coefficients."""

    __slots__ = ("_monomials", "_hash")

    def __init__(self, monomials=()):
        if isinstance(monomials, Mapping):
            monomials = monomials.items()
        merged = collections.defaultdict(int)
        for mono, coeff in monomials:
            merged[tuple(sorted(mono))] += coeff
        self._monomials = tuple(
            sorted((mono, coeff) for mono, coeff in merged.items() if coeff)
        )
        self._hash = hash(self._monomials)

    @classmethod
    def const(cls, value):
        return cls((((), value),)) if value else cls()

    @classmethod
    def var(cls, name):
        return cls((((int_atom(name),), 1),))

    @classmethod
    def length_of(cls, name):
        return cls((((len_atom(name),), 1),))

    @classmethod
    def atom(cls, atom):
        return cls((((atom,), 1),))

    @property
    def monomials(self):
        return self._monomials

    def _coerce(self, other):
        if isinstance(other, IntTerm):
            return other
        if isinstance(other, int):
            return IntTerm.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return IntTerm(self._monomials + other._monomials)

    __radd__ = __add__

    def __neg__(self):
        return IntTerm((mono, -coeff) for mono, coeff in self._monomials)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return IntTerm(
            (m1 + m2, c1 * c2)
            for (m1, c1), (m2, c2) in itertools.product(
                self._monomials, other._monomials
            )
        )

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, int):
            other = IntTerm.const(other)
        if not isinstance(other, IntTerm):
            return NotImplemented
        return self._monomials == other._monomials

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self._monomials < other._monomials

    def is_constant(self):
        return all(not mono for mono, _ in self._monomials)

    @property
    def constant(self):
        for mono, coeff in self._monomials:
            if not mono:
                return coeff
        return 0

    def without_constant(self):
        return IntTerm((m, c) for m, c in self._monomials if m)

    def atoms(self):
        return {atom for mono, _ in self._monomials for atom in mono}

    def is_linear(self):
        return all(len(mono) <= 1 for mono, _ in self._monomials)

    def degree(self):
        return max((len(mono) for mono, _ in self._monomials), default=0)

    def size(self):
        return sum(1 + len(mono) for mono, _ in self._monomials)

    def substitute(self, images):
        """Replace atoms by integer terms."""
        if not images or not (self.atoms() & images.keys()):
            return self
        result = IntTerm()
        for mono, coeff in self._monomials:
            product = IntTerm.const(coeff)
            for atom in mono:
                product = product * images.get(atom, IntTerm.atom(atom))
            result = result + product
        return result

    def evaluate(self, values, default=None):
        total = 0
        for mono, coeff in self._monomials:
            product = coeff
            for atom in mono:
                value = values.get(atom, default)
                if value is None:
                    raise KeyError(atom)
                product *= value
            total += product
        return total

    def __str__(self):
        if not self._monomials:
            return "0"
        parts = []
        ordered = [m for m in self._monomials if m[0]] + [
            m for m in self._monomials if not m[0]
        ]
        for mono, coeff in ordered:
            body = "*".join(_atom_str(atom) for atom in mono)
            if not body:
                text = str(abs(coeff))
            elif abs(coeff) == 1:
                text = body
            else:
                text = f"{abs(coeff)}*{body}"
            if not parts:
                parts.append(f"-{text}" if coeff < 0 else text)
            else:
                parts.append(f"- {text}" if coeff < 0 else f"+ {text}")
        return " ".join(parts)

    def __repr__(self):
        return f"IntTerm({str(self)!r})"


ZERO = IntTerm()
ONE = IntTerm.const(1)


@dataclass(frozen=True)
class IntConstraint:
    relation: str
    lhs: IntTerm
    rhs: IntTerm = ZERO

    @classmethod
    def eq(cls, lhs, rhs=0):
        return cls(EQ, _as_term(lhs), _as_term(rhs))

    @classmethod
    def le(cls, lhs, rhs=0):
        return cls(LE, _as_term(lhs), _as_term(rhs))

    @classmethod
    def lt(cls, lhs, rhs=0):
        return cls(LT, _as_term(lhs), _as_term(rhs))

    @classmethod
    def ge(cls, lhs, rhs=0):
        return cls(GE, _as_term(lhs), _as_term(rhs))

    @classmethod
    def gt(cls, lhs, rhs=0):
        return cls(GT, _as_term(lhs), _as_term(rhs))

    def canonical(self):
        """Rewrite to ``p = 0`` or ``p <= 0`` with coprime coefficients."""
        return _canonical(self)

    @property
    def truth(self):
        """True/False when both sides are constant, None otherwise."""
        difference = self.lhs - self.rhs
        if not difference.is_constant():
            return None
        return _holds(self.relation, difference.constant)

    def atoms(self):
        return self.lhs.atoms() | self.rhs.atoms()

    def evaluate(self, values, default=None):
        difference = self.lhs.evaluate(values, default) - self.rhs.evaluate(
            values, default
        )
        return _holds(self.relation, difference)

    def negations(self):
        """Canonical constraints whose disjunction is the negation."""
        c = self.canonical()
        p = c.lhs
        if c.relation == EQ:
            return (
                IntConstraint(LE, p + 1).canonical(),
                IntConstraint(LE, 1 - p).canonical(),
            )
        return (IntConstraint(LE, 1 - p).canonical(),)

    def __str__(self):
        return f"{self.lhs} {RELATION_SYMBOLS[self.relation]} {self.rhs}"


FALSE = IntConstraint(EQ, ONE, ZERO)
TRUE = IntConstraint(EQ, ZERO, ZERO)


def _as_term(value):
    return value if isinstance(value, IntTerm) else IntTerm.const(value)


def _holds(relation, difference):
    return {
        EQ: difference == 0,
        LE: difference <= 0,
        LT: difference < 0,
        GE: difference >= 0,
        GT: difference > 0,
    }[relation]


@cache()
def _canonical(constraint):
    p = constraint.lhs - constraint.rhs
    relation = constraint.relation
    if relation == LT:
        p, relation = p + 1, LE
    elif relation == GE:
        p, relation = -p, LE
    elif relation == GT:
        p, relation = 1 - p, LE
    if p.is_constant():
        return TRUE if _holds(relation, p.constant) else FALSE
    body = p.without_constant()
    c = p.constant
    g = 0
    for _, coeff in body.monomials:
        g = math.gcd(g, coeff)
    if relation == EQ:
        if c % g:
            return FALSE
        if body.monomials[0][1] < 0:
            g = -g
        scaled = IntTerm((m, k // g) for m, k in body.monomials) + c // g
        return IntConstraint(EQ, scaled, ZERO)
    # q*g + c <= 0  iff  q + ceil(c / g) <= 0
    scaled = IntTerm((m, k // g) for m, k in body.monomials) + (-(-c // g))
    return IntConstraint(LE, scaled, ZERO)


@dataclass(frozen=True)
class Char:
    symbol: str

    def __str__(self):
        return self.symbol


@dataclass(frozen=True)
class SymChar:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Power:
    base: Tuple
    exponent: IntTerm

    def __post_init__(self):
        if not is_ground(self.base):
            raise SubstitutionError(
                f"String variable inside power base {show(self.base)}"
            )

    def __str__(self):
        base = show(self.base)
        if len(self.base) != 1:
            base = f"({base})"
        exponent = str(self.exponent)
        if " " in exponent or "*" in exponent:
            exponent = f"{{{exponent}}}"
        return f"{base}^{exponent}"


CHARACTER_TYPES = (Char, SymChar)


def show(term):
    if not term:
        return "ε"
    parts = []
    for token in term:
        if parts and type(token) is Char and type(parts[-1][0]) is Char:
            parts[-1].append(token)
        else:
            parts.append([token])
    return " ".join("".join(str(t) for t in run) for run in parts)


@dataclass(frozen=True)
class Equation:
    lhs: Tuple
    rhs: Tuple

    def swapped(self):
        return Equation(self.rhs, self.lhs)

    def reversed(self):
        return Equation(reverse(self.lhs), reverse(self.rhs))

    def is_trivial(self):
        return self.lhs == self.rhs

    def variables(self):
        return variables(self.lhs) | variables(self.rhs)

    def __str__(self):
        return f"{show(self.lhs)} = {show(self.rhs)}"


@cache()
def is_ground(term):
    return all(type(token) is not Var for token in term)


def iter_tokens(term):
    """All tokens, descending into power bases."""
    for token in term:
        yield token
        if type(token) is Power:
            yield from iter_tokens(token.base)


def variables(term):
    return {token.name for token in term if type(token) is Var}


def symbolic_chars(term):
    return {t.name for t in iter_tokens(term) if type(t) is SymChar}


def powers(term):
    return [t for t in iter_tokens(term) if type(t) is Power]


def int_atoms(term):
    atoms = {len_atom(name) for name in variables(term)}
    for power in powers(term):
        atoms |= power.exponent.atoms()
    return atoms


@cache()
def length(term):
    """Length of a term as an integer term."""
    total = ZERO
    chars = 0
    for token in term:
        kind = type(token)
        if kind is Var:
            total = total + IntTerm.length_of(token.name)
        elif kind is Power:
            total = total + token.exponent * length(token.base)
        else:
            chars += 1
    return total + chars


def symbolic_length(term):
    return len(term)


def consecutive_tokens(term):
    """Contiguous windows of a term and of its power bases."""
    windows = {()}
    for i in range(len(term)):
        for j in range(i + 1, len(term) + 1):
            windows.add(term[i:j])
    for token in term:
        if type(token) is Power:
            base = token.base
            for i in range(len(base)):
                for j in range(i + 1, len(base) + 1):
                    windows.add(base[i:j])
    return frozenset(windows)


@cache()
def reverse(term):
    return tuple(
        Power(reverse(t.base), t.exponent) if type(t) is Power else t
        for t in reversed(term)
    )


def chars(text):
    return tuple(Char(c) for c in text)


def concrete_text(term):
    """The text of a term made only of concrete characters, else None."""
    if all(type(token) is Char for token in term):
        return "".join(token.symbol for token in term)
    return None


class Substitution:
    """A simultaneous map from variables to terms and symbolic characters
    to characters. Bindings not listed are the identity.
    """

    __slots__ = ("strings", "chars")

    def __init__(self, strings=None, chars=None):
        self.strings = {
            name: tuple(image)
            for name, image in (strings or {}).items()
            if tuple(image) != (Var(name),)
        }
        self.chars = {
            name: image
            for name, image in (chars or {}).items()
            if image != SymChar(name)
        }
        self._check()

    def _check(self):
        bound = set(self.strings)
        for name, image in self.strings.items():
            if variables(image) & bound:
                raise SubstitutionError(
                    f"Binding {name}/{show(image)} is not fully extended"
                )
        bound = set(self.chars)
        for name, image in self.chars.items():
            if type(image) is SymChar and image.name in bound:
                raise SubstitutionError(
                    f"Binding {name}/{image} is not fully extended"
                )

    @classmethod
    def single(cls, var, image):
        return cls(strings={var.name: image})

    def is_identity(self):
        return not self.strings and not self.chars

    def __eq__(self, other):
        if not isinstance(other, Substitution):
            return NotImplemented
        return self.strings == other.strings and self.chars == other.chars

    def __hash__(self):
        return hash(
            (frozenset(self.strings.items()), frozenset(self.chars.items()))
        )

    def __str__(self):
        bindings = [f"{n}/{show(t)}" for n, t in self.strings.items()]
        bindings += [f"{n}/{c}" for n, c in self.chars.items()]
        return ", ".join(bindings) or "id"

    def __repr__(self):
        return f"Substitution({self})"


IDENTITY = Substitution()


class Orientation(enum.Enum):
    """The four readings of an equation that rules match against."""

    AS_IS = "as-is"
    SWAPPED = "swapped"
    REVERSED = "reversed"
    SWAPPED_REVERSED = "swapped-reversed"

    @property
    def is_reversed(self):
        return self in (Orientation.REVERSED, Orientation.SWAPPED_REVERSED)

    def apply(self, equation):
        if self in (Orientation.SWAPPED, Orientation.SWAPPED_REVERSED):
            equation = equation.swapped()
        if self.is_reversed:
            equation = equation.reversed()
        return equation

    def restore(self, term):
        """Map a term of the oriented reading back to the original one."""
        return reverse(term) if self.is_reversed else term


@dataclass(frozen=True)
class Branch:
    """One successor: a substitution plus the constraints it adds."""

    substitution: Substitution = IDENTITY
    constraints: FrozenSet = frozenset()
    equations: Tuple = ()

    def restored(self, orientation):
        if not orientation.is_reversed:
            return self
        sigma = self.substitution
        return Branch(
            Substitution(
                {n: reverse(t) for n, t in sigma.strings.items()}, sigma.chars
            ),
            self.constraints,
            tuple(e.reversed() for e in self.equations),
        )

    def __str__(self):
        parts = []
        if not self.substitution.is_identity():
            parts.append(str(self.substitution))
        parts += sorted(str(c) for c in self.constraints)
        parts += [str(e) for e in self.equations]
        return ", ".join(parts) or "id"


@functools.singledispatch
def apply_substitution(target, sigma):
    """Apply ``sigma`` to a term, equation, constraint or collection.

    The result is not rewritten.
    """
    if isinstance(target, (list, set, frozenset)):
        return type(target)(apply_substitution(t, sigma) for t in target)
    raise TypeError(f"Cannot substitute into {type(target).__name__}")


@apply_substitution.register(tuple)
def _(target, sigma):
    if target and isinstance(target[0], (Equation, IntConstraint)):
        return tuple(apply_substitution(t, sigma) for t in target)
    if sigma.is_identity():
        return target
    out = []
    for token in target:
        kind = type(token)
        if kind is Var:
            image = sigma.strings.get(token.name)
            if image is None:
                out.append(token)
            else:
                out.extend(image)
        elif kind is SymChar:
            out.append(sigma.chars.get(token.name, token))
        elif kind is Power:
            out.append(
                Power(
                    apply_substitution(token.base, sigma),
                    apply_substitution(token.exponent, sigma),
                )
            )
        else:
            out.append(token)
    return tuple(out)


@apply_substitution.register(IntTerm)
def _(target, sigma):
    images = {
        len_atom(name): length(image) for name, image in sigma.strings.items()
    }
    return target.substitute(images)


@apply_substitution.register(IntConstraint)
def _(target, sigma):
    return IntConstraint(
        target.relation,
        apply_substitution(target.lhs, sigma),
        apply_substitution(target.rhs, sigma),
    )


@apply_substitution.register(Equation)
def _(target, sigma):
    return Equation(
        apply_substitution(target.lhs, sigma),
        apply_substitution(target.rhs, sigma),
    )


class FreshNames:
    """Source of fresh names. Primes never occur in parsed symbols."""

    def __init__(self):
        self._counters = collections.Counter()
        self._lock = threading.Lock()

    def fresh(self, stem):
        stem = stem.split("'")[0]
        with self._lock:
            self._counters[stem] += 1
            return f"{stem}'{self._counters[stem]}"

    def var(self, like):
        return Var(self.fresh(like.name if like is not None else "x"))

    def symchar(self):
        return SymChar(self.fresh("o"))

    def int_var(self):
        return IntTerm.var(self.fresh("m"))


@dataclass
class Model:
    strings: Dict[str, str] = field(default_factory=dict)
    chars: Dict[str, str] = field(default_factory=dict)
    ints: Dict[str, int] = field(default_factory=dict)

    def int_values(self):
        values = {int_atom(name): value for name, value in self.ints.items()}
        for name, value in self.strings.items():
            values[len_atom(name)] = len(value)
        return values

    def unwind(self, term):
        return "".join(self._unwind(token) for token in term)

    def _unwind(self, token):
        kind = type(token)
        if kind is Char:
            return token.symbol
        if kind is SymChar:
            return self.chars[token.name]
        if kind is Var:
            return self.strings[token.name]
        count = token.exponent.evaluate(self.int_values(), default=0)
        if count < 0:
            raise ModelVerificationError(
                f"Negative exponent {count} for {token}"
            )
        return self.unwind(token.base) * count

    def satisfies(self, equation):
        return self.unwind(equation.lhs) == self.unwind(equation.rhs)

    def verify(self, equations):
        for equation in equations:
            if not self.satisfies(equation):
                raise ModelVerificationError(
                    f"Model does not satisfy {equation}: "
                    f"{self.unwind(equation.lhs)!r} != "
                    f"{self.unwind(equation.rhs)!r}",
                    equation,
                )
        return True


def witness_alphabet(symbols):
    """The given characters plus one character none of them uses."""
    alphabet = set(symbols)
    candidates = itertools.chain(
        range(ord("a"), ord("z") + 1), itertools.count(0x100)
    )
    for code in candidates:
        if chr(code) not in alphabet:
            alphabet.add(chr(code))
            break
    return tuple(sorted(alphabet))


def alphabet_of(equations):
    return witness_alphabet(
        token.symbol
        for equation in equations
        for side in (equation.lhs, equation.rhs)
        for token in iter_tokens(side)
        if type(token) is Char
    )
