"""Reader and printer for the equation fragment of SMT-LIB 2.

Only string declarations and asserted equalities over ``str.++`` are
understood; anything else is reported as an unsupported feature rather
than guessed at.
"""

import logging
import re
from dataclasses import dataclass

from nielsen_strings.errors import ParseError, UnsupportedFeatureError
from nielsen_strings.models import Problem
from nielsen_strings.terms import Char, Equation, Var, chars

logger = logging.getLogger(__name__)

LOGICS = ("QF_S", "QF_SLIA")

_SIMPLE_SYMBOL = re.compile(r"[A-Za-z~!@$%^&*_+=<>.?/\-][\w~!@$%^&*+=<>.?/\-]*")
_ESCAPE = re.compile(r"\\u\{([0-9a-fA-F]{1,5})\}|\\u([0-9a-fA-F]{4})")
_PRINTABLE = range(0x20, 0x7F)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


LPAREN = "("
RPAREN = ")"
STRING = "string"
SYMBOL = "symbol"
QUOTED = "quoted"
NUMERAL = "numeral"
KEYWORD = "keyword"


def tokenize(text):
    """Tokens with 1-based positions; comments are skipped."""
    i, line, column = 0, 1, 1
    n = len(text)

    def advance(k):
        nonlocal i, line, column
        for c in text[i : i + k]:
            if c == "\n":
                line, column = line + 1, 1
            else:
                column += 1
        i += k

    while i < n:
        c = text[i]
        if c.isspace():
            advance(1)
        elif c == ";":
            end = text.find("\n", i)
            advance((n if end < 0 else end) - i)
        elif c in "()":
            yield Token(c, c, line, column)
            advance(1)
        elif c == '"':
            start = (line, column)
            j = i + 1
            while True:
                j = text.find('"', j)
                if j < 0:
                    raise ParseError("unterminated string literal", *start)
                if text[j + 1 : j + 2] == '"':
                    j += 2
                    continue
                break
            raw = text[i + 1 : j].replace('""', '"')
            yield Token(STRING, decode_literal(raw), *start)
            advance(j + 1 - i)
        elif c == "|":
            j = text.find("|", i + 1)
            if j < 0:
                raise ParseError("unterminated quoted symbol", line, column)
            yield Token(QUOTED, text[i + 1 : j], line, column)
            advance(j + 1 - i)
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in '();"|':
                j += 1
            word = text[i:j]
            if word.isdigit():
                kind = NUMERAL
            elif word.startswith(":"):
                kind = KEYWORD
            else:
                kind = SYMBOL
            yield Token(kind, word, line, column)
            advance(j - i)


def decode_literal(raw):
    """Replace ``\\u{..}`` and ``\\uXXXX`` escapes by their characters."""

    def replace(match):
        code = int(match.group(1) or match.group(2), 16)
        if code > 0x2FFFF:
            return match.group(0)
        return chr(code)

    return _ESCAPE.sub(replace, raw)


def encode_literal(text):
    out = []
    for c in text:
        if c == '"':
            out.append('""')
        elif c == "\\" or ord(c) not in _PRINTABLE:
            out.append(f"\\u{{{ord(c):x}}}")
        else:
            out.append(c)
    return '"' + "".join(out) + '"'


def read_sexps(tokens):
    """Group tokens into nested lists. Leaves stay ``Token`` objects."""
    stack = [[]]
    opened = []
    for token in tokens:
        if token.kind == LPAREN:
            stack.append([])
            opened.append(token)
        elif token.kind == RPAREN:
            if len(stack) == 1:
                raise ParseError("unbalanced ')'", token.line, token.column)
            done = stack.pop()
            stack[-1].append(_Sexp(opened.pop(), done))
        else:
            stack[-1].append(token)
    if opened:
        token = opened[-1]
        raise ParseError("unbalanced '('", token.line, token.column)
    return stack[0]


class _Sexp(list):
    def __init__(self, token, items):
        super().__init__(items)
        self.line = token.line
        self.column = token.column


def _position(item):
    return item.line, item.column


class Smt2Reader:
    """Interprets commands one by one into a ``Problem``."""

    def __init__(self, source="<input>"):
        self.source = source
        self.logic = None
        self.variables = []
        self.assertions = []
        self.wants_model = False
        self.finished = False

    def read(self, text):
        for command in read_sexps(tokenize(text)):
            if self.finished:
                break
            self.command(command)
        return Problem(
            source=self.source,
            logic=self.logic,
            variables=self.variables,
            assertions=self.assertions,
            wants_model=self.wants_model,
        )

    def command(self, sexp):
        if not isinstance(sexp, _Sexp) or not sexp:
            raise ParseError("expected a command", *_position(sexp))
        head = sexp[0]
        if not isinstance(head, Token) or head.kind != SYMBOL:
            raise ParseError("expected a command name", *_position(sexp))
        handler = getattr(self, "_cmd_" + head.text.replace("-", "_"), None)
        if handler is None:
            raise UnsupportedFeatureError(head.text, *_position(head))
        handler(head, sexp[1:])

    def _cmd_set_logic(self, head, args):
        name = self._symbol(head, args, 0)
        if name not in LOGICS:
            raise UnsupportedFeatureError(f"logic {name}", *_position(head))
        self.logic = name

    def _cmd_set_info(self, head, args):
        pass

    def _cmd_set_option(self, head, args):
        pass

    def _cmd_declare_fun(self, head, args):
        if len(args) != 3:
            raise ParseError(
                "declare-fun expects 3 arguments", *_position(head)
            )
        name = self._symbol(head, args, 0)
        if not isinstance(args[1], _Sexp):
            raise ParseError("expected a parameter list", *_position(args[1]))
        if args[1]:
            raise UnsupportedFeatureError(
                "declare-fun with parameters", *_position(args[1])
            )
        self._declare(name, args[2], head)

    def _cmd_declare_const(self, head, args):
        if len(args) != 2:
            raise ParseError(
                "declare-const expects 2 arguments", *_position(head)
            )
        self._declare(self._symbol(head, args, 0), args[1], head)

    def _cmd_assert(self, head, args):
        if len(args) != 1:
            raise ParseError("assert expects 1 argument", *_position(head))
        self.assertions.extend(self._formula(args[0]))

    def _cmd_check_sat(self, head, args):
        pass

    def _cmd_get_model(self, head, args):
        self.wants_model = True

    def _cmd_exit(self, head, args):
        self.finished = True

    def _symbol(self, head, args, index):
        if index >= len(args):
            raise ParseError(f"{head.text}: missing symbol", *_position(head))
        token = args[index]
        if not isinstance(token, Token) or token.kind not in (SYMBOL, QUOTED):
            raise ParseError("expected a symbol", *_position(token))
        if "'" in token.text:
            raise ParseError(
                f"symbol {token.text!r} contains a prime", *_position(token)
            )
        return token.text

    def _declare(self, name, sort, head):
        if not isinstance(sort, Token) or sort.kind != SYMBOL:
            raise UnsupportedFeatureError("parametric sort", *_position(sort))
        if sort.text != "String":
            raise UnsupportedFeatureError(f"sort {sort.text}", *_position(sort))
        if name in self.variables:
            raise ParseError(f"{name} is already declared", *_position(head))
        self.variables.append(name)

    def _formula(self, sexp):
        if not isinstance(sexp, _Sexp) or not sexp:
            feature = sexp.text if isinstance(sexp, Token) else "()"
            raise UnsupportedFeatureError(feature, *_position(sexp))
        head = sexp[0]
        if not isinstance(head, Token) or head.kind != SYMBOL:
            raise UnsupportedFeatureError("complex operator", *_position(sexp))
        if head.text == "and":
            return [eq for arg in sexp[1:] for eq in self._formula(arg)]
        if head.text != "=":
            raise UnsupportedFeatureError(head.text, *_position(head))
        if len(sexp) < 3:
            raise ParseError("= expects at least 2 arguments", *_position(head))
        sides = [self._term(arg) for arg in sexp[1:]]
        return [Equation(a, b) for a, b in zip(sides, sides[1:])]

    def _term(self, item):
        if isinstance(item, Token):
            if item.kind == STRING:
                return chars(item.text)
            if item.kind in (SYMBOL, QUOTED):
                if item.text not in self.variables:
                    raise ParseError(
                        f"unknown symbol {item.text}", *_position(item)
                    )
                return (Var(item.text),)
            raise UnsupportedFeatureError(item.text, *_position(item))
        if not item:
            raise ParseError("empty term", *_position(item))
        head = item[0]
        if not isinstance(head, Token) or head.text != "str.++":
            text = head.text if isinstance(head, Token) else "complex operator"
            raise UnsupportedFeatureError(text, *_position(head))
        return sum((self._term(arg) for arg in item[1:]), ())


def parse_smt2(text, source="<input>"):
    problem = Smt2Reader(source).read(text)
    logger.debug(
        f"Read {len(problem.assertions)} equation(s) over "
        f"{len(problem.variables)} variable(s) from {source}"
    )
    return problem


def parse_file(path):
    with open(path, encoding="utf-8") as handle:
        return parse_smt2(handle.read(), str(path))


def format_symbol(name):
    return name if _SIMPLE_SYMBOL.fullmatch(name) else f"|{name}|"


def format_term(term):
    parts = []
    run = []
    for token in term:
        if type(token) is Char:
            run.append(token.symbol)
            continue
        if run:
            parts.append(encode_literal("".join(run)))
            run = []
        parts.append(format_symbol(token.name))
    if run:
        parts.append(encode_literal("".join(run)))
    if not parts:
        return '""'
    if len(parts) == 1:
        return parts[0]
    return f"(str.++ {' '.join(parts)})"


def format_problem(problem):
    """SMT-LIB text that reads back as an equal ``Problem``."""
    lines = []
    if problem.logic:
        lines.append(f"(set-logic {problem.logic})")
    for name in problem.variables:
        lines.append(f"(declare-fun {format_symbol(name)} () String)")
    for equation in problem.assertions:
        lhs, rhs = format_term(equation.lhs), format_term(equation.rhs)
        lines.append(f"(assert (= {lhs} {rhs}))")
    lines.append("(check-sat)")
    if problem.wants_model:
        lines.append("(get-model)")
    return "\n".join(lines) + "\n"


def format_model(model, names):
    for name in names:
        value = encode_literal(model.strings.get(name, ""))
        yield f"(define-fun {format_symbol(name)} () String {value})"
