import pathlib

from nielsen_strings import SolverSettings
from nielsen_strings.terms import Equation, Var, chars


def path_to_fixture(name):
    return pathlib.Path(__file__).parent / "fixtures" / name


def term(text):
    """Space separated words; words starting with x, y or z are variables,
    every other word is a run of characters."""
    tokens = []
    for word in text.split():
        if word[0] in "xyz":
            tokens.append(Var(word))
        else:
            tokens.extend(chars(word))
    return tuple(tokens)


def eq(lhs, rhs):
    return Equation(term(lhs), term(rhs))


def settings(**overrides):
    return SolverSettings().load(overrides=overrides)
