"""Formulas of strong-separation logic with points-to and list segments.

The core syntax has the atoms emp, x = y, x != y, x -> y and ls(x, y) and
the connectives *, -o (septraction), &&, || and !. The derived forms true,
-* (magic wand) and ls2 are elaborated into the core by the parser.

Copyright (c) 2025 Konrad Rieck. MIT License
"""

import re
from dataclasses import dataclass
from functools import reduce

from .errors import FormulaSyntaxError

NIL = "nil"
RESERVED = frozenset({"emp", "true", "ls", "ls2"})

IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_']*")
FRESH_RE = re.compile(r"[A-Za-z][A-Za-z0-9_']*#[0-9]+")


class Formula:
    """Base class of all formula nodes."""

    def __str__(self):
        return render(self)


@dataclass(frozen=True)
class Emp(Formula):
    pass


@dataclass(frozen=True)
class Eq(Formula):
    x: str
    y: str


@dataclass(frozen=True)
class Neq(Formula):
    x: str
    y: str


@dataclass(frozen=True)
class PointsTo(Formula):
    x: str
    y: str


@dataclass(frozen=True)
class Ls(Formula):
    x: str
    y: str


@dataclass(frozen=True)
class SepConj(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Septraction(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


ATOMS = (Emp, Eq, Neq, PointsTo, Ls)
BINARY = (SepConj, Septraction, And, Or)
PURE = (Eq, Neq)


def var_key(name):
    """Sort key of the global variable order."""
    return name.encode()


def max_var(names):
    """Largest variable of a class under the global order."""
    return max(names, key=var_key)


def is_variable(name, allow_fresh=False):
    """Check whether a string is a usable variable name."""
    if name in RESERVED:
        return False
    if IDENT_RE.fullmatch(name):
        return True
    return allow_fresh and FRESH_RE.fullmatch(name) is not None


# Builders for derived forms


def true_():
    return Or(Emp(), Not(Emp()))


def unsat():
    """Unsatisfiable formula of the core grammar."""
    return And(Emp(), Not(Emp()))


def wand(phi, psi):
    return Not(Septraction(phi, Not(psi)))


def ls2(x, y):
    """List segment of length at least two."""
    return And(Ls(x, y), Not(PointsTo(x, y)))


def alloc(x):
    """The location of x is allocated (or aliases nil)."""
    return Not(Septraction(PointsTo(x, NIL), true_()))


def sep_join(items):
    items = list(items)
    if not items:
        return Emp()
    return reduce(SepConj, items)


def and_join(items):
    items = list(items)
    if not items:
        return true_()
    return reduce(And, items)


def or_join(items):
    items = list(items)
    if not items:
        return unsat()
    return reduce(Or, items)


def sep_conjuncts(phi):
    """Flatten a tree of separating conjunctions into a list."""
    if isinstance(phi, SepConj):
        return sep_conjuncts(phi.left) + sep_conjuncts(phi.right)
    return [phi]


def is_true(phi):
    return phi == Or(Emp(), Not(Emp()))


def is_ls2(phi):
    return (
        isinstance(phi, And)
        and isinstance(phi.left, Ls)
        and phi.right == Not(PointsTo(phi.left.x, phi.left.y))
    )


def is_wand(phi):
    return (
        isinstance(phi, Not)
        and isinstance(phi.arg, Septraction)
        and isinstance(phi.arg.right, Not)
    )


# Structural measures


def free_vars(phi):
    """Variables occurring in a formula."""
    if isinstance(phi, Emp):
        return frozenset()
    if isinstance(phi, ATOMS):
        return frozenset((phi.x, phi.y))
    if isinstance(phi, Not):
        return free_vars(phi.arg)
    return free_vars(phi.left) | free_vars(phi.right)


def size(phi):
    if isinstance(phi, ATOMS):
        return 1
    if isinstance(phi, Not):
        return size(phi.arg) + 1
    return size(phi.left) + size(phi.right) + 1


def csize(phi):
    """Chunk size: how many garbage chunks the formula can tell apart."""
    if isinstance(phi, ATOMS):
        return 1
    if isinstance(phi, Not):
        return csize(phi.arg)
    if isinstance(phi, SepConj):
        return csize(phi.left) + csize(phi.right)
    if isinstance(phi, Septraction):
        return csize(phi.right)
    return max(csize(phi.left), csize(phi.right))


def is_positive(phi, modulo_ls2=False):
    """Check that no negation occurs, optionally treating ls2 as an atom."""
    if modulo_ls2 and is_ls2(phi):
        return True
    if isinstance(phi, ATOMS):
        return True
    if isinstance(phi, Not):
        return False
    return is_positive(phi.left, modulo_ls2) and is_positive(phi.right, modulo_ls2)


def substitute(phi, mapping):
    """Rename variables simultaneously."""
    if not mapping:
        return phi
    if isinstance(phi, Emp):
        return phi
    if isinstance(phi, ATOMS):
        return type(phi)(mapping.get(phi.x, phi.x), mapping.get(phi.y, phi.y))
    if isinstance(phi, Not):
        return Not(substitute(phi.arg, mapping))
    return type(phi)(substitute(phi.left, mapping), substitute(phi.right, mapping))


# Printer

PREC_OR, PREC_AND, PREC_WAND, PREC_STAR, PREC_NOT, PREC_ATOM = range(1, 7)


def render(phi, sugar=True):
    """Print a formula in the concrete syntax accepted by parse."""
    return _render(phi, sugar)[0]


def _wrap(part, needed):
    text, prec = part
    return text if prec >= needed else f"({text})"


def _render(phi, sugar):
    if sugar:
        if is_true(phi):
            return "true", PREC_ATOM
        if is_ls2(phi):
            return f"ls2({phi.left.x}, {phi.left.y})", PREC_ATOM
        if is_wand(phi):
            left = _wrap(_render(phi.arg.left, sugar), PREC_WAND + 1)
            right = _wrap(_render(phi.arg.right.arg, sugar), PREC_WAND)
            return f"{left} -* {right}", PREC_WAND

    if isinstance(phi, Emp):
        return "emp", PREC_ATOM
    if isinstance(phi, Eq):
        return f"{phi.x} = {phi.y}", PREC_ATOM
    if isinstance(phi, Neq):
        return f"{phi.x} != {phi.y}", PREC_ATOM
    if isinstance(phi, PointsTo):
        return f"{phi.x} -> {phi.y}", PREC_ATOM
    if isinstance(phi, Ls):
        return f"ls({phi.x}, {phi.y})", PREC_ATOM
    if isinstance(phi, Not):
        return "!" + _wrap(_render(phi.arg, sugar), PREC_NOT), PREC_NOT

    # Left-associative operators keep the right operand one level tighter
    ops = {
        Or: (" || ", PREC_OR, 0, 1),
        And: (" && ", PREC_AND, 0, 1),
        SepConj: (" * ", PREC_STAR, 0, 1),
        Septraction: (" -o ", PREC_WAND, 1, 0),
    }
    sym, prec, left_extra, right_extra = ops[type(phi)]
    left = _wrap(_render(phi.left, sugar), prec + left_extra)
    right = _wrap(_render(phi.right, sugar), prec + right_extra)
    return left + sym + right, prec


# Parser

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
    | (?P<op>->|!=|-o|-\*|&&|\|\||[()!*=,])
    | (?P<ident>[A-Za-z][A-Za-z0-9_']*(?:\#[0-9]+)?)
    """,
    re.VERBOSE,
)


def _position(text, offset):
    line = text.count("\n", 0, offset) + 1
    column = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, column


def tokenize(text):
    """Split text into (kind, value, offset) tokens."""
    tokens = []
    offset = 0
    while offset < len(text):
        match = _TOKEN_RE.match(text, offset)
        if not match:
            line, column = _position(text, offset)
            message = f"Unexpected character {text[offset]!r}"
            raise FormulaSyntaxError(message, line, column)
        if match.lastgroup != "ws":
            tokens.append((match.lastgroup, match.group(), offset))
        offset = match.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    """Recursive-descent parser over the token list."""

    def __init__(self, text, allow_fresh):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0
        self.allow_fresh = allow_fresh

    def peek(self):
        return self.tokens[self.pos][1]

    def error(self, message):
        line, column = _position(self.text, self.tokens[self.pos][2])
        raise FormulaSyntaxError(message, line, column)

    def take(self, expected=None):
        kind, value, _ = self.tokens[self.pos]
        if expected is not None and value != expected:
            found = value or "end of input"
            self.error(f"Expected {expected!r} but found {found!r}")
        if kind == "end":
            self.error("Unexpected end of input")
        self.pos += 1
        return value

    def parse(self):
        phi = self.parse_or()
        if self.tokens[self.pos][0] != "end":
            self.error(f"Unexpected token {self.peek()!r}")
        return phi

    def parse_or(self):
        phi = self.parse_and()
        while self.peek() == "||":
            self.take()
            phi = Or(phi, self.parse_and())
        return phi

    def parse_and(self):
        phi = self.parse_wand()
        while self.peek() == "&&":
            self.take()
            phi = And(phi, self.parse_wand())
        return phi

    def parse_wand(self):
        phi = self.parse_star()
        if self.peek() == "-o":
            self.take()
            return Septraction(phi, self.parse_wand())
        if self.peek() == "-*":
            self.take()
            return wand(phi, self.parse_wand())
        return phi

    def parse_star(self):
        phi = self.parse_unary()
        while self.peek() == "*":
            self.take()
            phi = SepConj(phi, self.parse_unary())
        return phi

    def parse_unary(self):
        if self.peek() == "!":
            self.take()
            return Not(self.parse_unary())
        return self.parse_primary()

    def parse_variable(self):
        kind, value, _ = self.tokens[self.pos]
        if kind != "ident":
            found = value or "end of input"
            self.error(f"Expected variable but found {found!r}")
        if value in RESERVED:
            self.error(f"Reserved word {value!r} used as variable")
        if "#" in value and not self.allow_fresh:
            self.error(f"Invalid variable name {value!r}")
        self.pos += 1
        return value

    def parse_primary(self):
        word = self.peek()
        if word in RESERVED and self.tokens[self.pos + 1][1] in ("->", "=", "!="):
            self.parse_variable()
        if word == "(":
            self.take()
            phi = self.parse_or()
            self.take(")")
            return phi
        if word == "emp":
            self.take()
            return Emp()
        if word == "true":
            self.take()
            return true_()
        if word in ("ls", "ls2"):
            self.take()
            self.take("(")
            x = self.parse_variable()
            self.take(",")
            y = self.parse_variable()
            self.take(")")
            return Ls(x, y) if word == "ls" else ls2(x, y)

        x = self.parse_variable()
        op = self.peek()
        if op not in ("->", "=", "!="):
            found = op or "end of input"
            self.error(f"Expected '->', '=' or '!=' but found {found!r}")
        self.take()
        y = self.parse_variable()
        return {"->": PointsTo, "=": Eq, "!=": Neq}[op](x, y)


def parse(text, allow_fresh=False):
    """Parse a formula and elaborate derived forms into the core syntax."""
    return _Parser(text, allow_fresh).parse()
