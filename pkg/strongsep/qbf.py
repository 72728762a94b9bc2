"""Quantified Boolean formulas and their translation into the logic.

Closed QBFs in negation normal form are written as s-expressions, e.g.
``(forall x (exists y (or (and x y) (and (not x) (not y)))))``. The
translation is satisfiable exactly when the QBF is true; a variable is true
when its location is allocated.

Copyright (c) 2025 Konrad Rieck. MIT License
"""

import logging
import re
from dataclasses import dataclass

from .decide import model_check
from .errors import QbfError
from .formula import (
    NIL,
    And,
    Emp,
    Neq,
    Not,
    Or,
    PointsTo,
    SepConj,
    Septraction,
    and_join,
    is_variable,
    true_,
    wand,
)
from .model import Model

logger = logging.getLogger(__name__)


class Qbf:
    """Base class of QBF nodes."""

    def __str__(self):
        return render_qbf(self)


@dataclass(frozen=True)
class QVar(Qbf):
    name: str


@dataclass(frozen=True)
class QNot(Qbf):
    arg: Qbf


@dataclass(frozen=True)
class QAnd(Qbf):
    left: Qbf
    right: Qbf


@dataclass(frozen=True)
class QOr(Qbf):
    left: Qbf
    right: Qbf


@dataclass(frozen=True)
class Exists(Qbf):
    var: str
    body: Qbf


@dataclass(frozen=True)
class Forall(Qbf):
    var: str
    body: Qbf


def qbf_vars(f):
    """Bound variables in binding order."""
    if isinstance(f, (Exists, Forall)):
        return [f.var] + qbf_vars(f.body)
    if isinstance(f, (QAnd, QOr)):
        return qbf_vars(f.left) + qbf_vars(f.right)
    return []


def validate(f):
    """Raise QbfError unless f is a closed QBF in negation normal form."""
    bound = qbf_vars(f)
    if len(bound) != len(set(bound)):
        raise QbfError("Every variable must be bound exactly once")
    for name in bound:
        if name == NIL or not is_variable(name):
            raise QbfError(f"Invalid variable name {name!r}")

    def check(node, scope):
        if isinstance(node, QVar):
            if node.name not in scope:
                raise QbfError(f"Free variable {node.name}")
        elif isinstance(node, QNot):
            if not isinstance(node.arg, QVar):
                raise QbfError("Negation is only allowed on variables")
            check(node.arg, scope)
        elif isinstance(node, (QAnd, QOr)):
            check(node.left, scope)
            check(node.right, scope)
        elif isinstance(node, (Exists, Forall)):
            check(node.body, scope | {node.var})
        else:
            raise QbfError(f"Unknown QBF node {node!r}")

    check(f, frozenset())
    return f


def qbf_eval(f, assignment=None):
    """Truth value of a QBF by recursive expansion."""
    assignment = assignment or {}
    if isinstance(f, QVar):
        return assignment[f.name]
    if isinstance(f, QNot):
        return not qbf_eval(f.arg, assignment)
    if isinstance(f, QAnd):
        return qbf_eval(f.left, assignment) and qbf_eval(f.right, assignment)
    if isinstance(f, QOr):
        return qbf_eval(f.left, assignment) or qbf_eval(f.right, assignment)
    branches = (qbf_eval(f.body, {**assignment, f.var: v}) for v in (False, True))
    return any(branches) if isinstance(f, Exists) else all(branches)


def _allocated(name):
    return SepConj(PointsTo(name, NIL), true_())


def _choice(name):
    return Or(PointsTo(name, NIL), Emp())


def _aux(f):
    if isinstance(f, QVar):
        return _allocated(f.name)
    if isinstance(f, QNot):
        return Not(_allocated(f.arg.name))
    if isinstance(f, QAnd):
        return And(_aux(f.left), _aux(f.right))
    if isinstance(f, QOr):
        return Or(_aux(f.left), _aux(f.right))
    if isinstance(f, Exists):
        return Septraction(_choice(f.var), _aux(f.body))
    return wand(_choice(f.var), _aux(f.body))


def qbf_translate(f):
    """Formula satisfiable iff the QBF is true."""
    validate(f)
    names = qbf_vars(f) + [NIL]
    distinct = [Neq(x, y) for i, x in enumerate(names) for y in names[i + 1 :]]
    return and_join([Emp()] + distinct + [_aux(f)])


def qbf_model_check(f):
    """Evaluate the translation on the empty heap with all variables apart."""
    stack = {name: i + 1 for i, name in enumerate(qbf_vars(f))}
    stack[NIL] = 0
    return model_check(Model(stack, {}), qbf_translate(f))


# S-expression format

_TOKEN_RE = re.compile(r"\s*(?:(\()|(\))|([^\s()]+))")


def _tokenize(text):
    tokens, pos = [], 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if not match or match.end() == pos:
            if text[pos:].strip():
                raise QbfError(f"Unexpected character at offset {pos}")
            break
        tokens.append(match.group(1) or match.group(2) or match.group(3))
        pos = match.end()
    return [t for t in tokens if t]


def parse_qbf(text):
    """Parse and validate a QBF in s-expression format."""
    tokens = _tokenize(text)
    pos = 0

    def expect(token):
        nonlocal pos
        if pos >= len(tokens) or tokens[pos] != token:
            found = tokens[pos] if pos < len(tokens) else "end of input"
            raise QbfError(f"Expected {token!r} but found {found!r}")
        pos += 1

    def parse_expr():
        nonlocal pos
        if pos >= len(tokens):
            raise QbfError("Unexpected end of input")
        token = tokens[pos]
        if token != "(":
            if token == ")":
                raise QbfError("Unexpected ')'")
            pos += 1
            return QVar(token)
        pos += 1
        if pos >= len(tokens):
            raise QbfError("Unexpected end of input")
        op = tokens[pos]
        pos += 1
        if op in ("forall", "exists"):
            var = tokens[pos] if pos < len(tokens) else ""
            if var in ("(", ")", ""):
                raise QbfError(f"Expected variable after {op}")
            pos += 1
            body = parse_expr()
            expect(")")
            return Forall(var, body) if op == "forall" else Exists(var, body)
        if op == "not":
            arg = parse_expr()
            expect(")")
            return QNot(arg)
        if op in ("and", "or"):
            args = []
            while pos < len(tokens) and tokens[pos] != ")":
                args.append(parse_expr())
            expect(")")
            if len(args) < 2:
                raise QbfError(f"'{op}' needs at least two operands")
            node = QAnd if op == "and" else QOr
            result = args[0]
            for arg in args[1:]:
                result = node(result, arg)
            return result
        raise QbfError(f"Unknown operator {op!r}")

    f = parse_expr()
    if pos != len(tokens):
        raise QbfError(f"Trailing input {tokens[pos]!r}")
    return validate(f)


def render_qbf(f):
    if isinstance(f, QVar):
        return f.name
    if isinstance(f, QNot):
        return f"(not {render_qbf(f.arg)})"
    if isinstance(f, QAnd):
        return f"(and {render_qbf(f.left)} {render_qbf(f.right)})"
    if isinstance(f, QOr):
        return f"(or {render_qbf(f.left)} {render_qbf(f.right)})"
    op = "exists" if isinstance(f, Exists) else "forall"
    return f"({op} {f.var} {render_qbf(f.body)})"
