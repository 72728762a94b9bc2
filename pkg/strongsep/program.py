"""Parser for annotated list-manipulating programs.

A program file has one statement per line, a ``pre {...}`` annotation first
and a ``post {...}`` annotation last. Loops carry their invariant on the
first line of the body:

    pre {ls(x, nil)}
    a := nil
    while (x != nil) {
        invariant {ls(x, nil) * ls(a, nil)}
        b := x.next
        ...
    }
    post {ls(a, nil)}

Text after ``#`` is a comment.

Copyright (c) 2025 Konrad Rieck. MIT License
"""

import logging
import re

from .errors import FormulaSyntaxError, ProgramSyntaxError
from .formula import NIL, is_variable, parse
from .symexec import (
    MALLOC_VAR,
    AnnotatedProgram,
    AssignNext,
    Assume,
    Copy,
    Free,
    Malloc,
    ReadNext,
    While,
)

logger = logging.getLogger(__name__)

_ID = r"([A-Za-z][A-Za-z0-9_']*)"

_STATEMENTS = [
    (re.compile(rf"{_ID}\.next\s*:=\s*{_ID}"), AssignNext),
    (re.compile(rf"{_ID}\s*:=\s*{_ID}\.next"), ReadNext),
    (re.compile(rf"free\s*\(\s*{_ID}\s*\)"), Free),
    (re.compile(rf"malloc\s*\(\s*{_ID}\s*\)"), Malloc),
    (re.compile(rf"{_ID}\s*:=\s*{_ID}"), Copy),
]
_ASSUME_RE = re.compile(rf"assume\s*\(\s*{_ID}\s*(=|!=)\s*{_ID}\s*\)")
_WHILE_RE = re.compile(rf"while\s*\(\s*{_ID}\s*(=|!=)\s*{_ID}\s*\)\s*\{{")
_ANNOTATION_RE = re.compile(r"(pre|post|invariant)\s*\{(.*)\}")


class _ProgramParser:
    def __init__(self, text):
        self.lines = []
        for number, line in enumerate(text.splitlines(), start=1):
            code = line.split("#", 1)[0].rstrip().rstrip(";")
            if code.strip():
                indent = len(code) - len(code.lstrip())
                self.lines.append((number, indent, code.strip()))
        self.pos = 0

    def error(self, message, column=None):
        if self.pos < len(self.lines):
            number, indent, _ = self.lines[self.pos]
            raise ProgramSyntaxError(message, number, column or indent + 1)
        last = self.lines[-1][0] if self.lines else 1
        raise ProgramSyntaxError(message, last, 1)

    def peek(self):
        return self.lines[self.pos][2] if self.pos < len(self.lines) else None

    def annotation(self, keyword):
        code = self.peek()
        match = _ANNOTATION_RE.fullmatch(code or "")
        if not match or match.group(1) != keyword:
            self.error(f"Expected '{keyword} {{...}}' annotation")
        _, indent, _ = self.lines[self.pos]
        try:
            phi = parse(match.group(2))
        except FormulaSyntaxError as e:
            message = str(e).rsplit(" (line", 1)[0]
            self.error(message, indent + match.start(2) + e.column)
        self.pos += 1
        return phi

    def check_names(self, names, assigned=None):
        for name in names:
            if not is_variable(name):
                self.error(f"Invalid variable name {name!r}")
        if assigned == NIL:
            self.error("Cannot assign to nil")
        if assigned == MALLOC_VAR:
            self.error(f"Variable {MALLOC_VAR} is reserved for malloc")

    def statement(self):
        code = self.peek()
        match = _ASSUME_RE.fullmatch(code)
        if match:
            x, op, y = match.groups()
            self.check_names((x, y))
            self.pos += 1
            return Assume(x, y, op == "=")

        for pattern, kind in _STATEMENTS:
            match = pattern.fullmatch(code)
            if not match:
                continue
            names = match.groups()
            if kind is ReadNext and names[0] == names[1]:
                self.error(
                    f"Cannot read {names[1]}.next into {names[0]} directly, "
                    "use a temporary variable"
                )
            written = None if kind in (AssignNext, Free) else names[0]
            self.check_names(names, written)
            self.pos += 1
            return kind(*names)
        self.error(f"Unknown statement {code!r}")

    def block(self, nested):
        body = []
        while True:
            code = self.peek()
            if code is None:
                if nested:
                    self.error("Missing '}' at end of loop")
                self.error("Missing 'post {...}' annotation")
            if code == "}":
                if not nested:
                    self.error("Unexpected '}'")
                self.pos += 1
                return tuple(body)
            match = _ANNOTATION_RE.fullmatch(code)
            if match and match.group(1) == "post" and not nested:
                return tuple(body)
            if match:
                self.error(f"Unexpected '{match.group(1)}' annotation")

            match = _WHILE_RE.fullmatch(code)
            if match:
                x, op, y = match.groups()
                self.check_names((x, y))
                self.pos += 1
                invariant = self.annotation("invariant")
                loop_body = self.block(nested=True)
                body.append(While(Assume(x, y, op == "="), invariant, loop_body))
            else:
                body.append(self.statement())

    def program(self):
        pre = self.annotation("pre")
        body = self.block(nested=False)
        post = self.annotation("post")
        if self.pos != len(self.lines):
            self.error("Unexpected input after postcondition")
        return AnnotatedProgram(pre, body, post)


def parse_program(text):
    """Parse an annotated program."""
    program = _ProgramParser(text).program()
    logger.debug("Parsed program with %d top-level statements", len(program.body))
    return program
