"""Exceptions raised by the strong-separation logic tools.

Copyright (c) 2025 Konrad Rieck. MIT License
"""


class SslError(Exception):
    """Base class for all errors of the package."""


class FormulaSyntaxError(SslError, ValueError):
    """Syntax error in a formula with 1-based position."""

    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class ProgramSyntaxError(FormulaSyntaxError):
    """Syntax error in an annotated program file."""


class QbfError(SslError, ValueError):
    """Malformed or non-NNF quantified Boolean formula."""


class ModelError(SslError, ValueError):
    """Invalid stack-heap model."""


class AmsError(SslError, ValueError):
    """Invalid abstract memory state or violated precondition."""


class LimitError(SslError):
    """A size guard refused the request."""


class VerificationError(SslError):
    """Symbolic execution could not proceed."""


class InternalError(SslError):
    """Two independent procedures disagree."""
