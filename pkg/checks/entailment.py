"""Entailment regressions with known answers.

Copyright (c) 2025 Konrad Rieck. MIT License
"""

from strongsep.decide import entails
from strongsep.formula import parse
from strongsep.oracle import holds

from .base import BaseCheck

REGRESSIONS = [
    ("x -> y", "ls(x, y)", True),
    ("ls(x, y) * ls(y, nil)", "ls(x, nil)", True),
    ("ls(x, nil)", "x -> nil", False),
    ("x -> y * y -> nil", "ls(x, nil)", True),
    ("ls(x, y)", "x -> y", False),
    ("emp", "ls(x, x)", True),
    ("x -> nil", "!emp", True),
]


class EntailmentRegressions(BaseCheck):
    """Fixed entailments; countermodels must convince the oracle."""

    def run(self):
        for lhs, rhs, expected in REGRESSIONS:
            phi, psi = parse(lhs), parse(rhs)
            verdict = entails(phi, psi)
            self.cases += 1
            if verdict.success != expected:
                self.fail(phi=lhs, psi=rhs, expected=expected)
            elif not expected:
                model = verdict.witness
                if not holds(model, phi) or holds(model, psi):
                    self.fail(phi=lhs, psi=rhs, countermodel=str(model))
        return self.failures
