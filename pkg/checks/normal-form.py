"""Formulas are equivalent to their normal forms.

Copyright (c) 2025 Konrad Rieck. MIT License
"""

import numpy as np

from strongsep.abduce import normal_form
from strongsep.decide import entails
from strongsep.formula import render
from strongsep.generate import make_rng, random_formula, random_variables

from .base import BaseCheck


class NormalFormEquivalence(BaseCheck):
    """Entailment in both directions between a formula and its normal form."""

    def __init__(self, seed=0, samples=10, max_vars=2, **params):
        super().__init__(**params)
        self.seed = seed
        self.samples = samples
        self.max_vars = max_vars

    def run(self):
        rng = make_rng(self.seed)
        for _ in range(self.samples):
            variables = random_variables(rng, self.max_vars)
            phi = random_formula(rng, variables)
            nf = normal_form(phi, variables).formula
            self.cases += 1
            for direction, lhs, rhs in (("sound", nf, phi), ("complete", phi, nf)):
                verdict = entails(lhs, rhs, variables)
                if not verdict.success:
                    self.fail(
                        formula=render(phi),
                        direction=direction,
                        countermodel=str(verdict.witness),
                    )
        return self.failures

    @classmethod
    def get_param_grid(cls):
        return {"seed": np.arange(10), "samples": [10]}
