"""Abstraction-based model checking against the brute-force oracle.

Copyright (c) 2025 Konrad Rieck. MIT License
"""

import numpy as np

from strongsep.decide import model_check, shapes
from strongsep.errors import LimitError
from strongsep.formula import render
from strongsep.generate import VARIABLE_NAMES, make_rng, random_formula
from strongsep.oracle import enumerate_models, holds

from .base import BaseCheck


class OracleEquivalence(BaseCheck):
    """Compare model_check with the strong oracle on all small models."""

    def __init__(self, seed=0, formulas=20, max_vars=2, max_heap=3, **params):
        super().__init__(**params)
        self.seed = seed
        self.formulas = formulas
        self.variables = list(VARIABLE_NAMES[:max_vars])
        self.max_heap = max_heap

    def models(self):
        for shape in shapes(self.variables):
            yield from enumerate_models(shape.nodes, self.max_heap)

    def run(self):
        rng = make_rng(self.seed)
        models = list(self.models())
        for _ in range(self.formulas):
            phi = random_formula(rng, self.variables)
            for model in models:
                try:
                    expected = holds(model, phi)
                except LimitError:
                    continue
                self.cases += 1
                if model_check(model, phi) != expected:
                    self.fail(formula=render(phi), model=str(model), oracle=expected)
        return self.failures

    @classmethod
    def get_param_grid(cls):
        return {"seed": np.arange(25), "formulas": [20]}
