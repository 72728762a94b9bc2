"""Weak and strong semantics agree on positive formulas.

Copyright (c) 2025 Konrad Rieck. MIT License
"""

import numpy as np

from strongsep.decide import shapes
from strongsep.errors import LimitError
from strongsep.formula import render
from strongsep.generate import VARIABLE_NAMES, make_rng, random_formula
from strongsep.model import dangling, img
from strongsep.oracle import Mode, enumerate_models, holds

from .base import BaseCheck


class PositiveCoincidence(BaseCheck):
    """Positive formulas: equal verdicts and no unlabelled dangling locations."""

    def __init__(self, seed=0, formulas=20, max_vars=2, max_heap=3, **params):
        super().__init__(**params)
        self.seed = seed
        self.formulas = formulas
        self.variables = list(VARIABLE_NAMES[:max_vars])
        self.max_heap = max_heap

    def run(self):
        rng = make_rng(self.seed)
        models = [
            model
            for shape in shapes(self.variables)
            for model in enumerate_models(shape.nodes, self.max_heap)
        ]
        for _ in range(self.formulas):
            phi = random_formula(rng, self.variables, positive=True)
            for model in models:
                try:
                    strong = holds(model, phi, Mode.STRONG)
                    weak = holds(model, phi, Mode.WEAK)
                except LimitError:
                    continue
                self.cases += 1
                if strong != weak:
                    self.fail(formula=render(phi), model=str(model), strong=strong)
                elif strong and not dangling(model) <= img(model.stack):
                    self.fail(formula=render(phi), model=str(model), dangling=True)
        return self.failures

    @classmethod
    def get_param_grid(cls):
        return {"seed": np.arange(25), "formulas": [20]}
