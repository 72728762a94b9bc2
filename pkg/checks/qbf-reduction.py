"""The QBF translation is satisfiable exactly for true QBFs.

Copyright (c) 2025 Konrad Rieck. MIT License
"""

import numpy as np

from strongsep.decide import sat
from strongsep.generate import make_rng, random_qbf
from strongsep.qbf import qbf_eval, qbf_model_check, qbf_translate, render_qbf

from .base import BaseCheck


class QbfReduction(BaseCheck):
    """Decide translated QBFs and compare with direct evaluation."""

    def __init__(self, seed=0, samples=10, n_vars=3, depth=3, **params):
        super().__init__(**params)
        self.seed = seed
        self.samples = samples
        self.n_vars = n_vars
        self.depth = depth

    def run(self):
        rng = make_rng(self.seed)
        for _ in range(self.samples):
            f = random_qbf(rng, self.n_vars, self.depth)
            expected = qbf_eval(f)
            self.cases += 1
            decided = sat(qbf_translate(f)).success
            checked = qbf_model_check(f)
            if decided != expected or checked != expected:
                self.fail(
                    qbf=render_qbf(f), expected=expected, sat=decided, check=checked
                )
        return self.failures

    @classmethod
    def get_param_grid(cls):
        return {"seed": np.arange(10), "n_vars": [2, 3, 4], "samples": [10]}
