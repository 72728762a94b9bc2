"""Abduction solutions solve the problem and are minimal where asked.

Copyright (c) 2025 Konrad Rieck. MIT License
"""

import numpy as np

from strongsep.abduce import abduce_positive, abduce_weakest
from strongsep.decide import entails, sat
from strongsep.formula import Emp, Not, SepConj, render
from strongsep.generate import make_rng, random_formula, random_variables

from .base import BaseCheck


class AbductionSolutions(BaseCheck):
    """Weakest, minimal and positive solutions of random problems."""

    def __init__(self, seed=0, samples=5, max_vars=2, **params):
        super().__init__(**params)
        self.seed = seed
        self.samples = samples
        self.max_vars = max_vars

    def check_solution(self, kind, phi, psi, zeta, variables):
        if not sat(zeta, variables).success:
            return
        verdict = entails(SepConj(phi, zeta), psi, variables)
        if not verdict.success:
            self.fail(
                kind=kind,
                phi=render(phi),
                psi=render(psi),
                countermodel=str(verdict.witness),
            )

    def run(self):
        rng = make_rng(self.seed)
        for _ in range(self.samples):
            variables = random_variables(rng, self.max_vars)
            phi = random_formula(rng, variables, depth=2, max_csize=1)
            psi = random_formula(rng, variables, depth=2, max_csize=2)
            self.cases += 1

            weakest = abduce_weakest(phi, psi, variables).formula
            minimal = abduce_weakest(phi, psi, variables, minimal=True).formula
            positive = abduce_positive(phi, psi, variables).formula
            for kind, zeta in (
                ("weakest", weakest),
                ("minimal", minimal),
                ("positive", positive),
            ):
                self.check_solution(kind, phi, psi, zeta, variables)

            # A minimal solution has no detachable non-empty part
            if sat(minimal, variables).success:
                larger = SepConj(minimal, Not(Emp()))
                if entails(minimal, larger, variables).success:
                    self.fail(kind="minimality", phi=render(phi), psi=render(psi))
        return self.failures

    @classmethod
    def get_param_grid(cls):
        return {"seed": np.arange(10), "samples": [5]}
