"""Separation algebra and abstraction laws on random models.

Copyright (c) 2025 Konrad Rieck. MIT License
"""

import numpy as np

from strongsep.ams import compose, decompose, induced_ams, realize
from strongsep.errors import LimitError
from strongsep.formula import csize, render
from strongsep.generate import (
    VARIABLE_NAMES,
    make_rng,
    random_formula,
    random_heap,
    random_model,
)
from strongsep.limits import DEFAULT_LIMITS
from strongsep.model import Model, strong_union
from strongsep.oracle import holds

from .base import BaseCheck

# Realized models with extra garbage cells exceed the default heap guard
REFINEMENT_LIMITS = DEFAULT_LIMITS.override(max_heap=14)


class AlgebraLaws(BaseCheck):
    """Strong union, composition, decomposition and refinement laws."""

    def __init__(self, seed=0, samples=100, max_vars=2, max_heap=3, **params):
        super().__init__(**params)
        self.seed = seed
        self.samples = samples
        self.variables = list(VARIABLE_NAMES[:max_vars])
        self.max_heap = max_heap

    def heaps(self, rng):
        m1 = random_model(rng, self.variables, self.max_heap)
        size = len(self.variables) + 2 * self.max_heap + 1
        h2, h3 = (random_heap(rng, size, self.max_heap) for _ in range(2))
        return m1.stack, m1.heap, h2, h3

    def union_laws(self, s, h1, h2, h3):
        if strong_union(s, h1, h2) != strong_union(s, h2, h1):
            self.fail(law="commutativity", stack=s, heaps=[h1, h2])
        if strong_union(s, h1, {}) != h1:
            self.fail(law="unit", stack=s, heaps=[h1])
        h12, h23 = strong_union(s, h1, h2), strong_union(s, h2, h3)
        left = None if h12 is None else strong_union(s, h12, h3)
        right = None if h23 is None else strong_union(s, h1, h23)
        if left != right:
            self.fail(law="associativity", stack=s, heaps=[h1, h2, h3])

    def abstraction_laws(self, s, h1, h2):
        union = strong_union(s, h1, h2)
        if union is None:
            return
        m = Model(s, union)
        a1, a2 = induced_ams(Model(s, h1)), induced_ams(Model(s, h2))
        if induced_ams(m) != compose(a1, a2):
            self.fail(law="homomorphism", model=str(m))
        parts = decompose(m, a1, a2)
        if parts is None or [induced_ams(Model(s, h)) for h in parts] != [a1, a2]:
            self.fail(law="decomposition", model=str(m))
        a = induced_ams(m)
        if induced_ams(realize(a)) != a:
            self.fail(law="realization", ams=str(a))

    def twin_groups(self, m, c):
        """Groups of models that no formula of chunk size c tells apart."""
        a = induced_ams(m)
        saturated = [realize(a.with_garbage(g)) for g in (c, c + 1, c + 3)]
        if a.garbage >= c:
            return [[m, realize(a), *saturated]]
        return [[m, realize(a)], saturated]

    def refinement(self, rng, m):
        phi = random_formula(rng, self.variables)
        for twins in self.twin_groups(m, csize(phi)):
            try:
                verdicts = {holds(t, phi, limits=REFINEMENT_LIMITS) for t in twins}
            except LimitError:
                continue
            if len(verdicts) != 1:
                self.fail(law="refinement", model=str(m), formula=render(phi))

    def run(self):
        rng = make_rng(self.seed)
        for _ in range(self.samples):
            s, h1, h2, h3 = self.heaps(rng)
            self.cases += 1
            self.union_laws(s, h1, h2, h3)
            self.abstraction_laws(s, h1, h2)
            self.refinement(rng, Model(s, h1))
        return self.failures

    @classmethod
    def get_param_grid(cls):
        return {"seed": np.arange(10), "samples": [100]}
