"""Seeded random formulas, QBFs and models for experiments.

Copyright (c) 2025 Konrad Rieck. MIT License
"""

import numpy as np

from .formula import (
    NIL,
    And,
    Emp,
    Eq,
    Ls,
    Neq,
    Not,
    Or,
    PointsTo,
    SepConj,
    Septraction,
    csize,
)
from .model import Model
from .qbf import Exists, Forall, QAnd, QNot, QOr, QVar

VARIABLE_NAMES = ("x", "y", "z", "u", "w", "v")


def make_rng(seed=None):
    return np.random.default_rng(seed)


def random_variables(rng, max_vars=2):
    """Between one and max_vars program variables."""
    count = int(rng.integers(1, max_vars + 1))
    return list(VARIABLE_NAMES[:count])


def random_atom(rng, variables):
    names = list(variables) + [NIL]
    kind = int(rng.integers(5))
    if kind == 0:
        return Emp()
    x, y = (str(name) for name in rng.choice(names, size=2))
    return (Eq, Neq, PointsTo, Ls)[kind - 1](x, y)


def random_formula(rng, variables, depth=3, max_csize=2, positive=False):
    """Random formula over the variables with chunk size at most max_csize."""
    while True:
        phi = _random_tree(rng, variables, depth, positive)
        if csize(phi) <= max_csize:
            return phi


def _random_tree(rng, variables, depth, positive):
    if depth == 0 or rng.random() < 0.3:
        return random_atom(rng, variables)
    ops = [SepConj, Septraction, And, Or]
    if not positive:
        ops.append(Not)
    op = ops[int(rng.integers(len(ops)))]
    if op is Not:
        return Not(_random_tree(rng, variables, depth - 1, positive))
    left = _random_tree(rng, variables, depth - 1, positive)
    right = _random_tree(rng, variables, depth - 1, positive)
    return op(left, right)


def random_qbf(rng, n_vars=3, depth=3):
    """Closed QBF in negation normal form with a random quantifier prefix."""
    names = [f"p{i}" for i in range(n_vars)]
    matrix = _random_matrix(rng, names, depth)
    for name in reversed(names):
        quantifier = Exists if rng.random() < 0.5 else Forall
        matrix = quantifier(name, matrix)
    return matrix


def _random_matrix(rng, names, depth):
    if depth == 0 or rng.random() < 0.25:
        literal = QVar(str(rng.choice(names)))
        return QNot(literal) if rng.random() < 0.5 else literal
    node = QAnd if rng.random() < 0.5 else QOr
    return node(
        _random_matrix(rng, names, depth - 1), _random_matrix(rng, names, depth - 1)
    )


def random_heap(rng, size, max_heap=3):
    """Heap over locations 1..size-1 pointing into 0..size-1."""
    count = min(int(rng.integers(max_heap + 1)), size - 1)
    sources = rng.choice(np.arange(1, size), size=count, replace=False)
    return {int(src): int(rng.integers(size)) for src in sources}


def random_model(rng, variables, max_heap=3):
    """Model with nil at 0 and locations drawn from a small range."""
    size = len(variables) + max_heap + 1
    stack = {NIL: 0}
    for name in variables:
        stack[name] = int(rng.integers(size))
    return Model(stack, random_heap(rng, size, max_heap))
