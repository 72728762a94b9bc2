"""Shared fixtures: the five-chunk model and list-segment models.

Copyright (c) 2025 Konrad Rieck. MIT License
"""

import pytest
from hypothesis import strategies as st

from strongsep.formula import (
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
)
from strongsep.model import Model

NAMES = ["x", "y", "nil"]


@pytest.fixture
def chunk_model():
    """Model with two positive and three negative chunks."""
    stack = {"x": 1, "y": 3, "u": 5, "z": 3, "w": 7, "v": 9, "nil": 0}
    heap = {1: 2, 2: 3, 3: 8, 4: 6, 5: 6, 6: 3, 7: 6, 9: 9, 10: 11, 11: 10}
    return Model(stack, heap)


@pytest.fixture
def joined_lists():
    """ls(x, y) * ls(y, nil) joined at the location of y."""
    return Model({"x": 1, "y": 3, "nil": 0}, {1: 2, 2: 3, 3: 4, 4: 0})


@pytest.fixture
def shared_tail():
    """List from x to nil with a pointer into its middle from garbage."""
    return Model({"x": 1, "nil": 0}, {1: 2, 2: 0, 5: 2})


def names(pool=NAMES):
    return st.sampled_from(pool)


def atoms(pool=NAMES):
    return st.one_of(
        st.just(Emp()),
        st.builds(Eq, names(pool), names(pool)),
        st.builds(Neq, names(pool), names(pool)),
        st.builds(PointsTo, names(pool), names(pool)),
        st.builds(Ls, names(pool), names(pool)),
    )


def formulas(pool=NAMES, max_leaves=6, positive=False, septraction=True):
    def extend(children):
        options = [
            st.builds(SepConj, children, children),
            st.builds(And, children, children),
            st.builds(Or, children, children),
        ]
        if septraction:
            options.append(st.builds(Septraction, children, children))
        if not positive:
            options.append(st.builds(Not, children))
        return st.one_of(*options)

    return st.recursive(atoms(pool), extend, max_leaves=max_leaves)
