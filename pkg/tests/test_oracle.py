import logging

import pytest
from conftest import formulas
from hypothesis import given, settings

from strongsep.errors import LimitError, ModelError
from strongsep.formula import parse
from strongsep.limits import DEFAULT_LIMITS
from strongsep.model import Model
from strongsep.oracle import (
    Evaluator,
    ExtensionBudget,
    Mode,
    enumerate_models,
    extension_heaps,
    holds,
)

EMPTY = Model({"x": 1, "nil": 0}, {})
SMALL_MODELS = list(enumerate_models([{"x"}], 2))
FORCED = DEFAULT_LIMITS.override(force=True)


def test_atoms(joined_lists):
    assert holds(EMPTY, parse("emp"))
    assert holds(EMPTY, parse("x != nil"))
    assert not holds(EMPTY, parse("x = nil"))
    assert holds(joined_lists, parse("ls(x, nil)"))
    assert not holds(joined_lists, parse("x -> y"))
    assert not holds(Model({"nil": 0}, {}), parse("nil -> nil"))


def test_strong_splits_respect_chunks(joined_lists, shared_tail):
    phi = parse("ls(x, y) * ls(y, nil)")
    assert holds(joined_lists, phi, Mode.STRONG)
    assert holds(joined_lists, phi, Mode.WEAK)

    phi = parse("ls(x, nil) * true")
    assert holds(shared_tail, phi, Mode.WEAK)
    assert not holds(shared_tail, phi, Mode.STRONG)

    phi = parse("!emp * !emp")
    assert holds(shared_tail, phi, Mode.WEAK)
    assert not holds(shared_tail, phi, Mode.STRONG)


def test_septraction():
    assert holds(EMPTY, parse("x -> nil -o ls(x, nil)"))
    assert not holds(EMPTY, parse("x -> nil -o emp"))
    assert holds(EMPTY, parse("ls(x, nil) -o ls(x, nil)"))

    # x is already allocated, so no cell of x can be added
    allocated = Model({"x": 1, "nil": 0}, {1: 0})
    assert not holds(allocated, parse("x -> nil -o true"))


def test_guards(chunk_model, joined_lists):
    with pytest.raises(LimitError):
        holds(chunk_model, parse("emp"))
    assert holds(chunk_model, parse("!emp"), limits=FORCED)
    with pytest.raises(ModelError):
        holds(joined_lists, parse("z -> x"))
    with pytest.raises(ModelError):
        Evaluator({"x": 1}).check(EMPTY, parse("emp"))


def test_small_budget_warns(caplog):
    budget = ExtensionBudget(0, 0)
    with caplog.at_level(logging.WARNING, logger="strongsep.oracle"):
        assert not holds(EMPTY, parse("ls(x, nil) -o true"), budget=budget)
    assert "below the default" in caplog.text


def test_extension_heaps():
    budget = ExtensionBudget(1, 1)
    heaps = list(extension_heaps([0, 1], {0}, 10, budget))
    assert {} in heaps
    assert {1: 10} in heaps
    assert {10: 10} in heaps
    assert all(0 not in heap for heap in heaps)


def test_enumerate_models():
    assert len(list(enumerate_models([{"x"}], 0))) == 1
    assert len(list(enumerate_models([{"x"}], 1))) == 8
    with pytest.raises(ModelError):
        list(enumerate_models([{"x", "y"}, {"y"}], 1))


POSITIVE = formulas(["x", "nil"], max_leaves=5, positive=True, septraction=False)


@settings(max_examples=40, deadline=None)
@given(phi=POSITIVE)
def test_positive_formulas_agree(phi):
    for model in SMALL_MODELS:
        assert holds(model, phi, Mode.STRONG) == holds(model, phi, Mode.WEAK)


def test_positive_septraction_agrees():
    phi = parse("x -> nil -o ls(x, nil) * true")
    for model in list(enumerate_models([{"x"}], 1)):
        assert holds(model, phi, Mode.STRONG) == holds(model, phi, Mode.WEAK)
