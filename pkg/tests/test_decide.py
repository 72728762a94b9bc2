import logging

import pytest
from conftest import formulas
from hypothesis import given, settings

from strongsep.ams import clamp, enumerate_universe, realize, sept_sets
from strongsep.decide import (
    Abstractor,
    StackShape,
    Status,
    entails,
    model_check,
    sat,
    shapes,
    verdict_to_json,
)
from strongsep.errors import LimitError, ModelError
from strongsep.formula import Septraction, parse
from strongsep.limits import Limits
from strongsep.oracle import enumerate_models, holds

SAT_CASES = [
    ("x -> y * y -> x", True),
    ("x -> y * x -> z", False),
    ("x = y * x != y", False),
    ("ls(x, nil) && x -> nil", True),
    ("x -> y -o x -> y", True),
    ("x -> y -o x -> y * x -> y", False),
    # Without stack locations inside, a list is a single chunk
    ("!emp * !emp && ls(x, nil)", False),
    ("nil -> x", False),
]

ENTAIL_CASES = [
    ("x -> y", "ls(x, y)", True),
    ("ls(x, y) * ls(y, nil)", "ls(x, nil)", True),
    ("ls(x, y)", "x -> y", False),
    ("emp", "ls(x, x)", True),
    ("x -> nil", "!emp", True),
    ("ls(x, nil)", "x != nil", False),
    ("x -> y * ls(y, nil)", "ls(x, nil)", True),
    ("x -> nil * true", "x -> nil", False),
]


@pytest.mark.parametrize("text,expected", SAT_CASES)
def test_sat(text, expected):
    phi = parse(text)
    verdict = sat(phi)
    assert verdict.success == expected
    if expected:
        assert verdict.status is Status.SAT
        assert holds(verdict.witness, phi)
    else:
        assert verdict.witness is None


@pytest.mark.parametrize("lhs,rhs,expected", ENTAIL_CASES)
def test_entails(lhs, rhs, expected):
    phi, psi = parse(lhs), parse(rhs)
    verdict = entails(phi, psi)
    assert verdict.success == expected
    if not expected:
        assert verdict.status is Status.INVALID
        assert holds(verdict.witness, phi)
        assert not holds(verdict.witness, psi)


def test_extra_variables():
    # A fresh stack variable may alias x
    phi, psi = parse("x -> nil"), parse("x -> nil * u != x")
    assert not entails(phi, psi, variables={"u"}).success
    assert entails(parse("emp"), parse("emp"), variables={"u"}).success


def test_verdict_json():
    data = verdict_to_json(sat(parse("x -> nil")))
    assert data["status"] == "sat"
    assert data["witness"]["heap"] == {"1": 0}
    assert data["ams"]["edges"] == [[["x"], ["nil"], "=1"]]
    assert verdict_to_json(sat(parse("nil -> nil"))) == {"status": "unsat"}


def test_shapes():
    assert len(list(shapes({"x", "y"}))) == 5
    assert len(list(shapes({"x", "y"}, parse("x != y")))) == 3
    assert len(list(shapes({"x", "y"}, parse("x = y")))) == 2
    assert list(shapes({"x"}, parse("x != x"))) == []
    with pytest.raises(LimitError):
        list(shapes({"a", "b", "c"}, limits=Limits(max_vars=2)))


def test_model_check(chunk_model, joined_lists):
    assert model_check(chunk_model, parse("ls(x, y) * v -> v * true"))
    assert not model_check(chunk_model, parse("ls(x, y) * v -> v"))
    assert model_check(chunk_model, parse("!emp * !emp * !emp * !emp * !emp"))
    assert model_check(joined_lists, parse("ls(x, nil)"))
    with pytest.raises(ModelError):
        model_check(joined_lists, parse("q -> nil"))


MODELS = [
    model
    for shape in shapes({"x", "y"})
    for model in enumerate_models(shape.nodes, 2)
]


@settings(max_examples=25, deadline=None)
@given(phi=formulas(max_leaves=4, septraction=False))
def test_model_check_matches_oracle(phi):
    for model in MODELS:
        assert model_check(model, phi) == holds(model, phi)


def test_abstractor_member_matches_abst():
    shape = StackShape.of([{"nil"}, {"x"}, {"y"}])
    phi = parse("ls(x, y) * !emp")
    states = Abstractor(shape).abst(phi)
    abstractor = Abstractor(shape)
    for a in enumerate_universe(shape.nodes, 2):
        assert abstractor.member(phi, a) == (clamp(a, states.bound) in states)


@pytest.mark.parametrize(
    "left, right",
    [
        ("x -> nil", "ls(x, nil)"),
        ("x -> nil", "x -> nil"),
        ("emp", "x -> nil"),
        ("ls(x, nil)", "ls(x, nil)"),
    ],
)
def test_sept_sets_match_oracle(left, right):
    shape = StackShape.of([{"nil"}, {"x"}])
    abstractor = Abstractor(shape)
    left, right = parse(left), parse(right)
    s1, s2 = abstractor.abst(left), abstractor.abst(right)
    universe = enumerate_universe(shape.nodes, max(s1.bound, s2.bound))

    states = sept_sets(s1, s2, universe)
    via_abst = abstractor.abst(Septraction(left, right))
    for a in universe:
        expected = holds(realize(a), Septraction(left, right))
        assert (a in states) == expected, a
        assert (clamp(a, via_abst.bound) in via_abst) == expected, a


def test_unchecked_witness_is_logged(monkeypatch, caplog):
    def refuse(*args, **kwargs):
        raise LimitError("oracle refused")

    monkeypatch.setattr("strongsep.decide.holds", refuse)
    with caplog.at_level(logging.DEBUG, logger="strongsep.decide"):
        verdict = sat(parse("x -> nil"))
    assert verdict.status is Status.SAT
    assert "Skipping oracle cross-check: oracle refused" in caplog.text
