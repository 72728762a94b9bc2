import pytest
from conftest import formulas
from hypothesis import given, settings

from strongsep.errors import FormulaSyntaxError
from strongsep.formula import (
    And,
    Emp,
    Eq,
    Ls,
    Not,
    Or,
    PointsTo,
    SepConj,
    Septraction,
    csize,
    free_vars,
    is_positive,
    ls2,
    parse,
    render,
    sep_conjuncts,
    sep_join,
    size,
    substitute,
    true_,
    unsat,
    wand,
)


def test_precedence():
    phi = parse("x -> y * y -> nil || emp && x = y")
    expected = Or(
        SepConj(PointsTo("x", "y"), PointsTo("y", "nil")), And(Emp(), Eq("x", "y"))
    )
    assert phi == expected


def test_septraction_is_right_associative():
    phi = parse("emp -o emp -o x -> y")
    assert phi == Septraction(Emp(), Septraction(Emp(), PointsTo("x", "y")))


def test_derived_forms():
    assert parse("true") == true_()
    assert parse("x -> y -* ls(x, y)") == wand(PointsTo("x", "y"), Ls("x", "y"))
    assert parse("ls2(x, y)") == And(Ls("x", "y"), Not(PointsTo("x", "y")))


def test_syntax_error_position():
    with pytest.raises(FormulaSyntaxError) as e:
        parse("x -> ")
    assert (e.value.line, e.value.column) == (1, 6)

    with pytest.raises(FormulaSyntaxError) as e:
        parse("emp *\n  @")
    assert (e.value.line, e.value.column) == (2, 3)


def test_reserved_and_fresh_names():
    with pytest.raises(FormulaSyntaxError, match="Reserved word 'ls'"):
        parse("ls -> x")
    with pytest.raises(FormulaSyntaxError, match="Reserved word 'emp'"):
        parse("x -> y * emp = x")
    with pytest.raises(FormulaSyntaxError):
        parse("x#1 -> y")
    assert parse("x#1 -> y", allow_fresh=True) == PointsTo("x#1", "y")


def test_unbalanced_parentheses():
    with pytest.raises(FormulaSyntaxError):
        parse("(emp * emp")
    with pytest.raises(FormulaSyntaxError):
        parse("emp)")


@given(phi=formulas())
def test_render_parse(phi):
    assert parse(render(phi)) == phi
    assert parse(render(phi, sugar=False)) == phi


def test_render_sugar():
    assert render(true_()) == "true"
    assert render(ls2("x", "y")) == "ls2(x, y)"
    assert render(wand(Emp(), Emp())) == "emp -* emp"
    assert render(Not(SepConj(Emp(), Emp()))) == "!(emp * emp)"


def test_csize():
    assert csize(Emp()) == 1
    assert csize(parse("x -> y * ls(y, nil)")) == 2
    assert csize(parse("(x -> y * emp) -o ls(x, nil)")) == 1
    assert csize(parse("!(emp * emp) && emp")) == 2


def test_size():
    assert size(Emp()) == 1
    assert size(parse("x -> y * ls(y, nil)")) == 3
    assert size(parse("!(emp * emp) && emp")) == 6
    assert size(true_()) == 4


@settings(max_examples=10_000, deadline=None)
@given(phi=formulas())
def test_csize_is_bounded_by_size(phi):
    assert 1 <= csize(phi) <= size(phi)


def test_free_vars_and_substitute():
    phi = parse("x -> y * ls(y, nil)")
    assert free_vars(phi) == {"x", "y", "nil"}
    renamed = substitute(phi, {"y": "z", "x": "y"})
    assert renamed == parse("y -> z * ls(z, nil)")


def test_positive():
    assert is_positive(parse("x -> y * (emp || ls(x, y)) -o emp"))
    assert not is_positive(parse("!emp"))
    assert not is_positive(ls2("x", "y"))
    assert is_positive(ls2("x", "y"), modulo_ls2=True)


def test_joins():
    items = [Emp(), PointsTo("x", "y"), Ls("y", "nil")]
    assert sep_conjuncts(sep_join(items)) == items
    assert sep_join([]) == Emp()
    assert unsat() == And(Emp(), Not(Emp()))
