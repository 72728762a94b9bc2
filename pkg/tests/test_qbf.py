import pytest

from strongsep.decide import sat
from strongsep.errors import QbfError
from strongsep.formula import free_vars
from strongsep.generate import make_rng, random_qbf
from strongsep.qbf import (
    Exists,
    Forall,
    QAnd,
    QNot,
    QVar,
    parse_qbf,
    qbf_eval,
    qbf_model_check,
    qbf_translate,
    render_qbf,
)

CASES = [
    ("(exists x x)", True),
    ("(forall x x)", False),
    ("(forall x (exists y (or (and x y) (and (not x) (not y)))))", True),
    ("(exists x (forall y (and x y)))", False),
    ("(exists x (forall y (or (not y) x)))", True),
]


def test_parse():
    f = parse_qbf("(forall a (exists b (and a (not b) a)))")
    body = QAnd(QAnd(QVar("a"), QNot(QVar("b"))), QVar("a"))
    assert f == Forall("a", Exists("b", body))
    assert parse_qbf(render_qbf(f)) == f
    assert str(f) == "(forall a (exists b (and (and a (not b)) a)))"


@pytest.mark.parametrize(
    "text",
    [
        "(forall x y)",
        "(exists x (not (and x x)))",
        "(exists x (exists x x))",
        "(exists nil nil)",
        "(exists x (and x))",
        "(exists x x",
        "(exists x (xor x x))",
        "(exists x x) y",
        "(exists x x) @{",
    ],
)
def test_invalid(text):
    with pytest.raises(QbfError):
        parse_qbf(text)


@pytest.mark.parametrize("text,expected", CASES)
def test_translation(text, expected):
    f = parse_qbf(text)
    assert qbf_eval(f) == expected
    assert sat(qbf_translate(f)).success == expected
    assert qbf_model_check(f) == expected


def test_translation_variables():
    f = parse_qbf("(forall x (exists y (or x y)))")
    assert free_vars(qbf_translate(f)) == {"x", "y", "nil"}


def test_random_qbfs():
    rng = make_rng(7)
    for _ in range(5):
        f = random_qbf(rng, n_vars=2, depth=2)
        assert sat(qbf_translate(f)).success == qbf_eval(f)
