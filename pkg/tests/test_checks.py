import pytest

from checks.registry import checks, snake_case
from strongsep.formula import csize, parse
from strongsep.generate import make_rng
from strongsep.model import Model
from strongsep.oracle import holds


def test_registry():
    assert snake_case("OracleEquivalence") == "oracle_equivalence"
    assert set(checks) == {
        "abduction_solutions",
        "algebra_laws",
        "entailment_regressions",
        "normal_form_equivalence",
        "oracle_equivalence",
        "positive_coincidence",
        "qbf_reduction",
    }
    for check in checks.values():
        assert isinstance(check.get_param_grid(), dict)


def test_entailment_regressions():
    check = checks["entailment_regressions"]()
    assert check.run() == []
    assert check.cases == 7


def test_small_oracle_equivalence():
    check = checks["oracle_equivalence"](seed=3, formulas=2, max_vars=1, max_heap=1)
    assert check.run() == []
    assert check.cases > 0


def test_small_positive_coincidence():
    check = checks["positive_coincidence"](seed=1, formulas=2, max_vars=1, max_heap=1)
    assert check.run() == []


@pytest.mark.slow
@pytest.mark.parametrize("name", sorted(checks))
def test_full_checks(name):
    check = checks[name]()
    assert check.run() == []


def test_refinement_twins():
    check = checks["algebra_laws"]()
    pair = parse("!emp * !emp")

    single = Model({"x": 1, "nil": 0}, {1: 0})
    groups = check.twin_groups(single, csize(pair))
    assert [len(twins) for twins in groups] == [2, 3]
    assert [{holds(t, pair) for t in twins} for twins in groups] == [{False}, {True}]

    littered = Model({"x": 1, "nil": 0}, {1: 0, 5: 5, 6: 6})
    (twins,) = check.twin_groups(littered, csize(pair))
    assert len(twins) == 5
    assert {holds(t, pair) for t in twins} == {True}

    check.refinement(make_rng(0), single)
    assert check.failures == []
