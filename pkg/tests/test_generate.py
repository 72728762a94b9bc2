from strongsep.formula import NIL, csize, free_vars, is_positive
from strongsep.generate import (
    make_rng,
    random_formula,
    random_model,
    random_qbf,
    random_variables,
)
from strongsep.qbf import qbf_vars, validate


def test_seeded_formulas_repeat():
    first = random_formula(make_rng(5), ["x", "y"])
    second = random_formula(make_rng(5), ["x", "y"])
    assert first == second


def test_random_formulas():
    rng = make_rng(0)
    for _ in range(50):
        phi = random_formula(rng, ["x", "y"], max_csize=2, positive=True)
        assert csize(phi) <= 2
        assert is_positive(phi)
        assert free_vars(phi) <= {"x", "y", NIL}


def test_random_models():
    rng = make_rng(1)
    for _ in range(50):
        variables = random_variables(rng, max_vars=3)
        model = random_model(rng, variables, max_heap=3)
        assert set(model.stack) == set(variables) | {NIL}
        assert len(model.heap) <= 3
        assert model.nil_loc not in model.heap


def test_random_qbfs_are_closed():
    rng = make_rng(2)
    for _ in range(20):
        f = random_qbf(rng, n_vars=3, depth=3)
        assert validate(f) is f
        assert qbf_vars(f) == ["p0", "p1", "p2"]
