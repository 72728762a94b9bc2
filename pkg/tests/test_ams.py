import pytest

from strongsep.ams import (
    Ams,
    AbstractionSet,
    Edge,
    EdgeLabel,
    abstract_lists,
    ams_from_json,
    ams_to_json,
    compose,
    decompose,
    divide,
    enumerate_free,
    enumerate_universe,
    induced_ams,
    lift,
    realize,
    universe_count,
)
from strongsep.errors import AmsError, LimitError
from strongsep.formula import Ls
from strongsep.limits import Limits
from strongsep.oracle import holds

NIL, X, Y = frozenset({"nil"}), frozenset({"x"}), frozenset({"y"})
NODES = (NIL, X, Y)
UNIVERSE = enumerate_universe(NODES, 1)


def test_induced_ams(chunk_model):
    a = induced_ams(chunk_model)
    u, v, w, x = (frozenset({name}) for name in "uvwx")
    yz = frozenset({"y", "z"})
    assert a.nodes == (NIL, u, v, w, x, yz)
    assert a.edges == {
        Edge(x, yz, EdgeLabel.AT_LEAST2),
        Edge(v, v, EdgeLabel.EXACTLY1),
    }
    assert a.negalloc == {frozenset({u, w}), frozenset({yz})}
    assert a.garbage == 1
    assert a.validate() is a


def test_universe_count():
    assert len(UNIVERSE.elems) == universe_count(NODES, 1) == 130
    assert len(AbstractionSet.universe(NODES, 1)) == 130


def test_realize_round_trip():
    for a in UNIVERSE:
        assert induced_ams(realize(a)) == a


def test_compose_and_divide():
    a1 = Ams.build(NODES, [(X, Y, EdgeLabel.AT_LEAST2)])
    a2 = Ams.build(NODES, [(Y, NIL, EdgeLabel.EXACTLY1)], garbage=1)
    a = compose(a1, a2)
    assert a.alloc == {X, Y}
    assert a.garbage == 1
    assert divide(a, a1) == a2
    assert divide(a, a2) == a1
    assert compose(a, a1) is None
    assert divide(a1, a2) is None


def test_decompose(joined_lists):
    a1 = Ams.build(NODES, [(X, Y, EdgeLabel.AT_LEAST2)])
    a2 = Ams.build(NODES, [(Y, NIL, EdgeLabel.AT_LEAST2)])
    assert decompose(joined_lists, a1, a2) == ({1: 2, 2: 3}, {3: 4, 4: 0})
    assert decompose(joined_lists, a1, a1) is None


def test_lift():
    saturated = Ams(NODES, garbage=1)
    lifted = lift(saturated, 1, 3)
    assert sorted(a.garbage for a in lifted) == [1, 2, 3]
    assert list(lift(Ams(NODES), 1, 3)) == [Ams(NODES)]
    with pytest.raises(AmsError):
        lift(Ams(NODES, garbage=2), 1, 3)


def test_set_algebra():
    single = AbstractionSet(NODES, 1, [Ams(NODES)])
    universe = AbstractionSet.universe(NODES, 1)
    assert universe.intersect(single) == single
    assert single.negate().union(single) == universe
    assert len(single.negate()) == 129
    assert single.negate().materialize() == single.negate()
    assert single.intersect(single.negate()).is_empty()


def test_garbage_free():
    free = AbstractionSet.universe(NODES, 1).garbage_free()
    assert all(a.is_garbage_free() for a in free)
    assert len(free) == 49


def test_enumerate_free_avoids_used():
    states = enumerate_free(NODES, {X}, 0)
    assert states
    assert all(X not in a.alloc for a in states)


def test_validate():
    with pytest.raises(AmsError):
        Ams.build(NODES, [(NIL, X, EdgeLabel.EXACTLY1)]).validate()
    with pytest.raises(AmsError):
        Ams.build(NODES, [(X, Y, EdgeLabel.EXACTLY1)], negalloc=[{X}]).validate()
    with pytest.raises(AmsError):
        Ams((X, NIL)).validate()


def test_json(chunk_model):
    a = induced_ams(chunk_model)
    assert ams_from_json(ams_to_json(a)) == a
    with pytest.raises(AmsError):
        ams_from_json('{"nodes": [["x"]]}')


def test_universe_guard():
    nodes = [frozenset({name}) for name in ("nil", "a", "b", "c", "d", "e")]
    with pytest.raises(LimitError):
        enumerate_universe(nodes, 2, Limits(max_universe=1000))


@pytest.mark.parametrize(
    "nodes",
    [
        (NIL, X, Y),
        (frozenset({"nil", "x"}), Y),
        (frozenset({"nil", "y"}), X),
    ],
)
def test_abstract_lists_match_oracle(nodes):
    lists = abstract_lists(nodes, "x", "y")
    for a in enumerate_universe(nodes, 0):
        assert (a in lists) == holds(realize(a), Ls("x", "y")), a
