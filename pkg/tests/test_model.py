from itertools import combinations, product

import pytest
from conftest import formulas
from hypothesis import given, settings
from hypothesis import strategies as st

from strongsep.errors import ModelError
from strongsep.formula import Ls, PointsTo
from strongsep.model import (
    Model,
    UnionFind,
    canonical_key,
    chunk_heaps,
    chunks,
    dangling,
    img,
    is_list_segment,
    isomorphic,
    model_from_json,
    model_to_json,
    std_union,
    strong_union,
)
from strongsep.oracle import holds

heaps = st.dictionaries(
    st.integers(min_value=1, max_value=6),
    st.integers(min_value=0, max_value=6),
    max_size=4,
)
STACK = {"x": 1, "y": 2, "nil": 0}

models = st.builds(
    lambda x, y, heap: Model({"x": x, "y": y, "nil": 0}, heap),
    st.integers(min_value=0, max_value=6),
    st.integers(min_value=0, max_value=6),
    heaps,
)
# Bijections of the non-nil locations 1..6 onto 11..16
renamings = st.permutations(range(11, 17)).map(
    lambda image: {0: 0, **{i + 1: loc for i, loc in enumerate(image)}}
)


def rename(model, mapping):
    stack = {name: mapping[loc] for name, loc in model.stack.items()}
    heap = {mapping[src]: mapping[dst] for src, dst in model.heap.items()}
    return Model(stack, heap)


def test_nil_is_never_allocated():
    with pytest.raises(ModelError):
        Model({"nil": 0}, {0: 1})
    with pytest.raises(ModelError):
        Model({"x": 1}, {})


def test_unions():
    assert std_union({1: 2}, {2: 3}) == {1: 2, 2: 3}
    assert std_union({1: 2}, {1: 3}) is None
    # Sharing location 2 is only allowed when a variable points to it
    assert strong_union({"x": 1, "nil": 0}, {1: 2}, {2: 3}) is None
    assert strong_union({"x": 2, "nil": 0}, {1: 2}, {2: 3}) == {1: 2, 2: 3}


@given(h1=heaps, h2=heaps, h3=heaps)
def test_strong_union_laws(h1, h2, h3):
    assert strong_union(STACK, h1, h2) == strong_union(STACK, h2, h1)
    assert strong_union(STACK, h1, {}) == h1
    h12, h23 = strong_union(STACK, h1, h2), strong_union(STACK, h2, h3)
    left = None if h12 is None else strong_union(STACK, h12, h3)
    right = None if h23 is None else strong_union(STACK, h1, h23)
    assert left == right
    if h12 is not None:
        assert std_union(h1, h2) == h12


def test_list_segments():
    assert is_list_segment({}, 1, 1)
    assert not is_list_segment({}, 1, 2)
    assert is_list_segment({1: 2, 2: 3}, 1, 3)
    assert is_list_segment({9: 9}, 9, 9)
    # Lassos re-entering the middle are not segments
    assert not is_list_segment({1: 2, 2: 3, 3: 2}, 1, 2)
    assert not is_list_segment({1: 2, 3: 4}, 1, 2)


def test_chunks(chunk_model):
    parts = chunks(chunk_model)
    assert [part.heap for part in parts] == [
        {1: 2, 2: 3},
        {3: 8},
        {4: 6, 5: 6, 6: 3, 7: 6},
        {9: 9},
        {10: 11, 11: 10},
    ]
    assert [part.positive for part in parts] == [True, False, False, True, False]
    assert parts[0].witness == Ls("x", "y")
    assert parts[3].witness == PointsTo("v", "v")

    joined = {}
    for part in parts:
        joined = strong_union(chunk_model.stack, joined, part.heap)
    assert joined == chunk_model.heap


def test_chunks_of_empty_heap():
    assert chunks(Model({"nil": 0}, {})) == []


def splittable(stack, heap):
    """Whether the heap is the strong union of two non-empty parts."""
    first, *rest = sorted(heap)
    for r in range(len(rest)):
        for others in combinations(rest, r):
            left = {src: heap[src] for src in (first, *others)}
            right = {src: dst for src, dst in heap.items() if src not in left}
            if strong_union(stack, left, right) is not None:
                return True
    return False


@pytest.mark.parametrize(
    "n_locs",
    [4, pytest.param(6, marks=pytest.mark.slow)],
)
def test_chunks_are_minimal(n_locs):
    # Every heap over sources 1..n_locs, -1 marking an unallocated source
    locations = range(1, n_locs + 1)
    for targets in product(range(-1, n_locs + 1), repeat=n_locs):
        heap = {src: dst for src, dst in zip(locations, targets) if dst >= 0}
        parts = chunk_heaps(img(STACK), heap)
        assert all(parts)

        joined = {}
        for part in parts:
            joined = strong_union(STACK, joined, part)
        assert joined == heap
        assert not any(splittable(STACK, part) for part in parts)


def test_isomorphism():
    m1 = Model({"x": 1, "nil": 0}, {1: 2})
    m2 = Model({"x": 5, "nil": 9}, {5: 7})
    assert isomorphic(m1, m2)
    assert isomorphic(m1, m1)

    aliased = Model({"x": 1, "y": 1, "nil": 0}, {1: 2})
    apart = Model({"x": 1, "y": 2, "nil": 0}, {1: 2})
    assert not isomorphic(aliased, apart)


@given(m1=models, m2=models, m3=models, r1=renamings, r2=renamings)
def test_isomorphism_is_an_equivalence(m1, m2, m3, r1, r2):
    assert isomorphic(m1, m1)
    assert isomorphic(m1, m2) == isomorphic(m2, m1)
    if isomorphic(m1, m2) and isomorphic(m2, m3):
        assert isomorphic(m1, m3)

    # Renaming chains stay in the class; the second renaming maps 11..16
    copy = rename(m1, r1)
    back = {loc: r2[i + 1] for i, loc in enumerate(range(11, 17))}
    twice = rename(copy, {0: 0, **back})
    assert isomorphic(m1, copy)
    assert isomorphic(copy, twice)
    assert isomorphic(m1, twice)


@settings(max_examples=100, deadline=None)
@given(
    phi=formulas(max_leaves=5, septraction=False), model=models, mapping=renamings
)
def test_isomorphic_models_agree(phi, model, mapping):
    assert holds(model, phi) == holds(rename(model, mapping), phi)


def test_canonical_key_of_cycles():
    rotated = Model({"x": 1, "nil": 0}, {1: 2, 2: 3, 3: 1})
    shifted = Model({"x": 3, "nil": 0}, {3: 4, 4: 5, 5: 3})
    assert canonical_key(rotated) == canonical_key(shifted)


def test_dangling():
    assert dangling(Model({"nil": 0}, {1: 2, 2: 3})) == {3}


def test_json(chunk_model):
    assert model_from_json(model_to_json(chunk_model)) == chunk_model
    assert model_from_json({"stack": {"x": 1}, "heap": {"1": 0}}).nil_loc == 0
    with pytest.raises(ModelError):
        model_from_json("{not json")


def test_union_find():
    forest = UnionFind("abcd")
    forest.union("a", "b")
    forest.union("c", "d")
    assert forest.same("a", "b")
    assert not forest.same("b", "c")
    groups = sorted(sorted(group) for group in forest.groups())
    assert groups == [["a", "b"], ["c", "d"]]
