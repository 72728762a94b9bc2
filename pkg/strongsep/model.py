"""Explicit stack-heap models, heap unions, isomorphism and chunks.

Copyright (c) 2025 Konrad Rieck. MIT License
"""

import json
import logging
from dataclasses import dataclass
from enum import Enum

from .errors import ModelError
from .formula import NIL, Formula, Ls, PointsTo, var_key

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Model:
    """A stack mapping variables to locations and a heap over locations."""

    stack: dict
    heap: dict

    def __post_init__(self):
        if NIL not in self.stack:
            raise ModelError("Stack must map nil")
        for name, loc in self.stack.items():
            if not isinstance(loc, int) or loc < 0:
                raise ModelError(f"Invalid location {loc!r} for variable {name}")
        for src, dst in self.heap.items():
            if not isinstance(src, int) or not isinstance(dst, int):
                raise ModelError(f"Invalid pointer {src!r} -> {dst!r}")
            if src < 0 or dst < 0:
                raise ModelError(f"Invalid pointer {src} -> {dst}")
        if self.stack[NIL] in self.heap:
            raise ModelError("The location of nil must not be allocated")

    @property
    def nil_loc(self):
        return self.stack[NIL]

    def with_heap(self, heap):
        return Model(self.stack, heap)

    def with_stack(self, stack):
        return Model(stack, self.heap)

    def heap_key(self):
        return frozenset(self.heap.items())

    def __str__(self):
        return model_to_json(self)


def locs(heap):
    """Locations occurring in a heap."""
    return set(heap) | set(heap.values())


def img(stack):
    return set(stack.values())


def dangling(model):
    """Locations pointed to but not allocated."""
    return set(model.heap.values()) - set(model.heap)


def std_union(h1, h2):
    """Disjoint union of two heaps, or None if their domains overlap."""
    if h1.keys() & h2.keys():
        return None
    return {**h1, **h2}


def strong_union(stack, h1, h2):
    """Union of two heaps sharing only stack locations, or None."""
    union = std_union(h1, h2)
    if union is None:
        return None
    if not (locs(h1) & locs(h2)) <= img(stack):
        return None
    return union


# Concrete atom checks used by chunks and the oracle


def is_points_to(heap, src, dst):
    return len(heap) == 1 and heap.get(src, None) == dst


def is_list_segment(heap, start, end):
    """Check whether the heap is exactly a list segment from start to end.

    A non-empty segment is a path visiting every allocated location once.
    Its final location may be the start again but no other visited location.
    """
    if not heap:
        return start == end
    seen = set()
    cur = start
    for _ in range(len(heap)):
        if cur not in heap or cur in seen:
            return False
        seen.add(cur)
        cur = heap[cur]
    return cur == end and (cur == start or cur not in seen)


def stack_classes(stack):
    """Variables grouped by location, ordered by their least member."""
    groups = {}
    for name, loc in stack.items():
        groups.setdefault(loc, set()).add(name)
    classes = [frozenset(group) for group in groups.values()]
    return sorted(classes, key=lambda c: var_key(min(c, key=var_key)))


def representatives(stack):
    """Map every stack location to its least variable."""
    reps = {}
    for name in sorted(stack, key=var_key):
        reps.setdefault(stack[name], name)
    return reps


class UnionFind:
    """Disjoint-set forest with path compression."""

    def __init__(self, items=()):
        self.forest = {}
        for item in items:
            self.add(item)

    def add(self, item):
        if item not in self.forest:
            self.forest[item] = item
        return item

    def find(self, item):
        self.add(item)
        root = item
        while root != self.forest[root]:
            root = self.forest[root]

        # Path compression
        node = item
        while node != self.forest[node]:
            self.forest[node], node = root, self.forest[node]
        return root

    def union(self, a, b):
        root_a, root_b = self.find(a), self.find(b)
        if root_a != root_b:
            self.forest[root_b] = root_a
        return root_a

    def same(self, a, b):
        return self.find(a) == self.find(b)

    def groups(self):
        """Connected components as a list of sets."""
        components = {}
        for item in self.forest:
            components.setdefault(self.find(item), set()).add(item)
        return list(components.values())


class Polarity(Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


@dataclass(frozen=True)
class Chunk:
    heap: dict
    polarity: Polarity
    witness: Formula = None

    @property
    def positive(self):
        return self.polarity is Polarity.POSITIVE


def classify(stack, heap):
    """Find an atom over the stack that holds in the heap, if any."""
    reps = representatives(stack)
    if len(heap) == 1:
        ((src, dst),) = heap.items()
        if src in reps and dst in reps:
            return PointsTo(reps[src], reps[dst])
    for src in sorted(reps):
        if src not in heap:
            continue
        for dst in sorted(reps):
            if is_list_segment(heap, src, dst):
                return Ls(reps[src], reps[dst])
    return None


def chunk_heaps(stack_locs, heap):
    """Split a heap into its minimal parts joined at stack locations."""
    forest = UnionFind(heap)

    # Pointers touching the same non-stack location cannot be separated
    touching = {}
    for src, dst in heap.items():
        for loc in (src, dst):
            if loc not in stack_locs:
                touching.setdefault(loc, []).append(src)
    for sources in touching.values():
        for src in sources[1:]:
            forest.union(sources[0], src)

    return [
        {src: heap[src] for src in sorted(group)}
        for group in sorted(forest.groups(), key=min)
    ]


def chunks(model):
    """Decompose the heap into chunks and classify their polarity."""
    result = []
    for heap in chunk_heaps(img(model.stack), model.heap):
        witness = classify(model.stack, heap)
        polarity = Polarity.POSITIVE if witness else Polarity.NEGATIVE
        result.append(Chunk(heap, polarity, witness))
    return result


# Canonical forms of models up to renaming of locations


def _labels(stack):
    labels = {}
    for name, loc in stack.items():
        labels.setdefault(loc, []).append(name)
    return {loc: tuple(sorted(names)) for loc, names in labels.items()}


def canonical_key(model):
    """Hashable form shared exactly by isomorphic models."""
    heap = model.heap
    labels = _labels(model.stack)
    nodes = locs(heap) | set(labels)

    preds = {}
    for src, dst in heap.items():
        preds.setdefault(dst, []).append(src)

    # Nodes on a cycle of the functional graph
    on_cycle = set()
    state = {}
    for start in nodes:
        path = []
        cur = start
        while cur is not None and cur not in state:
            state[cur] = start
            path.append(cur)
            cur = heap.get(cur)
        if cur is not None and state[cur] == start:
            on_cycle.update(path[path.index(cur) :])

    def tree_code(node):
        children = sorted(
            tree_code(pred) for pred in preds.get(node, ()) if pred not in on_cycle
        )
        return (labels.get(node, ()), tuple(children))

    components = []
    for node in nodes:
        if node not in heap:
            components.append(("tree", tree_code(node)))

    done = set()
    for node in sorted(on_cycle):
        if node in done:
            continue
        cycle = [node]
        cur = heap[node]
        while cur != node:
            cycle.append(cur)
            cur = heap[cur]
        done.update(cycle)
        codes = [tree_code(member) for member in cycle]
        rotation = min(tuple(codes[i:] + codes[:i]) for i in range(len(codes)))
        components.append(("cycle", rotation))

    return tuple(sorted(components))


def isomorphic(m1, m2):
    if m1.stack.keys() != m2.stack.keys() or len(m1.heap) != len(m2.heap):
        return False
    return canonical_key(m1) == canonical_key(m2)


# JSON format


def model_to_dict(model):
    names = sorted(model.stack, key=var_key)
    return {
        "stack": {name: model.stack[name] for name in names},
        "heap": {str(src): model.heap[src] for src in sorted(model.heap)},
    }


def model_to_json(model):
    return json.dumps(model_to_dict(model))


def model_from_json(text):
    """Read a model from JSON text or an already decoded dict."""
    try:
        data = json.loads(text) if isinstance(text, str) else text
        stack = {str(name): int(loc) for name, loc in data["stack"].items()}
        heap = {int(src): int(dst) for src, dst in data.get("heap", {}).items()}
    except (ValueError, KeyError, TypeError, AttributeError) as e:
        raise ModelError(f"Invalid model: {e}") from e
    stack.setdefault(NIL, 0)
    return Model(stack, heap)
