"""Abstract memory states and sets of them.

An abstract memory state records the aliasing of stack variables, the
positive chunks as labelled edges between variable classes, the stack
classes allocated in each negative chunk and the number of negative chunks
without any stack class.

Copyright (c) 2025 Konrad Rieck. MIT License
"""

import json
import logging
from collections import namedtuple
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from itertools import combinations, product
from math import comb

from .errors import AmsError, LimitError
from .formula import NIL, PointsTo, var_key
from .limits import DEFAULT_LIMITS
from .model import Model, chunks, stack_classes

logger = logging.getLogger(__name__)


class EdgeLabel(Enum):
    EXACTLY1 = "=1"
    AT_LEAST2 = ">=2"


Edge = namedtuple("Edge", ["src", "dst", "label"])


def node_key(node):
    return var_key(min(node, key=var_key))


def sort_nodes(nodes):
    return tuple(sorted(nodes, key=node_key))


@dataclass(frozen=True)
class Ams:
    """Abstract memory state over a fixed partition of the stack."""

    nodes: tuple
    edges: frozenset = frozenset()
    negalloc: frozenset = frozenset()
    garbage: int = 0

    @classmethod
    def build(cls, nodes, edges=(), negalloc=(), garbage=0):
        """Construct with canonical node order."""
        return cls(
            sort_nodes(frozenset(n) for n in nodes),
            frozenset(Edge(*e) for e in edges),
            frozenset(frozenset(group) for group in negalloc),
            garbage,
        )

    @property
    def nil_node(self):
        return next(node for node in self.nodes if NIL in node)

    @property
    def edge_map(self):
        return {edge.src: edge for edge in self.edges}

    @property
    def alloc(self):
        """Classes allocated in positive or negative chunks."""
        allocated = {edge.src for edge in self.edges}
        for group in self.negalloc:
            allocated |= group
        return frozenset(allocated)

    @property
    def size(self):
        return len(self.nodes) + self.garbage

    def node_of(self, name):
        for node in self.nodes:
            if name in node:
                return node
        raise AmsError(f"Variable {name} is not in any class")

    def with_garbage(self, garbage):
        return replace(self, garbage=garbage)

    def is_garbage_free(self):
        return not self.negalloc and self.garbage == 0

    def validate(self):
        """Raise AmsError unless all structural invariants hold."""
        names = [name for node in self.nodes for name in node]
        if len(names) != len(set(names)) or any(not node for node in self.nodes):
            raise AmsError("Nodes must be disjoint non-empty classes")
        if sum(NIL in node for node in self.nodes) != 1:
            raise AmsError("Exactly one node must contain nil")
        if self.nodes != sort_nodes(self.nodes):
            raise AmsError("Nodes are not in canonical order")
        nodes = set(self.nodes)
        sources = [edge.src for edge in self.edges]
        if len(sources) != len(set(sources)):
            raise AmsError("Edges must form a partial function")
        for edge in self.edges:
            if edge.src not in nodes or edge.dst not in nodes:
                raise AmsError("Edge between unknown nodes")
            if not isinstance(edge.label, EdgeLabel):
                raise AmsError(f"Invalid edge label {edge.label!r}")
        if self.nil_node in sources:
            raise AmsError("The nil node cannot be allocated")
        seen = set(sources)
        for group in self.negalloc:
            if not group or not group <= nodes:
                raise AmsError("Allocation groups must be non-empty sets of nodes")
            if group & seen or self.nil_node in group:
                raise AmsError("Allocation groups overlap")
            seen |= group
        if self.garbage < 0:
            raise AmsError("Garbage count must be non-negative")
        return self

    def __str__(self):
        return ams_to_json(self)


def empty_ams(nodes):
    return Ams(sort_nodes(nodes))


def induced_ams(model):
    """Abstraction of a concrete model."""
    classes = stack_classes(model.stack)
    node_of_loc = {model.stack[min(c)]: c for c in classes}

    edges, negalloc, negative = set(), set(), 0
    for chunk in chunks(model):
        if chunk.positive:
            src = node_of_loc[model.stack[chunk.witness.x]]
            dst = node_of_loc[model.stack[chunk.witness.y]]
            if isinstance(chunk.witness, PointsTo):
                edges.add(Edge(src, dst, EdgeLabel.EXACTLY1))
            else:
                edges.add(Edge(src, dst, EdgeLabel.AT_LEAST2))
        else:
            negative += 1
            group = frozenset(
                node_of_loc[loc] for loc in chunk.heap if loc in node_of_loc
            )
            if group:
                negalloc.add(group)

    return Ams(
        sort_nodes(classes),
        frozenset(edges),
        frozenset(negalloc),
        negative - len(negalloc),
    )


def compatible(a1, a2):
    return a1.nodes == a2.nodes and not (a1.alloc & a2.alloc)


def compose(a1, a2):
    """Composition of two states, or None if they are incompatible."""
    if not compatible(a1, a2):
        return None
    return Ams(
        a1.nodes,
        a1.edges | a2.edges,
        a1.negalloc | a2.negalloc,
        a1.garbage + a2.garbage,
    )


def divide(a2, a1):
    """The state a with compose(a, a1) == a2, or None."""
    if (
        a1.nodes != a2.nodes
        or not a1.edges <= a2.edges
        or not a1.negalloc <= a2.negalloc
        or a1.garbage > a2.garbage
    ):
        return None
    return Ams(
        a2.nodes,
        a2.edges - a1.edges,
        a2.negalloc - a1.negalloc,
        a2.garbage - a1.garbage,
    )


def clamp(a, k):
    return a if a.garbage <= k else a.with_garbage(k)


def lift(a, m, n):
    """Bound-lifting of a state or a set from bound m to bound n."""
    if isinstance(a, AbstractionSet):
        if a.bound != m:
            raise AmsError(f"Set has bound {a.bound}, not {m}")
        return a.lifted(n)
    if m > n or a.garbage > m:
        raise AmsError(f"Cannot lift garbage {a.garbage} from {m} to {n}")
    if a.garbage < m:
        return AbstractionSet(a.nodes, n, [a])
    return AbstractionSet(a.nodes, n, [a.with_garbage(g) for g in range(m, n + 1)])


def _lift_elems(elems, m, n):
    result = set()
    for a in elems:
        if a.garbage < m:
            result.add(a)
        else:
            result.update(a.with_garbage(g) for g in range(m, n + 1))
    return result


def compose_sets(s1, s2):
    """Pointwise composition of two explicit sets."""
    result = set()
    for a1 in s1:
        for a2 in s2:
            a = compose(a1, a2)
            if a is not None:
                result.add(a)
    return result


# Universes of states over a partition


def set_partitions(items):
    """All partitions of a sequence into blocks, as lists of lists."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for partition in set_partitions(rest):
        yield [[first]] + partition
        for i in range(len(partition)):
            yield partition[:i] + [[first] + partition[i]] + partition[i + 1 :]


@lru_cache(maxsize=None)
def bell(n):
    """Number of partitions of an n-element set."""
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for value in row:
            nxt.append(nxt[-1] + value)
        row = nxt
    return row[0]


def universe_count(nodes, k, used=frozenset()):
    """Number of states over the nodes with garbage at most k.

    Classes in used are never allocated.
    """
    free = sum(1 for node in nodes if NIL not in node and node not in used)
    edge_options = 2 * len(nodes)
    total = sum(
        comb(free, d) * edge_options**d * bell(free - d + 1) for d in range(free + 1)
    )
    return total * (k + 1)


def check_universe(nodes, k, limits=DEFAULT_LIMITS, used=frozenset()):
    if limits.force:
        return
    if len(nodes) > limits.max_classes:
        raise LimitError(
            f"{len(nodes)} variable classes exceed the limit of {limits.max_classes}"
        )
    count = universe_count(nodes, k, used)
    if count > limits.max_universe:
        raise LimitError(
            f"Universe of {count} states exceeds the limit of {limits.max_universe}"
        )


@lru_cache(maxsize=256)
def _states(nodes, used, k):
    logger.debug("Materializing %d-node universe, bound %d", len(nodes), k)
    free = [node for node in nodes if NIL not in node and node not in used]
    targets = [(dst, label) for dst in nodes for label in EdgeLabel]
    unallocated = object()

    result = []
    for d in range(len(free) + 1):
        for sources in combinations(free, d):
            rest = [node for node in free if node not in sources]
            for choice in product(targets, repeat=d):
                edges = frozenset(
                    Edge(src, dst, label) for src, (dst, label) in zip(sources, choice)
                )
                # The block holding the marker collects unallocated nodes
                for partition in set_partitions([unallocated] + rest):
                    negalloc = frozenset(
                        frozenset(block)
                        for block in partition
                        if unallocated not in block
                    )
                    for garbage in range(k + 1):
                        result.append(Ams(nodes, edges, negalloc, garbage))
    return frozenset(result)


def enumerate_universe(nodes, k, limits=DEFAULT_LIMITS):
    """All valid states over the nodes with garbage at most k."""
    nodes = sort_nodes(nodes)
    check_universe(nodes, k, limits)
    return AbstractionSet(nodes, k, _states(nodes, frozenset(), k))


def enumerate_free(nodes, used, k, limits=DEFAULT_LIMITS):
    """States with garbage at most k that allocate no class in used."""
    nodes = sort_nodes(nodes)
    used = frozenset(used)
    check_universe(nodes, k, limits, used)
    return _states(nodes, used, k)


def abstract_lists(nodes, x, y, forbidden=frozenset()):
    """States whose edges form an abstract list from x to y.

    Sources of the list are distinct, never the nil node and never in
    forbidden. The last node may be the first one again.
    """
    nodes = sort_nodes(nodes)
    start = next(node for node in nodes if x in node)
    end = next(node for node in nodes if y in node)
    nil_node = next(node for node in nodes if NIL in node)
    result = set()

    if start == end:
        result.add(Ams(nodes))

    def usable(node, used):
        return node != nil_node and node not in forbidden and node not in used

    def walk(cur, used, edges):
        for nxt in nodes:
            for label in EdgeLabel:
                step = edges + [Edge(cur, nxt, label)]
                if nxt == end:
                    result.add(Ams(nodes, frozenset(step)))
                elif usable(nxt, used):
                    walk(nxt, used | {nxt}, step)

    if usable(start, frozenset()):
        walk(start, frozenset({start}), [])
    return result


def realize(a):
    """A model whose induced state is a.

    Classes sit at locations 1..n-1 and nil at 0. Middle cells of long
    edges, sinks of allocation groups and garbage cells follow above.
    """
    n = len(a.nodes)
    loc = {a.nil_node: 0}
    for node in a.nodes:
        if node != a.nil_node:
            loc[node] = len(loc)

    stack = {name: loc[node] for node in a.nodes for name in node}
    heap = {}
    for edge in a.edges:
        src, dst = loc[edge.src], loc[edge.dst]
        if edge.label is EdgeLabel.EXACTLY1:
            heap[src] = dst
        else:
            heap[src] = n + src
            heap[n + src] = dst
    for group in a.negalloc:
        sink = 2 * n + loc[min(group, key=node_key)]
        for node in group:
            heap[loc[node]] = sink
    for i in range(a.garbage):
        heap[3 * n + i] = 3 * n + i
    return Model(stack, heap)


def decompose(model, a1, a2):
    """Split a model into heaps abstracted by a1 and a2, or None."""
    if compose(a1, a2) != induced_ams(model):
        return None
    s = model.stack
    classes = {s[min(node)]: node for node in a1.nodes}
    h1, h2 = {}, {}
    garbage1 = 0
    for chunk in chunks(model):
        if chunk.positive:
            target = h1 if classes[s[chunk.witness.x]] in a1.alloc else h2
        else:
            group = frozenset(classes[loc] for loc in chunk.heap if loc in classes)
            if group:
                target = h1 if group in a1.negalloc else h2
            elif garbage1 < a1.garbage:
                target, garbage1 = h1, garbage1 + 1
            else:
                target = h2
        target.update(chunk.heap)
    return h1, h2


class AbstractionSet:
    """A set of states over shared nodes with garbage at most bound.

    With complement set, the set denotes the universe minus elems.
    """

    def __init__(self, nodes, bound, elems=(), complement=False):
        self.nodes = sort_nodes(nodes)
        self.bound = bound
        self.elems = frozenset(elems)
        self.complement = complement

    @classmethod
    def universe(cls, nodes, bound):
        return cls(nodes, bound, complement=True)

    def __contains__(self, a):
        if a.nodes != self.nodes or a.garbage > self.bound:
            return False
        return (a in self.elems) != self.complement

    def materialize(self, limits=DEFAULT_LIMITS):
        """Equivalent set without the complement flag."""
        if not self.complement:
            return self
        universe = enumerate_universe(self.nodes, self.bound, limits).elems
        return AbstractionSet(self.nodes, self.bound, universe - self.elems)

    def __iter__(self):
        return iter(sorted(self.materialize().elems, key=ams_sort_key))

    def __len__(self):
        if self.complement:
            return universe_count(self.nodes, self.bound) - len(self.elems)
        return len(self.elems)

    def is_empty(self):
        return len(self) == 0

    def __eq__(self, other):
        if not isinstance(other, AbstractionSet):
            return NotImplemented
        if (self.nodes, self.bound) != (other.nodes, other.bound):
            return False
        if self.complement == other.complement:
            return self.elems == other.elems
        return self.materialize().elems == other.materialize().elems

    def __repr__(self):
        kind = "complement of " if self.complement else ""
        return f"AbstractionSet({kind}{len(self.elems)} states, bound {self.bound})"

    def negate(self):
        return AbstractionSet(self.nodes, self.bound, self.elems, not self.complement)

    def lifted(self, n):
        if n < self.bound:
            raise AmsError(f"Cannot lift from {self.bound} down to {n}")
        elems = _lift_elems(self.elems, self.bound, n)
        return AbstractionSet(self.nodes, n, elems, self.complement)

    def _aligned(self, other):
        bound = max(self.bound, other.bound)
        return self.lifted(bound), other.lifted(bound), bound

    def intersect(self, other):
        a, b, bound = self._aligned(other)
        if a.complement and b.complement:
            return AbstractionSet(a.nodes, bound, a.elems | b.elems, True)
        if a.complement:
            a, b = b, a
        if b.complement:
            return AbstractionSet(a.nodes, bound, a.elems - b.elems)
        return AbstractionSet(a.nodes, bound, a.elems & b.elems)

    def union(self, other):
        a, b, bound = self._aligned(other)
        if a.complement and b.complement:
            return AbstractionSet(a.nodes, bound, a.elems & b.elems, True)
        if a.complement:
            a, b = b, a
        if b.complement:
            return AbstractionSet(a.nodes, bound, b.elems - a.elems, True)
        return AbstractionSet(a.nodes, bound, a.elems | b.elems)

    def garbage_free(self, limits=DEFAULT_LIMITS):
        """Members without negative chunks."""
        if self.complement:
            candidates = enumerate_free(self.nodes, frozenset(), 0, limits)
            elems = [a for a in candidates if a.is_garbage_free() and a in self]
        else:
            elems = [a for a in self.elems if a.is_garbage_free()]
        return AbstractionSet(self.nodes, self.bound, elems)


def sept_sets(s1, s2, universe):
    """States of the universe that some member of s1 extends into s2.

    The top garbage value of s2 is read as "at least", so compositions are
    clamped to the bound of s2.
    """
    extensions = list(s1)
    result = [
        a
        for a in universe
        if any(clamp(c, s2.bound) in s2 for c in compose_sets([a], extensions))
    ]
    return AbstractionSet(universe.nodes, universe.bound, result)


# JSON format


def _node_json(node):
    return sorted(node, key=var_key)


def ams_sort_key(a):
    edges = sorted(
        (node_key(e.src), node_key(e.dst), e.label.value) for e in a.edges
    )
    groups = sorted(sorted(node_key(n) for n in group) for group in a.negalloc)
    return (edges, groups, a.garbage)


def ams_to_dict(a):
    edges = sorted(a.edges, key=lambda e: node_key(e.src))
    groups = sorted(
        (sort_nodes(group) for group in a.negalloc),
        key=lambda g: [node_key(n) for n in g],
    )
    return {
        "nodes": [_node_json(node) for node in a.nodes],
        "edges": [
            [_node_json(e.src), _node_json(e.dst), e.label.value] for e in edges
        ],
        "negalloc": [[_node_json(node) for node in group] for group in groups],
        "garbage": a.garbage,
    }


def ams_to_json(a):
    return json.dumps(ams_to_dict(a))


def ams_from_json(text):
    try:
        data = json.loads(text) if isinstance(text, str) else text
        nodes = [frozenset(node) for node in data["nodes"]]
        edges = [
            Edge(frozenset(src), frozenset(dst), EdgeLabel(label))
            for src, dst, label in data.get("edges", [])
        ]
        negalloc = [
            frozenset(frozenset(node) for node in group)
            for group in data.get("negalloc", [])
        ]
        a = Ams.build(nodes, edges, negalloc, int(data.get("garbage", 0)))
    except (ValueError, KeyError, TypeError) as e:
        raise AmsError(f"Invalid AMS: {e}") from e
    return a.validate()


def stack_nodes(stack):
    """Nodes of the stack partition in canonical order."""
    return sort_nodes(stack_classes(stack))


def list_claims(edge_map, start, end):
    """Edge sets forming an abstract list from start to end.

    The walk follows the unique outgoing edges and stops when it first
    reaches end, so there are at most two claims (the empty one when start
    is end).
    """
    if start == end:
        yield frozenset()
    claimed, seen = [], set()
    cur = start
    while cur in edge_map and cur not in seen:
        seen.add(cur)
        edge = edge_map[cur]
        claimed.append(edge)
        cur = edge.dst
        if cur == end:
            yield frozenset(claimed)
            return
