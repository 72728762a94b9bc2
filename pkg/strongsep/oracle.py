"""Brute-force model checker for the weak and the strong semantics.

The checker evaluates every clause literally: separating conjunctions try
all splits of the heap and septractions try all extension heaps within a
budget of fresh locations and pointers.

Copyright (c) 2025 Konrad Rieck. MIT License
"""

import logging
from dataclasses import dataclass
from enum import Enum
from math import comb

from .errors import LimitError, ModelError
from .formula import (
    NIL,
    And,
    Emp,
    Eq,
    Ls,
    Neq,
    Not,
    Or,
    PointsTo,
    SepConj,
    Septraction,
    csize,
    free_vars,
    var_key,
)
from .limits import DEFAULT_LIMITS
from .model import (
    Model,
    canonical_key,
    chunk_heaps,
    img,
    is_list_segment,
    is_points_to,
    locs,
    std_union,
    strong_union,
)

logger = logging.getLogger(__name__)

# Fresh locations of extensions start at a multiple of this base
FRESH_BASE = 1_000_000


class Mode(Enum):
    WEAK = "weak"
    STRONG = "strong"


@dataclass(frozen=True)
class ExtensionBudget:
    fresh_locations: int
    max_pointers: int

    def __post_init__(self):
        if self.fresh_locations < 0 or self.max_pointers < 0:
            raise ValueError("Extension budget must be non-negative")

    def covers(self, other):
        return (
            self.fresh_locations >= other.fresh_locations
            and self.max_pointers >= other.max_pointers
        )


def default_budget(stack, phi):
    """Budget that suffices for a septraction under the given stack.

    Only the abstraction of an extension matters, and ams.realize builds a
    heap for every abstract state from its non-nil classes: a long edge adds
    one fresh middle cell and two pointers, an allocation group one fresh
    sink and one pointer per member, and each garbage chunk a self-loop on a
    fresh cell. Every class is the source of at most one edge or group, so
    k classes need k fresh locations and 2k pointers, plus one of each per
    garbage chunk either operand can count.
    """
    classes = len(img(stack)) - 1
    garbage = max(csize(phi.left), csize(phi.right))
    return ExtensionBudget(classes + garbage, 2 * classes + garbage)


def estimate_extensions(sources, targets, budget):
    """Upper bound on the number of extension heaps."""
    slots = sources + budget.fresh_locations
    pool = targets + budget.fresh_locations
    return sum(comb(slots, i) * pool**i for i in range(budget.max_pointers + 1))


def extension_heaps(anchors, forbidden, fresh_base, budget):
    """Enumerate heaps over anchors and fresh locations.

    Fresh locations are introduced in order of first use, so every heap is
    produced at least once up to renaming of fresh locations. Locations in
    forbidden are never allocated.
    """
    anchors = sorted(anchors)
    sources = [loc for loc in anchors if loc not in forbidden]
    fresh = [fresh_base + i for i in range(budget.fresh_locations)]

    def extend(heap, start, used):
        yield heap
        if len(heap) >= budget.max_pointers:
            return
        stop = len(sources) + min(used + 1, len(fresh))
        for i in range(start, stop):
            if i < len(sources):
                src, now = sources[i], used
            else:
                # A fresh source is either in use or the next one
                src = fresh[i - len(sources)]
                now = max(used, i - len(sources) + 1)
            for dst in anchors + fresh[:now]:
                yield from extend({**heap, src: dst}, i + 1, now)
            if now < len(fresh):
                yield from extend({**heap, src: fresh[now]}, i + 1, now + 1)

    yield from extend({}, 0, 0)


class Evaluator:
    """Memoized clause evaluation for a fixed stack."""

    def __init__(self, stack, mode=Mode.STRONG, budget=None, limits=DEFAULT_LIMITS):
        if NIL not in stack:
            raise ModelError("Stack must map nil")
        self.stack = dict(stack)
        self.mode = mode
        self.budget = budget
        self.limits = limits
        self.stack_locs = frozenset(self.stack.values())
        self.nil_loc = self.stack[NIL]
        self.memo = {}
        self.extensions = {}
        self.left_models = {}
        self.warned = False

    def check(self, model, phi):
        """Evaluate a formula on a model whose stack is this evaluator's."""
        if model.stack != self.stack:
            raise ModelError("Model stack differs from evaluator stack")
        missing = free_vars(phi) - self.stack.keys()
        if missing:
            names = ", ".join(sorted(missing, key=var_key))
            raise ModelError(f"Variables not on the stack: {names}")
        if len(model.heap) > self.limits.max_heap and not self.limits.force:
            raise LimitError(
                f"Heap has {len(model.heap)} pointers, limit is "
                f"{self.limits.max_heap} (use force to override)"
            )
        return self.holds(model.heap, phi)

    def holds(self, heap, phi):
        key = (frozenset(heap.items()), phi)
        if key not in self.memo:
            self.memo[key] = self._eval(heap, phi)
        return self.memo[key]

    def _eval(self, heap, phi):
        s = self.stack
        if isinstance(phi, Emp):
            return not heap
        if isinstance(phi, Eq):
            return not heap and s[phi.x] == s[phi.y]
        if isinstance(phi, Neq):
            return not heap and s[phi.x] != s[phi.y]
        if isinstance(phi, PointsTo):
            return s[phi.x] != self.nil_loc and is_points_to(heap, s[phi.x], s[phi.y])
        if isinstance(phi, Ls):
            return is_list_segment(heap, s[phi.x], s[phi.y])
        if isinstance(phi, Not):
            return not self.holds(heap, phi.arg)
        if isinstance(phi, And):
            return self.holds(heap, phi.left) and self.holds(heap, phi.right)
        if isinstance(phi, Or):
            return self.holds(heap, phi.left) or self.holds(heap, phi.right)
        if isinstance(phi, SepConj):
            return self._sepconj(heap, phi)
        if isinstance(phi, Septraction):
            return self._septraction(heap, phi)
        raise TypeError(f"Unknown formula node {phi!r}")

    def _union(self, h1, h2):
        if self.mode is Mode.STRONG:
            return strong_union(self.stack, h1, h2)
        return std_union(h1, h2)

    def _sepconj(self, heap, phi):
        # Strong splits never cut through a chunk
        if self.mode is Mode.STRONG:
            parts = chunk_heaps(self.stack_locs, heap)
        else:
            parts = [{src: dst} for src, dst in heap.items()]

        for mask in range(1 << len(parts)):
            left, right = {}, {}
            for i, part in enumerate(parts):
                (left if mask >> i & 1 else right).update(part)
            if self.holds(left, phi.left) and self.holds(right, phi.right):
                return True
        return False

    def _septraction(self, heap, phi):
        for ext in self._left_models(heap, phi):
            union = self._union(heap, ext)
            if union is not None and self.holds(union, phi.right):
                return True
        return False

    def _direct(self, phi):
        """All models of a formula over emp, pure and points-to atoms."""
        s = self.stack
        if isinstance(phi, Emp):
            return [{}]
        if isinstance(phi, Eq):
            return [{}] if s[phi.x] == s[phi.y] else []
        if isinstance(phi, Neq):
            return [{}] if s[phi.x] != s[phi.y] else []
        if isinstance(phi, PointsTo):
            return [{s[phi.x]: s[phi.y]}] if s[phi.x] != self.nil_loc else []
        if isinstance(phi, (Or, SepConj)):
            left, right = self._direct(phi.left), self._direct(phi.right)
            if left is None or right is None:
                return None
            if isinstance(phi, Or):
                return left + [h for h in right if h not in left]
            result = []
            for h1 in left:
                for h2 in right:
                    union = self._union(h1, h2)
                    if union is not None and union not in result:
                        result.append(union)
            return result
        return None

    def _budget(self, phi):
        default = default_budget(self.stack, phi)
        if self.budget is None:
            return default
        if not self.budget.covers(default) and not self.warned:
            logger.warning(
                "Extension budget %s is below the default %s; "
                "septraction results may be incomplete",
                self.budget,
                default,
            )
            self.warned = True
        return self.budget

    def _fresh_base(self, heap):
        top = max(self.stack_locs | locs(heap))
        return (top // FRESH_BASE + 1) * FRESH_BASE

    def _left_models(self, heap, phi):
        direct = self._direct(phi.left)
        if direct is not None:
            return direct

        if self.mode is Mode.STRONG:
            anchors = self.stack_locs
            forbidden = frozenset({self.nil_loc})
        else:
            anchors = self.stack_locs | locs(heap)
            forbidden = frozenset(heap) | {self.nil_loc}

        key = (anchors, forbidden, self._fresh_base(heap), self._budget(phi))
        if (key, phi.left) not in self.left_models:
            self.left_models[key, phi.left] = [
                ext for ext in self._extensions(key) if self.holds(ext, phi.left)
            ]
        return self.left_models[key, phi.left]

    def _extensions(self, key):
        if key in self.extensions:
            return self.extensions[key]
        anchors, forbidden, base, budget = key
        sources = len(anchors - forbidden)
        estimate = estimate_extensions(sources, len(anchors), budget)
        if estimate > self.limits.max_extensions and not self.limits.force:
            raise LimitError(
                f"Septraction needs up to {estimate} extension heaps, limit is "
                f"{self.limits.max_extensions} (use force to override)"
            )
        logger.debug("Enumerating extensions for budget %s", budget)
        self.extensions[key] = list(extension_heaps(anchors, forbidden, base, budget))
        return self.extensions[key]


def holds(model, phi, mode=Mode.STRONG, budget=None, limits=DEFAULT_LIMITS):
    """Decide whether a model satisfies a formula by brute force."""
    return Evaluator(model.stack, mode, budget, limits).check(model, phi)


def enumerate_models(partition, max_heap):
    """Models over a stack partition with up to max_heap pointers.

    One model is produced per isomorphism class. The class of nil sits at
    location 0 and the other classes at 1, 2, ... in order of their least
    member.
    """
    classes = [frozenset(group) for group in partition]
    if not any(NIL in group for group in classes):
        classes.append(frozenset({NIL}))
    if sum(len(group) for group in classes) != len(frozenset().union(*classes)):
        raise ModelError("Partition classes must be disjoint")
    classes.sort(key=lambda c: (NIL not in c, var_key(min(c, key=var_key))))

    stack = {name: loc for loc, group in enumerate(classes) for name in group}
    n = len(classes)
    budget = ExtensionBudget(2 * max_heap, max_heap)

    seen = set()
    for heap in extension_heaps(range(n), {0}, n, budget):
        model = Model(stack, heap)
        key = canonical_key(model)
        if key not in seen:
            seen.add(key)
            yield model
