"""Decision procedures based on abstract memory states.

For a fixed stack shape, every formula denotes a finite set of abstract
memory states with garbage bounded by its chunk size. The sets are computed
bottom-up (abst) or tested element-wise top-down (member); satisfiability,
entailment and model checking reduce to them.

Copyright (c) 2025 Konrad Rieck. MIT License
"""

import logging
from dataclasses import dataclass, replace
from enum import Enum
from itertools import combinations

from .ams import (
    Ams,
    AbstractionSet,
    Edge,
    EdgeLabel,
    abstract_lists,
    ams_to_dict,
    clamp,
    compose,
    divide,
    enumerate_free,
    enumerate_universe,
    induced_ams,
    lift,
    list_claims,
    node_key,
    realize,
    sort_nodes,
    stack_nodes,
)
from .errors import InternalError, LimitError, ModelError
from .formula import (
    ATOMS,
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
    sep_conjuncts,
    var_key,
)
from .limits import DEFAULT_LIMITS
from .model import UnionFind, model_to_dict
from .oracle import holds

logger = logging.getLogger(__name__)

# Oracle cross-checks of witnesses are skipped beyond this many extensions
WITNESS_LIMITS = replace(DEFAULT_LIMITS, max_extensions=50_000)


class Status(Enum):
    SAT = "sat"
    UNSAT = "unsat"
    VALID = "valid"
    INVALID = "invalid"


@dataclass(frozen=True)
class Verdict:
    status: Status
    witness: object = None
    ams: Ams = None

    @property
    def success(self):
        return self.status in (Status.SAT, Status.VALID)


def verdict_to_json(verdict):
    data = {"status": verdict.status.value}
    if verdict.witness is not None:
        data["witness"] = model_to_dict(verdict.witness)
    if verdict.ams is not None:
        data["ams"] = ams_to_dict(verdict.ams)
    return data


@dataclass(frozen=True)
class StackShape:
    """Partition of the stack variables into aliasing classes."""

    nodes: tuple

    @classmethod
    def of(cls, classes):
        return cls(sort_nodes(frozenset(c) for c in classes))

    def stack(self):
        """Representative stack: nil at 0, other classes at 1, 2, ..."""
        stack, loc = {}, 1
        for node in self.nodes:
            if NIL in node:
                stack.update(dict.fromkeys(node, 0))
            else:
                stack.update(dict.fromkeys(node, loc))
                loc += 1
        return stack


def _conjunct_rank(phi):
    if isinstance(phi, (Emp, Eq, Neq)):
        return 0
    if isinstance(phi, PointsTo):
        return 1
    if isinstance(phi, Ls):
        return 2
    return 3


def _garbage_choices(garbage, bound):
    """Actual garbage counts an element may stand for, up to bound."""
    return range(garbage, max(garbage, bound) + 1)


class Abstractor:
    """Abstractions and membership tests of formulas over one stack shape."""

    def __init__(self, shape, limits=DEFAULT_LIMITS):
        self.shape = shape
        self.nodes = shape.nodes
        self.limits = limits
        self.node = {name: node for node in self.nodes for name in node}
        self.nil_node = self.node[NIL]
        self.empty = Ams(self.nodes)
        self._abst = {}
        self._member = {}
        self._csize = {}

    def csize(self, phi):
        if phi not in self._csize:
            self._csize[phi] = csize(phi)
        return self._csize[phi]

    def free(self, used, bound):
        return enumerate_free(self.nodes, used, bound, self.limits)

    # Atoms

    def atom_states(self, phi, used=frozenset()):
        """States of an atom whose allocation avoids used."""
        node = self.node
        if isinstance(phi, Emp):
            return [self.empty]
        if isinstance(phi, Eq):
            return [self.empty] if node[phi.x] == node[phi.y] else []
        if isinstance(phi, Neq):
            return [self.empty] if node[phi.x] != node[phi.y] else []
        if isinstance(phi, PointsTo):
            src = node[phi.x]
            if src == self.nil_node or src in used:
                return []
            edge = Edge(src, node[phi.y], EdgeLabel.EXACTLY1)
            return [Ams(self.nodes, frozenset({edge}))]
        return abstract_lists(self.nodes, phi.x, phi.y, used)

    def _atom_member(self, phi, a):
        if isinstance(phi, Ls):
            if a.negalloc or a.garbage:
                return False
            claims = list_claims(a.edge_map, self.node[phi.x], self.node[phi.y])
            return a.edges in set(claims)
        return a in self.atom_states(phi)

    # Bottom-up computation

    def abst(self, phi):
        """The states of all models of phi, garbage bounded by its chunk size."""
        if phi not in self._abst:
            self._abst[phi] = self._compute(phi)
        return self._abst[phi]

    def _compute(self, phi):
        if isinstance(phi, ATOMS):
            return AbstractionSet(self.nodes, 1, self.atom_states(phi))
        if isinstance(phi, Not):
            return self.abst(phi.arg).negate()
        if isinstance(phi, Or):
            return self.abst(phi.left).union(self.abst(phi.right))
        if isinstance(phi, And):
            return self._abst_and(phi)
        if isinstance(phi, SepConj):
            return self._abst_sepconj(phi)
        if isinstance(phi, Septraction):
            return self._abst_septraction(phi)
        raise TypeError(f"Unknown formula node {phi!r}")

    def _abst_and(self, phi):
        bound = self.csize(phi)
        left = self.abst(phi.left)
        if not left.complement:
            elems = [a for a in left.lifted(bound).elems if self.member(phi.right, a)]
            return AbstractionSet(self.nodes, bound, elems)
        return left.intersect(self.abst(phi.right))

    def _options(self, part, used):
        if isinstance(part, ATOMS):
            return self.atom_states(part, used)
        states = self.abst(part)
        if states.complement:
            free = self.free(used, states.bound)
            return [a for a in free if a not in states.elems]
        return [a for a in states.elems if not (a.alloc & used)]

    def _abst_sepconj(self, phi):
        bound = self.csize(phi)
        parts = sorted(sep_conjuncts(phi), key=_conjunct_rank)
        result = set()

        def combine(i, used, edges, negalloc, garbage, saturated):
            if i == len(parts):
                top = bound if saturated else garbage
                for g in range(garbage, top + 1):
                    result.add(Ams(self.nodes, edges, negalloc, g))
                return
            part_bound = self.csize(parts[i])
            for a in self._options(parts[i], used):
                combine(
                    i + 1,
                    used | a.alloc,
                    edges | a.edges,
                    negalloc | a.negalloc,
                    garbage + a.garbage,
                    saturated or a.garbage == part_bound,
                )

        combine(0, frozenset(), frozenset(), frozenset(), 0, False)
        return AbstractionSet(self.nodes, bound, result)

    def _remainders(self, g2, g1, c1, c2):
        """Garbage counts g with some composition clamping to g2."""
        extra = [g1] if g1 < c1 else _garbage_choices(g1, c2)
        return [g for g in range(c2 + 1) if any(min(g + e, c2) == g2 for e in extra)]

    def _abst_septraction(self, phi):
        c1, c2 = self.csize(phi.left), self.csize(phi.right)
        right = self.abst(phi.right)
        if right.complement:
            universe = enumerate_universe(self.nodes, c2, self.limits)
            return AbstractionSet(
                self.nodes, c2, [a for a in universe.elems if self.member(phi, a)]
            )

        left = self.abst(phi.left)
        result = set()
        for a2 in right.elems:
            if left.complement:
                candidates = self._sub_states(a2, c1, left)
            else:
                candidates = left.elems
            for a1 in candidates:
                rest = divide(a2.with_garbage(0), a1.with_garbage(0))
                if rest is None:
                    continue
                for g in self._remainders(a2.garbage, a1.garbage, c1, c2):
                    result.add(rest.with_garbage(g))
        return AbstractionSet(self.nodes, c2, result)

    def _sub_states(self, a, bound, states):
        """Members of states whose edges and groups are taken from a."""
        edges, groups = sorted(a.edges, key=lambda e: node_key(e.src)), list(a.negalloc)
        for i in range(len(edges) + 1):
            for sub_edges in combinations(edges, i):
                for j in range(len(groups) + 1):
                    for sub_groups in combinations(groups, j):
                        for g in range(bound + 1):
                            b = Ams(
                                self.nodes,
                                frozenset(sub_edges),
                                frozenset(sub_groups),
                                g,
                            )
                            if b in states:
                                yield b

    # Top-down membership

    def member(self, phi, a):
        """Check whether a state (clamped to the chunk size) is in abst(phi)."""
        a = clamp(a, self.csize(phi))
        if phi in self._abst:
            return a in self._abst[phi]
        key = (phi, a)
        if key not in self._member:
            self._member[key] = self._member_eval(phi, a)
        return self._member[key]

    def _member_eval(self, phi, a):
        if isinstance(phi, ATOMS):
            return self._atom_member(phi, a)
        if isinstance(phi, Not):
            return not self.member(phi.arg, a)
        if isinstance(phi, And):
            return self.member(phi.left, a) and self.member(phi.right, a)
        if isinstance(phi, Or):
            return self.member(phi.left, a) or self.member(phi.right, a)
        if isinstance(phi, SepConj):
            return self._member_sepconj(phi, a)
        if isinstance(phi, Septraction):
            return self._member_septraction(phi, a)
        raise TypeError(f"Unknown formula node {phi!r}")

    def _member_sepconj(self, phi, a):
        parts = sorted(sep_conjuncts(phi), key=_conjunct_rank)
        node = self.node

        def split(i, edges, groups, garbage):
            if i == len(parts):
                return not edges and not groups and garbage == 0
            part = parts[i]
            if isinstance(part, (Emp, Eq, Neq)):
                return bool(self.atom_states(part)) and split(
                    i + 1, edges, groups, garbage
                )
            if isinstance(part, PointsTo):
                edge = Edge(node[part.x], node[part.y], EdgeLabel.EXACTLY1)
                return edge in edges and split(i + 1, edges - {edge}, groups, garbage)
            if isinstance(part, Ls):
                edge_map = {edge.src: edge for edge in edges}
                for claim in list_claims(edge_map, node[part.x], node[part.y]):
                    if split(i + 1, edges - claim, groups, garbage):
                        return True
                return False

            # The last conjunct takes whatever is left
            if i == len(parts) - 1:
                rest = Ams(self.nodes, edges, groups, garbage)
                return self.member(part, rest)
            for sub_edges in _subsets(edges):
                for sub_groups in _subsets(groups):
                    for g in range(garbage + 1):
                        sub = Ams(self.nodes, sub_edges, sub_groups, g)
                        if self.member(part, sub) and split(
                            i + 1, edges - sub_edges, groups - sub_groups, garbage - g
                        ):
                            return True
            return False

        return split(0, a.edges, a.negalloc, a.garbage)

    def _member_septraction(self, phi, a):
        c1, c2 = self.csize(phi.left), self.csize(phi.right)
        left = self.abst(phi.left)
        if left.complement:
            free = self.free(a.alloc, c1)
            candidates = (b for b in free if b not in left.elems)
        else:
            candidates = (b for b in left.elems if not (b.alloc & a.alloc))

        for a1 in candidates:
            base = compose(a.with_garbage(0), a1.with_garbage(0))
            if a1.garbage < c1:
                extra = [a1.garbage]
            else:
                extra = _garbage_choices(a1.garbage, c2)
            for g in sorted({min(a.garbage + e, c2) for e in extra}):
                if self.member(phi.right, base.with_garbage(g)):
                    return True
        return False


def _subsets(items):
    items = sorted(items, key=repr)
    for i in range(len(items) + 1):
        for chosen in combinations(items, i):
            yield frozenset(chosen)


# Stack shapes


def _forced(phi, forest, distinct):
    """Collect equalities and disequalities every model of phi satisfies."""
    if isinstance(phi, Eq):
        forest.union(phi.x, phi.y)
    elif isinstance(phi, Neq):
        distinct.append((phi.x, phi.y))
    elif isinstance(phi, PointsTo):
        distinct.append((phi.x, NIL))
    elif isinstance(phi, (SepConj, And, Septraction)):
        _forced(phi.left, forest, distinct)
        _forced(phi.right, forest, distinct)


def shapes(variables, phi=None, limits=DEFAULT_LIMITS):
    """Stack shapes over the variables that a model of phi may have."""
    variables = sorted(set(variables) | {NIL}, key=var_key)
    forest = UnionFind(variables)
    distinct = []
    if phi is not None:
        _forced(phi, forest, distinct)

    groups = sort_nodes(frozenset(group) for group in forest.groups())
    if len(groups) - 1 > limits.max_vars and not limits.force:
        raise LimitError(
            f"{len(groups) - 1} variable classes exceed the limit of "
            f"{limits.max_vars} (use force to override)"
        )

    group_of = {name: group for group in groups for name in group}
    apart = {group: set() for group in groups}
    for x, y in distinct:
        gx, gy = group_of[x], group_of[y]
        if gx == gy:
            return
        apart[gx].add(gy)
        apart[gy].add(gx)

    def assign(i, blocks):
        if i == len(groups):
            yield StackShape.of(frozenset().union(*block) for block in blocks)
            return
        group = groups[i]
        for j, block in enumerate(blocks):
            if not apart[group] & set(block):
                grown = blocks[:j] + [block + [group]] + blocks[j + 1 :]
                yield from assign(i + 1, grown)
        yield from assign(i + 1, blocks + [[group]])

    yield from assign(0, [])


# Decision procedures


def _cross_check(model, phi, expected):
    """Confirm a witness with the brute-force oracle where affordable."""
    try:
        verdict = holds(model, phi, limits=WITNESS_LIMITS)
    except LimitError as e:
        logger.debug("Skipping oracle cross-check: %s", e)
        return
    if verdict != expected:
        raise InternalError(f"Oracle disagrees on witness {model} for {phi}")


def abst(shape, phi, limits=DEFAULT_LIMITS):
    return Abstractor(shape, limits).abst(phi)


def sat(phi, variables=(), limits=DEFAULT_LIMITS):
    """Decide satisfiability over stacks whose domain is the variables."""
    variables = set(variables) | free_vars(phi) | {NIL}
    for shape in shapes(variables, phi, limits):
        states = Abstractor(shape, limits).abst(phi)
        if states.is_empty():
            continue
        a = next(iter(states))
        witness = realize(a)
        _cross_check(witness, phi, True)
        return Verdict(Status.SAT, witness, a)
    return Verdict(Status.UNSAT)


def entails(phi, psi, variables=(), robust=False, limits=DEFAULT_LIMITS):
    """Decide whether every model of phi is a model of psi.

    With robust, variables outside the two formulas are ignored.
    """
    names = free_vars(phi) | free_vars(psi) | {NIL}
    if not robust:
        names |= set(variables)
    bound = max(csize(phi), csize(psi))

    for shape in shapes(names, phi, limits):
        abstractor = Abstractor(shape, limits)
        for a0 in abstractor.abst(phi):
            # Saturated garbage stands for every larger count psi can see
            for a in lift(a0, csize(phi), bound):
                if abstractor.member(psi, a):
                    continue
                witness = realize(a)
                _cross_check(witness, phi, True)
                _cross_check(witness, psi, False)
                return Verdict(Status.INVALID, witness, a)
    return Verdict(Status.VALID)


def model_check(model, phi, limits=DEFAULT_LIMITS):
    """Decide satisfaction through the induced abstract memory state."""
    missing = free_vars(phi) - model.stack.keys()
    if missing:
        names = ", ".join(sorted(missing, key=var_key))
        raise ModelError(f"Variables not on the stack: {names}")
    shape = StackShape(stack_nodes(model.stack))
    return Abstractor(shape, limits).member(phi, induced_ams(model))
