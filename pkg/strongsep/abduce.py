"""Normal forms and optimal solutions of abduction problems.

Every abstract memory state has an induced formula whose models are exactly
the models abstracted to that state. The normal form of a formula is the
disjunction of the induced formulas over its abstraction. The weakest
solution of phi * [?] |= psi is the wand phi -* psi; its normal form gives
an explicit representation.

Copyright (c) 2025 Konrad Rieck. MIT License
"""

import logging
from dataclasses import dataclass

from .ams import EdgeLabel, ams_sort_key, enumerate_free, node_key
from .decide import Abstractor, shapes
from .errors import AmsError
from .formula import (
    NIL,
    And,
    Emp,
    Eq,
    Ls,
    Neq,
    Not,
    PointsTo,
    SepConj,
    Septraction,
    alloc,
    and_join,
    csize,
    free_vars,
    is_positive,
    ls2,
    max_var,
    or_join,
    render,
    sep_join,
    var_key,
    wand,
)
from .limits import DEFAULT_LIMITS

logger = logging.getLogger(__name__)


def _rep(node):
    return max_var(node)


def _non_emp():
    return Not(Emp())


def aliasing(a):
    """Equalities inside and disequalities between the stack classes."""
    parts = []
    for node in a.nodes:
        names = sorted(node, key=var_key)
        parts += [Eq(x, y) for i, x in enumerate(names) for y in names[i + 1 :]]
    reps = [_rep(node) for node in a.nodes]
    parts += [Neq(x, y) for i, x in enumerate(reps) for y in reps[i + 1 :]]
    return parts


def graph(a, positive=False):
    """Atoms of the positive chunks.

    Long edges are ls2 restricted to a single chunk, or the plain ls2 form
    in the positive rendering.
    """
    parts = []
    for edge in sorted(a.edges, key=lambda e: var_key(_rep(e.src))):
        x, y = _rep(edge.src), _rep(edge.dst)
        if edge.label is EdgeLabel.EXACTLY1:
            parts.append(PointsTo(x, y))
        elif positive:
            parts.append(ls2(x, y))
        else:
            single = Not(SepConj(_non_emp(), _non_emp()))
            parts.append(And(ls2(x, y), single))
    return parts


def negchunk(a):
    """A single chunk that is neither a pointer nor a list between classes."""
    reps = [_rep(node) for node in a.nodes]
    atoms = [atom(x, y) for x in reps for y in reps for atom in (PointsTo, Ls)]
    return and_join(
        [_non_emp(), Not(SepConj(_non_emp(), _non_emp()))]
        + [Not(atom) for atom in atoms]
    )


def _unallocated(a, nodes):
    return [Not(alloc(_rep(node))) for node in nodes if node != a.nil_node]


def negalloc(a):
    parts = []
    groups = sorted(a.negalloc, key=lambda g: sorted(var_key(_rep(n)) for n in g))
    for group in groups:
        allocated = [alloc(_rep(node)) for node in sorted(group, key=node_key)]
        others = [node for node in a.nodes if node not in group]
        parts.append(and_join([negchunk(a)] + allocated + _unallocated(a, others)))
    return parts


def garbage(a, m):
    """Exactly the garbage count, or at least it once the bound is reached."""
    chunk = and_join([negchunk(a)] + _unallocated(a, a.nodes))
    if a.garbage < m:
        return [chunk] * a.garbage
    rest = and_join([_non_emp()] + _unallocated(a, a.nodes))
    return [chunk] * (m - 1) + [rest]


def formof(a, m):
    """The formula induced by a state, with garbage bound m."""
    if m < 1 or a.garbage > m:
        raise AmsError(f"Garbage {a.garbage} does not fit the bound {m}")
    return sep_join(aliasing(a) + graph(a) + negalloc(a) + garbage(a, m))


def formof_positive(a):
    """Positive formula (modulo ls2) induced by a garbage-free state.

    Unallocated classes are kept unallocated by requiring that a pointer
    from each of them can be added.
    """
    if not a.is_garbage_free():
        raise AmsError("Only garbage-free states have a positive formula")
    body = aliasing(a) + graph(a, positive=True)
    unallocated = [
        PointsTo(_rep(node), NIL)
        for node in a.nodes
        if node != a.nil_node and node not in a.alloc
    ]
    if not unallocated:
        return sep_join(body)
    return Septraction(sep_join(unallocated), sep_join(body + unallocated))


@dataclass(frozen=True)
class NormalForm:
    disjuncts: tuple
    source: object
    variables: frozenset

    @property
    def formula(self):
        """Disjunction of the induced formulas, emp && !emp when empty."""
        return or_join(self.disjuncts)

    def __len__(self):
        return len(self.disjuncts)

    def __str__(self):
        return render(self.formula)


def _variables(variables, *formulas):
    names = set(variables) | {NIL}
    for phi in formulas:
        names |= free_vars(phi)
    return names


def normal_form(phi, variables=(), limits=DEFAULT_LIMITS):
    """Disjunction of induced formulas over all stack shapes."""
    names = _variables(variables, phi)
    m = csize(phi)
    disjuncts = []
    for shape in shapes(names, phi, limits):
        for a in Abstractor(shape, limits).abst(phi):
            disjuncts.append(formof(a, m))
    logger.debug("Normal form of %s has %d disjuncts", render(phi), len(disjuncts))
    return NormalForm(tuple(disjuncts), phi, frozenset(names))


@dataclass(frozen=True)
class AbductionResult:
    formula: object
    positive: bool

    def __str__(self):
        return render(self.formula)


def _solution(phi, psi, minimal):
    zeta = wand(phi, psi)
    if minimal:
        zeta = And(zeta, Not(SepConj(zeta, _non_emp())))
    return zeta


def abduce_weakest(
    phi, psi, variables=(), minimal=False, explicit=False, limits=DEFAULT_LIMITS
):
    """Weakest (minimal) solution of phi * [?] |= psi."""
    zeta = _solution(phi, psi, minimal)
    if explicit:
        zeta = normal_form(zeta, _variables(variables, phi, psi), limits).formula
    return AbductionResult(zeta, is_positive(zeta, modulo_ls2=True))


def abduce_positive(phi, psi, variables=(), minimal=False, limits=DEFAULT_LIMITS):
    """Weakest (minimal) solution within the positive fragment."""
    zeta = _solution(phi, psi, minimal)
    names = _variables(variables, phi, psi)
    disjuncts = []
    for shape in shapes(names, zeta, limits):
        abstractor = Abstractor(shape, limits)
        candidates = enumerate_free(shape.nodes, frozenset(), 0, limits)
        for a in sorted(candidates, key=ams_sort_key):
            if a.is_garbage_free() and abstractor.member(zeta, a):
                disjuncts.append(formof_positive(a))
    logger.debug("Positive solution has %d disjuncts", len(disjuncts))
    return AbductionResult(or_join(disjuncts), bool(disjuncts))
