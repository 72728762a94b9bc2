"""Heap-manipulating programs: concrete runs and forward symbolic execution.

Symbolic execution keeps the state as a list of separating conjuncts. A
statement that needs a pointer x -> z either finds it among the conjuncts
or materializes it from a state that provably allocates x; the rest of the
state is carried along as frame with modified variables renamed to fresh
copies.

Copyright (c) 2025 Konrad Rieck. MIT License
"""

import logging
import re
from dataclasses import dataclass, field

from .decide import Status, Verdict, entails
from .errors import VerificationError
from .formula import (
    NIL,
    And,
    Emp,
    Eq,
    Neq,
    PointsTo,
    SepConj,
    Septraction,
    alloc,
    free_vars,
    is_positive,
    render,
    sep_conjuncts,
    sep_join,
    substitute,
    true_,
    var_key,
)
from .limits import VERIFY_LIMITS
from .model import Model, UnionFind, locs, strong_union
from .oracle import holds

logger = logging.getLogger(__name__)

# Program variable modelling the contents of newly allocated cells
MALLOC_VAR = "m"


# Statements


@dataclass(frozen=True)
class AssignNext:
    """x.next := y"""

    x: str
    y: str

    def __str__(self):
        return f"{self.x}.next := {self.y}"


@dataclass(frozen=True)
class ReadNext:
    """x := y.next"""

    x: str
    y: str

    def __str__(self):
        return f"{self.x} := {self.y}.next"


@dataclass(frozen=True)
class Free:
    x: str

    def __str__(self):
        return f"free({self.x})"


@dataclass(frozen=True)
class Malloc:
    x: str

    def __str__(self):
        return f"malloc({self.x})"


@dataclass(frozen=True)
class Copy:
    """x := y"""

    x: str
    y: str

    def __str__(self):
        return f"{self.x} := {self.y}"


@dataclass(frozen=True)
class Assume:
    x: str
    y: str
    eq: bool

    def __str__(self):
        op = "=" if self.eq else "!="
        return f"assume({self.x} {op} {self.y})"

    def formula(self):
        return Eq(self.x, self.y) if self.eq else Neq(self.x, self.y)

    def negated(self):
        return Assume(self.x, self.y, not self.eq)


@dataclass(frozen=True)
class While:
    guard: Assume
    invariant: object
    body: tuple

    def __str__(self):
        op = "=" if self.guard.eq else "!="
        return f"while ({self.guard.x} {op} {self.guard.y})"


@dataclass(frozen=True)
class AnnotatedProgram:
    pre: object
    body: tuple
    post: object


@dataclass(frozen=True)
class Triple:
    pre: object
    body: tuple
    post: object
    label: str = ""

    def __str__(self):
        stmts = "; ".join(str(c) for c in self.body) or "skip"
        return f"{{{render(self.pre)}}} {stmts} {{{render(self.post)}}}"


def statement_vars(c):
    """Program variables read or written by a statement."""
    if isinstance(c, (Free, Malloc)):
        names = {c.x}
    else:
        names = {c.x, c.y}
    if isinstance(c, Malloc):
        names.add(MALLOC_VAR)
    return names


def program_vars(body):
    names = set()
    for c in body:
        if isinstance(c, While):
            names |= statement_vars(c.guard) | free_vars(c.invariant)
            names |= program_vars(c.body)
        else:
            names |= statement_vars(c)
    return names


# Concrete semantics


@dataclass(frozen=True)
class Fault:
    """The error transition, e.g. dereferencing an unallocated location."""

    message: str


@dataclass(frozen=True)
class Stuck:
    """No transition, e.g. an assumption that does not hold."""

    message: str


def default_malloc(model):
    """Allocate above every location in use and store nil in the cell."""
    used = locs(model.heap) | set(model.stack.values())
    return max(used) + 1, model.nil_loc


def concrete_step(model, c, fresh_policy=default_malloc):
    """Execute one statement on a model."""
    s, h = model.stack, model.heap
    if isinstance(c, AssignNext):
        if s[c.x] not in h:
            return Fault(f"{c.x} is not allocated")
        return Model(s, {**h, s[c.x]: s[c.y]})
    if isinstance(c, ReadNext):
        if s[c.y] not in h:
            return Fault(f"{c.y} is not allocated")
        return Model({**s, c.x: h[s[c.y]]}, h)
    if isinstance(c, Free):
        if s[c.x] not in h:
            return Fault(f"{c.x} is not allocated")
        return Model(s, {src: dst for src, dst in h.items() if src != s[c.x]})
    if isinstance(c, Malloc):
        loc, content = fresh_policy(model)
        if loc in h or loc == model.nil_loc:
            raise ValueError(f"Malloc policy returned allocated location {loc}")
        return Model({**s, c.x: loc, MALLOC_VAR: content}, {**h, loc: content})
    if isinstance(c, Copy):
        return Model({**s, c.x: s[c.y]}, h)
    if isinstance(c, Assume):
        if (s[c.x] == s[c.y]) != c.eq:
            return Stuck(f"{c} does not hold")
        return model
    raise TypeError(f"Unknown statement {c!r}")


def run_concrete(model, body, fresh_policy=default_malloc, max_steps=10_000):
    """Run a program body; returns the final model, a Fault or a Stuck."""
    steps = 0

    def tick():
        nonlocal steps
        steps += 1
        if steps > max_steps:
            raise VerificationError(f"Program ran for more than {max_steps} steps")

    def guard_holds(state, guard):
        # Guard evaluations count as steps, so empty loop bodies terminate
        tick()
        return (state.stack[guard.x] == state.stack[guard.y]) == guard.eq

    def run(state, stmts):
        for c in stmts:
            if isinstance(c, While):
                while isinstance(state, Model) and guard_holds(state, c.guard):
                    state = run(state, c.body)
            else:
                tick()
                state = concrete_step(state, c, fresh_policy)
            if not isinstance(state, Model):
                return state
        return state

    return run(model, body)


# Local proof rules

LOCAL_TARGET = "z"


def local_rule(c):
    """Local pre, local post and modified variables of a statement."""
    z = LOCAL_TARGET
    if isinstance(c, AssignNext):
        return PointsTo(c.x, z), PointsTo(c.x, c.y), frozenset()
    if isinstance(c, ReadNext):
        post = sep_join([PointsTo(c.y, z), Eq(c.x, z)])
        return PointsTo(c.y, z), post, frozenset({c.x})
    if isinstance(c, Free):
        return PointsTo(c.x, z), Emp(), frozenset()
    if isinstance(c, Malloc):
        return Emp(), PointsTo(c.x, MALLOC_VAR), frozenset({c.x, MALLOC_VAR})
    if isinstance(c, Copy):
        return Emp(), Eq(c.x, c.y), frozenset({c.x})
    if isinstance(c, Assume):
        return Emp(), c.formula(), frozenset()
    raise TypeError(f"Unknown statement {c!r}")


def footprint_var(c):
    """Variable whose cell the statement needs, or None."""
    if isinstance(c, (AssignNext, Free)):
        return c.x
    if isinstance(c, ReadNext):
        return c.y
    return None


def local_contract_holds(c, m_local, frame, fresh_policy=default_malloc):
    """Check a local rule on a footprint model composed with a frame heap.

    The statement must not fault, and the resulting heap must split into the
    unchanged frame and a part satisfying the local post.
    """
    pre, post, _ = local_rule(c)
    if not holds(m_local, pre):
        return True
    composed = strong_union(m_local.stack, m_local.heap, frame)
    if composed is None:
        return True
    result = concrete_step(Model(m_local.stack, composed), c, fresh_policy)
    if isinstance(result, Fault):
        return False
    if isinstance(result, Stuck):
        return True
    if any(result.heap.get(src) != dst for src, dst in frame.items()):
        return False
    footprint = {src: dst for src, dst in result.heap.items() if src not in frame}
    if strong_union(result.stack, footprint, frame) is None:
        return False
    return holds(Model(result.stack, footprint), post)


# Symbolic execution


@dataclass(frozen=True)
class SymState:
    conjuncts: tuple
    counter: int = 1
    introduced: frozenset = frozenset()
    pruned: bool = False

    @property
    def formula(self):
        return sep_join(self.conjuncts)

    def __str__(self):
        if self.pruned:
            return "pruned: " + render(self.formula)
        return render(self.formula)


_FRESH_SUFFIX = re.compile(r"#[0-9]+$")


def _fresh(state, name):
    base = _FRESH_SUFFIX.sub("", name)
    fresh = f"{base}#{state.counter}"
    return fresh, SymState(
        state.conjuncts, state.counter + 1, state.introduced | {fresh}, state.pruned
    )


def contradictory(conjuncts):
    """Syntactic contradiction among the pure conjuncts."""
    forest = UnionFind()
    for phi in conjuncts:
        if isinstance(phi, Eq):
            forest.union(phi.x, phi.y)
    for phi in conjuncts:
        if isinstance(phi, Neq) and forest.same(phi.x, phi.y):
            return True
        if isinstance(phi, PointsTo) and forest.same(phi.x, NIL):
            return True
    return False


def _find_pointer(conjuncts, x):
    for i, phi in enumerate(conjuncts):
        if isinstance(phi, PointsTo) and phi.x == x:
            return i, phi.y
    return None


def materialize(state, x, variables=(), limits=VERIFY_LIMITS):
    """Expose the cell of x as x -> z (z fresh) next to a septraction."""
    q = state.formula
    # alloc(x) alone also holds when x is nil
    allocated = And(alloc(x), SepConj(Neq(x, NIL), true_()))
    if not entails(q, allocated, variables, robust=True, limits=limits).success:
        raise VerificationError(f"{x} possibly unallocated in {render(q)}")
    z, state = _fresh(state, LOCAL_TARGET)
    cell = PointsTo(x, z)
    logger.debug("Materialized %s", render(cell))
    conjuncts = (Septraction(cell, q), cell)
    return SymState(conjuncts, state.counter, state.introduced, state.pruned)


def _rename(state, names, conjuncts, target):
    """Give fresh names to the modified variables among the frame's."""
    mapping = {}
    for name in sorted(names, key=var_key):
        fresh, state = _fresh(state, name)
        mapping[name] = fresh
    conjuncts = [substitute(phi, mapping) for phi in conjuncts]
    return state, conjuncts, mapping.get(target, target)


def symbolic_step(state, c, variables=(), limits=VERIFY_LIMITS):
    """Apply the frame rule for one statement, materializing if needed."""
    if state.pruned:
        return state
    _, _, modvars = local_rule(c)
    x = footprint_var(c)

    if x is None:
        conjuncts, target, pos = list(state.conjuncts), None, len(state.conjuncts)
        frame_vars = set().union(*(free_vars(phi) for phi in conjuncts))
    else:
        found = _find_pointer(state.conjuncts, x)
        if found is None:
            state = materialize(state, x, variables, limits)
            found = _find_pointer(state.conjuncts, x)
        pos, target = found
        conjuncts = list(state.conjuncts[:pos] + state.conjuncts[pos + 1 :])
        frame_vars = set().union(*(free_vars(phi) for phi in conjuncts), {target})

    state, conjuncts, target = _rename(state, modvars & frame_vars, conjuncts, target)

    if isinstance(c, AssignNext):
        local = [PointsTo(c.x, c.y)]
    elif isinstance(c, ReadNext):
        local = [PointsTo(c.y, target), Eq(c.x, target)]
    elif isinstance(c, Free):
        local = []
    elif isinstance(c, Malloc):
        local = [PointsTo(c.x, MALLOC_VAR)]
    elif isinstance(c, Copy):
        local = [Eq(c.x, c.y)]
    else:
        local = [c.formula()]

    conjuncts = conjuncts[:pos] + local + conjuncts[pos:]
    pruned = isinstance(c, Assume) and contradictory(conjuncts)
    if pruned:
        logger.info("Pruned infeasible branch after %s", c)
    return SymState(tuple(conjuncts), state.counter, state.introduced, pruned)


def exec_trace(pre, body, variables=(), limits=VERIFY_LIMITS):
    """Symbolic states before and after every statement."""
    state = SymState(tuple(c for c in sep_conjuncts(pre) if not isinstance(c, Emp)))
    states = [state]
    for c in body:
        if isinstance(c, While):
            raise VerificationError("Loops must be split into verification conditions")
        state = symbolic_step(state, c, variables, limits)
        states.append(state)
    return states


def exec_symbolic(pre, body, variables=(), limits=VERIFY_LIMITS):
    if not is_positive(pre):
        raise VerificationError(f"Precondition {render(pre)} is not positive")
    return exec_trace(pre, body, variables, limits)[-1]


# Verification conditions


def vcgen(program):
    """Triples whose validity implies the program's correctness."""
    triples = []

    def segment(pre, stmts, post, label):
        straight = []
        for c in stmts:
            if not isinstance(c, While):
                straight.append(c)
                continue
            if c.invariant is None:
                raise VerificationError(f"Loop {c} has no invariant")
            inv = c.invariant
            triples.append(Triple(pre, tuple(straight), inv, f"{label}: entry of {c}"))
            segment(
                sep_join([inv, c.guard.formula()]), c.body, inv, f"{label}: body of {c}"
            )
            pre = sep_join([inv, c.guard.negated().formula()])
            straight = []
        triples.append(Triple(pre, tuple(straight), post, f"{label}: exit"))

    segment(program.pre, program.body, program.post, "program")
    return triples


@dataclass(frozen=True)
class Discharge:
    triple: Triple
    verdict: Verdict
    final: SymState = None
    trace: list = field(default_factory=list)


def discharge(triple, variables=(), limits=VERIFY_LIMITS):
    """Decide a triple by symbolic execution and an entailment check."""
    for name, phi in (("Precondition", triple.pre), ("Postcondition", triple.post)):
        if not is_positive(phi):
            raise VerificationError(f"{name} {render(phi)} is not positive")
    trace = exec_trace(triple.pre, triple.body, variables, limits)
    final = trace[-1]
    leaked = free_vars(triple.post) & final.introduced
    if leaked:
        names = ", ".join(sorted(leaked, key=var_key))
        raise VerificationError(f"Postcondition mentions fresh variables: {names}")
    if final.pruned:
        return Discharge(triple, Verdict(Status.VALID), final, trace)
    verdict = entails(final.formula, triple.post, variables, robust=True, limits=limits)
    return Discharge(triple, verdict, final, trace)


def verify(program, limits=VERIFY_LIMITS):
    """Discharge all verification conditions of an annotated program."""
    return [discharge(triple, limits=limits) for triple in vcgen(program)]


# Soundness checks


def robustness_holds(phi, m1, m2):
    """Compare oracle verdicts on two stacks agreeing on the formula's variables."""
    if m1.heap != m2.heap:
        raise ValueError("Models must share the heap")
    if any(m1.stack.get(v) != m2.stack.get(v) for v in free_vars(phi) | {NIL}):
        raise ValueError("Stacks must agree on the free variables")
    return holds(m1, phi) == holds(m2, phi)


def find_stack_extension(model, phi, names):
    """Extend the stack by names so that phi holds, or return None."""
    names = sorted(names, key=var_key)
    candidates = sorted(locs(model.heap) | set(model.stack.values()))
    candidates.append(max(candidates) + 1)

    def search(i, stack):
        if i == len(names):
            extended = Model(stack, model.heap)
            return extended if holds(extended, phi) else None
        for loc in candidates:
            found = search(i + 1, {**stack, names[i]: loc})
            if found is not None:
                return found
        return None

    return search(0, dict(model.stack))
