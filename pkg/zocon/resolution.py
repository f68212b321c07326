"""Clausal cores and resolution closures of 0-1 systems."""
import logging
from dataclasses import dataclass

from .core import (
    BinarySystem,
    Clause,
    EMPTY_CLAUSE,
    LinIneq,
    PartialAssignment,
    clause_to_inequality,
    inequality_implies_clause,
)
from .oracle import require_within_cap

logger = logging.getLogger(__name__)


def _antichain(clauses):
    kept = []
    for clause in sorted(set(clauses), key=Clause.sort_key):
        if not any(other.absorbs(clause) for other in kept):
            kept.append(clause)
    return frozenset(kept)


@dataclass(frozen=True)
class ClauseSet:
    """Clauses reduced so that no member absorbs another.

    Iteration follows the canonical clause order: shorter clauses first,
    then by literals."""

    clauses: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "clauses", _antichain(self.clauses))

    def __iter__(self):
        return iter(sorted(self.clauses, key=Clause.sort_key))

    def __len__(self):
        return len(self.clauses)

    def __contains__(self, clause):
        return clause in self.clauses

    @property
    def infeasible(self):
        return EMPTY_CLAUSE in self.clauses

    def absorbs(self, clause):
        return any(member.absorbs(clause) for member in self.clauses)

    def inequalities(self):
        """Clausal inequalities of the members; the empty clause becomes ``0 >= 1``."""
        return [
            LinIneq((), 1) if clause.is_empty() else clause_to_inequality(clause) for clause in self
        ]

    def as_system(self, n):
        return BinarySystem(n, tuple(self.inequalities()))

    def to_list(self):
        return [str(clause) for clause in self]


@dataclass(frozen=True)
class ProofStep:
    clause: Clause
    parents: tuple = None
    pivot: int = None

    @property
    def axiom(self):
        return self.parents is None


class ProofDag:
    """Resolution derivations in the order they were found."""

    def __init__(self):
        self.steps = []
        self._index = {}

    def index_of(self, clause):
        return self._index[clause]

    def add_axiom(self, clause):
        if clause not in self._index:
            self._index[clause] = len(self.steps)
            self.steps.append(ProofStep(clause))
        return self._index[clause]

    def add_resolvent(self, clause, first, second, pivot):
        self._index.setdefault(clause, len(self.steps))
        self.steps.append(ProofStep(clause, (first, second), pivot))
        return len(self.steps) - 1

    def replay(self):
        """Re-execute every recorded step; True when each derived clause is reproduced."""
        for index, step in enumerate(self.steps):
            if step.axiom:
                continue
            first, second = step.parents
            if first >= index or second >= index:
                return False
            result = resolvent(self.steps[first].clause, self.steps[second].clause)
            if result is None or result != (step.clause, step.pivot):
                return False
        return True

    def derivation(self, clause):
        """The steps needed to derive ``clause``, in order."""
        needed = set()
        stack = [self._index[clause]]
        while stack:
            index = stack.pop()
            if index in needed:
                continue
            needed.add(index)
            if not self.steps[index].axiom:
                stack.extend(self.steps[index].parents)
        return [(index, self.steps[index]) for index in sorted(needed)]

    def __len__(self):
        return len(self.steps)

    def to_dict(self):
        return [
            {
                "clause": str(step.clause),
                "parents": "axiom" if step.axiom else list(step.parents),
                "pivot": step.pivot,
            }
            for step in self.steps
        ]


def row_clauses(a, n):
    """Prime clauses implied by a single inequality, found by dropping literals
    from the clauses of its violating points while the implication holds."""
    if inequality_implies_clause(a, EMPTY_CLAUSE, n):
        return {EMPTY_CLAUSE}
    variables = sorted(a.variables)
    primes = set()
    seen = set()

    def strengthen(clause):
        if clause in seen:
            return
        seen.add(clause)
        reduced = False
        for literal in clause.literals:
            smaller = Clause.from_literals(lit for lit in clause.literals if lit != literal)
            if inequality_implies_clause(a, smaller, n):
                reduced = True
                strengthen(smaller)
        if not reduced:
            primes.add(clause)

    for point in _points(variables):
        if not a.satisfied_by(point.as_dict()):
            strengthen(point.falsified_clause())
    return primes


def _points(variables):
    for mask in range(2 ** len(variables)):
        yield PartialAssignment(
            (var, (mask >> (len(variables) - 1 - i)) & 1) for i, var in enumerate(variables)
        )


def clausal_core(S, cap=None):
    """``S_C``: the prime clauses implied by individual rows of ``S``.

    An unsatisfiable row contributes the empty clause, which absorbs everything."""
    require_within_cap(S, cap)
    clauses = set()
    for row in S.rows:
        clauses |= row_clauses(row, S.n)
    core = ClauseSet(frozenset(clauses))
    logger.debug("clausal core has {count} clauses".format(count=len(core)))
    return core


def resolvent(c1, c2):
    """Resolvent of two clauses and its pivot, or None unless they clash on exactly one variable."""
    clash = (c1.pos & c2.neg) | (c1.neg & c2.pos)
    if len(clash) != 1:
        return None
    (pivot,) = clash
    return (
        Clause((c1.pos | c2.pos) - {pivot}, (c1.neg | c2.neg) - {pivot}),
        pivot,
    )


def _saturate(C, input_only):
    axioms = sorted(C.clauses, key=Clause.sort_key)
    dag = ProofDag()
    for clause in axioms:
        dag.add_axiom(clause)
    current = set(axioms)
    if C.infeasible:
        return ClauseSet(frozenset(current)), dag
    queue = list(axioms)
    processed = []
    while queue:
        clause = queue.pop(0)
        if clause not in current:
            continue
        partners = axioms if input_only else processed
        for partner in list(partners):
            if not input_only and partner not in current:
                continue
            result = resolvent(clause, partner)
            if result is None:
                continue
            new, pivot = result
            if any(other.absorbs(new) for other in current):
                continue
            dag.add_resolvent(new, dag.index_of(clause), dag.index_of(partner), pivot)
            if new.is_empty():
                logger.debug("empty clause derived")
                return ClauseSet(frozenset([EMPTY_CLAUSE])), dag
            current = {other for other in current if not new.absorbs(other)}
            current.add(new)
            queue.append(new)
            if clause not in current:
                break
        processed.append(clause)
    logger.debug(
        "closure saturated with {count} clauses after {steps} steps".format(
            count=len(current), steps=len(dag)
        )
    )
    return ClauseSet(frozenset(current)), dag


def full_closure(C):
    """Saturate under resolution, discarding absorbed clauses as they appear."""
    closure, _ = _saturate(C, input_only=False)
    return closure


def input_closure(C):
    """Saturate using only steps with at least one parent among the original clauses of ``C``.

    :returns: (ClauseSet, ProofDag)"""
    return _saturate(C, input_only=True)


def has_input_proof(C, target):
    """True when some clause of the input closure of ``C`` absorbs ``target``."""
    closure, _ = input_closure(C)
    return closure.absorbs(target)
