"""Ground truth by enumeration and definition-level consistency checks.

Every check iterates over partial assignments in a fixed order (fewest
variables first, then lexicographically on the variables and then on the
values) so that a failing check reports the same witness on every run.
"""
import functools
import logging
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations, product

import numpy as np
import pandas as pd

from .config import enumeration_cap
from .core import BinarySystem, LinIneq, PartialAssignment, Clause, clause_to_inequality, var_name
from .lp import LpProblem, lp_feasible

logger = logging.getLogger(__name__)


class EnumerationCapError(ValueError):
    """The system has more variables than the enumeration oracle accepts."""


class Relaxation(Enum):
    EXACT = "exact"
    SUBSET = "subset"
    LP = "lp"


class Property(Enum):
    CONSISTENT = "consistent"
    DOMAIN = "domain"
    K = "k"
    STRONG_K = "strong-k"
    SEQ_K = "seq-k"
    LP = "lp"
    SEQ_LP_K = "seq-lp-k"

    @property
    def needs_k(self):
        return self in (Property.K, Property.STRONG_K, Property.SEQ_K, Property.SEQ_LP_K)

    @classmethod
    def parse(cls, text):
        """Parse ``consistent``, ``lp``, ``k:2``, ``seq-lp-k:2`` and friends into (property, k)."""
        name, sep, level = text.partition(":")
        try:
            prop = cls(name)
        except ValueError:
            raise ValueError("Unknown property '" + text + "'.")
        if prop.needs_k != bool(sep):
            raise ValueError(
                "Property '" + name + "' " + ("needs" if prop.needs_k else "takes no") + " a level."
            )
        if not sep:
            return prop, None
        if not level.isdigit():
            raise ValueError("Malformed level in property '" + text + "'.")
        return prop, int(level)


class RhsPolicy(Enum):
    FREE = "free"
    FEASIBLE = "feasible"


@dataclass(frozen=True)
class FeasibleSet:
    """``D(S)``: the full 0-1 points satisfying every row."""

    n: int
    points: frozenset

    def project(self, variables):
        """``D(S)|_J`` as a set of value tuples ordered like sorted J."""
        variables = sorted(variables)
        return frozenset(tuple(point[var - 1] for var in variables) for point in self.points)

    def contains(self, assignment):
        return any(assignment.agrees_with(point) for point in self.points)

    def sorted_points(self):
        return sorted(self.points)

    def __len__(self):
        return len(self.points)

    def to_frame(self):
        return pd.DataFrame(
            self.sorted_points(), columns=[var_name(var) for var in range(1, self.n + 1)]
        )


@dataclass(frozen=True)
class ConsistencyReport:
    """Verdict of a consistency check, with a counterexample when it fails."""

    property: Property
    verdict: bool
    k: int = None
    witness: PartialAssignment = None
    details: dict = field(default_factory=dict, compare=False)

    @property
    def label(self):
        if self.k is None:
            return self.property.value
        return "{name}:{k}".format(name=self.property.value, k=self.k)

    def to_dict(self):
        return {
            "property": self.label,
            "verdict": self.verdict,
            "witness": None if self.witness is None else str(self.witness),
            "details": self.details,
        }


def require_within_cap(S, cap):
    limit = enumeration_cap(cap)
    if S.n > limit:
        raise EnumerationCapError(
            "System has "
            + str(S.n)
            + " variables, the enumeration cap is "
            + str(limit)
            + "; raise it with --cap or ZOCON_CAP."
        )


@functools.lru_cache(maxsize=512)
def _feasible_points(S):
    # Rows are checked as soon as their last variable is assigned.
    closing = {}
    for row in S.rows:
        last = max(row.variables) if row.variables else 0
        closing.setdefault(last, []).append(row)
    if any(not row.satisfied_by({}) for row in closing.get(0, [])):
        return frozenset()
    points = []
    values = {}

    def extend(var):
        if var > S.n:
            points.append(tuple(values[j] for j in range(1, S.n + 1)))
            return
        for value in (0, 1):
            values[var] = value
            if all(row.satisfied_by(values) for row in closing.get(var, [])):
                extend(var + 1)
        del values[var]

    extend(1)
    return frozenset(point for point in points if S.satisfied_by(point))


def enumerate_feasible(S, cap=None):
    """All 0-1 points of ``S`` by lexicographic enumeration with early row pruning.

    :param S: the system.
    :type S: BinarySystem
    :param cap: largest variable count accepted, defaults to the configured cap.
    :type cap: int"""
    require_within_cap(S, cap)
    points = _feasible_points(S)
    logger.debug("{count} feasible points for n={n}".format(count=len(points), n=S.n))
    return FeasibleSet(S.n, points)


def project(F, J):
    """Projection of a feasible set onto the variables J."""
    if any(var < 1 or var > F.n for var in J):
        raise ValueError("Projection variables must lie in 1.." + str(F.n) + ".")
    return F.project(J)


def _validate_assignment(S, a):
    if any(var > S.n for var in a.variables):
        raise ValueError(
            "Assignment " + str(a) + " uses variables beyond x" + str(S.n) + "."
        )


def lp_consistent(S, a):
    """True when ``S_LP`` together with the fixing ``a`` is feasible."""
    return lp_feasible(LpProblem.from_system(S, fixings=a)).feasible


def consistent_with(S, a, relaxation=Relaxation.EXACT, cap=None):
    """Whether the partial assignment ``a`` is consistent with ``S`` under a relaxation.

    :param relaxation: ``EXACT`` extends to a feasible 0-1 point, ``SUBSET``
        violates no row all of whose variables are bound, ``LP`` is feasible
        for ``S_LP``.
    :type relaxation: Relaxation"""
    _validate_assignment(S, a)
    if relaxation is Relaxation.EXACT:
        return enumerate_feasible(S, cap).contains(a)
    if relaxation is Relaxation.SUBSET:
        return not S.violates_bound_rows(a)
    return lp_consistent(S, a)


def _assignments(variables):
    for values in product((0, 1), repeat=len(variables)):
        yield PartialAssignment(zip(variables, values))


def partial_assignments(n, sizes=None):
    for size in range(n + 1) if sizes is None else sizes:
        for J in combinations(range(1, n + 1), size):
            for a in _assignments(J):
                yield J, a


def _report(prop, k, witness=None, **details):
    return ConsistencyReport(prop, witness is None, k=k, witness=witness, details=details)


def _check_consistent(S, F):
    projections = {}
    for J, a in partial_assignments(S.n):
        if S.violates_bound_rows(a):
            continue
        if J not in projections:
            projections[J] = F.project(J)
        if tuple(value for _, value in a.bindings) not in projections[J]:
            return _report(Property.CONSISTENT, None, a)
    return _report(Property.CONSISTENT, None)


def _check_domain(S, F):
    # Values excluded by a row over the variable alone are outside its domain.
    for var in range(1, S.n + 1):
        values = F.project([var])
        for value in (0, 1):
            if S.violates_bound_rows(PartialAssignment({var: value})):
                continue
            if (value,) not in values:
                return _report(Property.DOMAIN, None, PartialAssignment({var: value}))
    return _report(Property.DOMAIN, None)


def _k_failure(S, k):
    for J in combinations(range(1, S.n + 1), k - 1):
        for a in _assignments(J):
            if S.restricted(J).violates_bound_rows(a):
                continue
            for var in range(1, S.n + 1):
                if var in J:
                    continue
                scope = S.restricted(J + (var,))
                if all(scope.violates_bound_rows(a.extended(var, value)) for value in (0, 1)):
                    return a, var
    return None


def _check_k(S, k):
    failure = _k_failure(S, k)
    if failure is None:
        return _report(Property.K, k)
    return _report(Property.K, k, failure[0], variable=failure[1])


def _check_strong_k(S, k):
    for level in range(1, k + 1):
        failure = _k_failure(S, level)
        if failure is not None:
            return _report(Property.STRONG_K, k, failure[0], variable=failure[1], level=level)
    return _report(Property.STRONG_K, k)


def _order(S, order):
    order = tuple(range(1, S.n + 1)) if order is None else tuple(order)
    if sorted(order) != list(range(1, S.n + 1)):
        raise ValueError("Order " + str(order) + " is not a permutation of 1.." + str(S.n) + ".")
    return order


def _check_seq_k(S, k, order):
    prefix = order[: k - 1]
    var = order[k - 1]
    before = S.restricted(prefix)
    after = S.restricted(prefix + (var,))
    for a in _assignments(prefix):
        if before.violates_bound_rows(a):
            continue
        if all(after.violates_bound_rows(a.extended(var, value)) for value in (0, 1)):
            return _report(Property.SEQ_K, k, a, variable=var, order=list(order))
    return _report(Property.SEQ_K, k, order=list(order))


def _check_lp(S, F):
    infeasible = []
    projections = {}
    for J, a in partial_assignments(S.n):
        if J not in projections:
            projections[J] = F.project(J)
        if tuple(value for _, value in a.bindings) in projections[J]:
            continue
        bindings = set(a.bindings)
        if any(known <= bindings for known in infeasible):
            continue
        if lp_consistent(S, a):
            return _report(Property.LP, None, a)
        infeasible.append(set(a.bindings))
    return _report(Property.LP, None)


def _check_seq_lp_k(S, k, order):
    prefix = order[: k - 1]
    var = order[k - 1]
    for a in _assignments(prefix):
        if not lp_consistent(S, a):
            continue
        if not any(lp_consistent(S, a.extended(var, value)) for value in (0, 1)):
            return _report(Property.SEQ_LP_K, k, a, variable=var, order=list(order))
    return _report(Property.SEQ_LP_K, k, order=list(order))


def check(S, prop, k=None, order=None, cap=None):
    """Check a consistency property literally from its definition.

    :param S: the system.
    :type S: BinarySystem
    :param prop: the property to check.
    :type prop: Property
    :param k: level for the k-type properties.
    :type k: int
    :param order: variable order for the sequential properties, natural by default.
    :type order: tuple
    :returns: ConsistencyReport"""
    if prop.needs_k:
        if k is None or k < 1 or k > S.n:
            raise ValueError(
                "Property " + prop.value + " needs a level k in 1.." + str(S.n) + ", found " + str(k) + "."
            )
    require_within_cap(S, cap)
    if prop is Property.CONSISTENT:
        return _check_consistent(S, enumerate_feasible(S, cap))
    if prop is Property.DOMAIN:
        return _check_domain(S, enumerate_feasible(S, cap))
    if prop is Property.K:
        return _check_k(S, k)
    if prop is Property.STRONG_K:
        return _check_strong_k(S, k)
    if prop is Property.SEQ_K:
        return _check_seq_k(S, k, _order(S, order))
    if prop is Property.LP:
        return _check_lp(S, enumerate_feasible(S, cap))
    return _check_seq_lp_k(S, k, _order(S, order))


def witness_is_genuine(S, report, cap=None):
    """Re-verify a failed report's witness by direct enumeration.

    Uses full point enumeration and a fresh LP solve rather than the
    incremental machinery of :func:`check`."""
    if report.verdict:
        return report.witness is None
    a = report.witness
    F = enumerate_feasible(S, cap)
    prop = report.property
    if prop is Property.CONSISTENT:
        bound = a.as_dict()
        violates = any(
            row.variables <= bound.keys() and not row.satisfied_by(bound) for row in S.rows
        )
        return not violates and not F.contains(a)
    if prop is Property.DOMAIN:
        return len(a) == 1 and not S.violates_bound_rows(a) and not F.contains(a)
    if prop is Property.LP:
        return not F.contains(a) and lp_consistent(S, a)
    var = report.details["variable"]
    if prop is Property.SEQ_LP_K:
        return lp_consistent(S, a) and not any(
            lp_consistent(S, a.extended(var, value)) for value in (0, 1)
        )
    scope = set(a.variables)
    inner = [row for row in S.rows if row.variables <= scope]
    outer = [row for row in S.rows if row.variables <= scope | {var}]
    if any(not row.satisfied_by(a.as_dict()) for row in inner):
        return False
    return all(
        any(not row.satisfied_by(a.extended(var, value).as_dict()) for row in outer)
        for value in (0, 1)
    )


def consistent_by_projection(S, cap=None):
    """Consistency as the projection equality ``D_J(S_J) = D(S)|_J`` for every J."""
    F = enumerate_feasible(S, cap)
    for size in range(S.n + 1):
        for J in combinations(range(1, S.n + 1), size):
            scope = S.restricted(J)
            local = set()
            for values in product((0, 1), repeat=size):
                point = dict(zip(J, values))
                if all(row.satisfied_by(point) for row in scope.rows):
                    local.add(values)
            if local != set(F.project(J)):
                return False
    return True


def _coupling(S, order):
    order = _order(S, order)
    position = {var: i for i, var in enumerate(order)}
    later = {var: set() for var in order}
    earlier = {var: set() for var in order}
    for row in S.rows:
        for i, j in combinations(sorted(row.variables, key=position.get), 2):
            later[i].add(j)
            earlier[j].add(i)
    return later, earlier


def dependency_width(S, order=None):
    """Largest out-degree of the coupling digraph whose edges point from earlier to later variables."""
    later, _ = _coupling(S, order)
    return max((len(succ) for succ in later.values()), default=0)


def parent_width(S, order=None):
    """Largest number of earlier variables coupled to a variable (Freuder's width)."""
    _, earlier = _coupling(S, order)
    return max((len(pred) for pred in earlier.values()), default=0)


def random_system(n, m, coeff_range=4, rhs_policy=RhsPolicy.FREE, seed=0, cap=None):
    """Seeded random system with integer coefficients in ``[-coeff_range, coeff_range]``.

    :param rhs_policy: ``FEASIBLE`` picks a random 0-1 point and keeps every row
        satisfied by it, ``FREE`` draws the right hand sides independently.
    :type rhs_policy: RhsPolicy"""
    if n > enumeration_cap(cap):
        raise EnumerationCapError(
            "Cannot generate " + str(n) + " variables beyond the enumeration cap."
        )
    if n == 0 and m > 0:
        raise ValueError("A system without variables cannot have random rows.")
    rng = np.random.default_rng(seed)
    point = [int(value) for value in rng.integers(0, 2, size=n)]
    rows = []
    for _ in range(m):
        coefs = [int(value) for value in rng.integers(-coeff_range, coeff_range + 1, size=n)]
        if not any(coefs):
            coefs[int(rng.integers(0, n))] = int(rng.choice([-1, 1])) * int(
                rng.integers(1, coeff_range + 1)
            )
        if rhs_policy is RhsPolicy.FEASIBLE:
            value = sum(c * x for c, x in zip(coefs, point))
            rhs = value - int(rng.integers(0, coeff_range + 1))
        else:
            rhs = int(rng.integers(-coeff_range, coeff_range + 1))
        rows.append(LinIneq({var: c for var, c in enumerate(coefs, start=1)}, rhs))
    return BinarySystem(n, tuple(rows))


def random_clause_system(n, m, seed=0):
    """Seeded system of ``m`` random nonempty clausal inequalities over ``n`` variables."""
    if n == 0 and m > 0:
        raise ValueError("A system without variables cannot have random clauses.")
    rng = np.random.default_rng(seed)
    rows = []
    while len(rows) < m:
        signs = [int(value) for value in rng.integers(-1, 2, size=n)]
        if not any(signs):
            continue
        clause = Clause.from_literals(
            var * sign for var, sign in enumerate(signs, start=1) if sign
        )
        rows.append(clause_to_inequality(clause))
    return BinarySystem(n, tuple(rows))
