"""Rank-1 Chvátal-Gomory cuts for clausal inequalities.

Multipliers always refer to the row family ``[rows of S; x_j >= 0; -x_j >= -1]``,
the box rows in variable order, as returned by :meth:`BinarySystem.lp_rows`.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import ceil

from .config import config
from .core import Clause, LinIneq, clause_to_inequality, combine
from .lp import CertificateError, LpProblem, LpStatus, lp_feasible, lp_optimize
from .oracle import (
    ConsistencyReport,
    Property,
    enumerate_feasible,
    lp_consistent,
    require_within_cap,
)
from .resolution import clausal_core, input_closure
from .util import rat_str

logger = logging.getLogger(__name__)


class LpConsistentError(ValueError):
    """A cut was requested for a partial assignment that ``S_LP`` admits."""


@dataclass(frozen=True)
class CutCertificate:
    """Multipliers proving that ``target`` is a rank-1 C-G cut.

    :param multipliers: one nonnegative multiplier per row of ``S.lp_rows()``.
    :type multipliers: tuple of Fraction
    :param target: the clausal inequality.
    :type target: LinIneq
    :param combined_rhs: right hand side of the combination before rounding.
    :type combined_rhs: Fraction"""

    multipliers: tuple
    target: LinIneq
    combined_rhs: Fraction

    @classmethod
    def build(cls, S, multipliers, target):
        multipliers = tuple(Fraction(m) for m in multipliers)
        rhs = sum((m * row.rhs for m, row in zip(multipliers, S.lp_rows())), Fraction(0))
        return cls(multipliers, target, rhs)

    def combination(self, S):
        return combine(S.lp_rows(), self.multipliers)

    def verify(self, S):
        """Re-multiply against ``S`` and check the rounding window ``beta - 1 < u b <= beta``."""
        rows = S.lp_rows()
        if len(self.multipliers) != len(rows) or any(m < 0 for m in self.multipliers):
            return False
        combined = self.combination(S)
        return (
            combined.coefs == self.target.coefs
            and combined.rhs == self.combined_rhs
            and self.target.rhs - 1 < combined.rhs <= self.target.rhs
        )

    def terms(self, S):
        """Nonzero multipliers with the row they scale."""
        return [(str(row), m) for row, m in zip(S.lp_rows(), self.multipliers) if m != 0]

    def to_dict(self, S=None):
        result = {
            "target": str(self.target),
            "combined_rhs": self.combined_rhs,
            "multipliers": list(self.multipliers),
        }
        if S is not None:
            result["rows"] = [str(row) for row in S.lp_rows()]
            result["terms"] = [{"row": row, "multiplier": m} for row, m in self.terms(S)]
        return result


@dataclass(frozen=True)
class SeparatorTrace:
    """How :func:`derive_cg_cut` reached its clause.

    ``surrogate`` is ``sum_{J+} x_j + sum_{J-} (1 - x_j) >= pi`` with the
    constants moved to the right."""

    surrogate: LinIneq
    pi: Fraction
    chosen_subset: tuple
    final_clause: Clause

    def to_dict(self):
        return {
            "surrogate": str(self.surrogate),
            "pi": self.pi,
            "chosen_subset": list(self.chosen_subset),
            "final_clause": str(self.final_clause),
        }


def _multiplier_problem(S, direction):
    # Variables u_i >= 0, one per row of S_LP, with uA = direction and objective u b.
    rows = S.lp_rows()
    count = len(rows)
    constraints = []
    for var in range(1, S.n + 1):
        coefs = {i + 1: row.coef(var) for i, row in enumerate(rows)}
        target = direction.coef(var)
        constraints.append(LinIneq(coefs, target))
        constraints.append(LinIneq({i: -value for i, value in coefs.items()}, -target))
    return LpProblem(
        constraints,
        count,
        bounds={i: (0, None) for i in range(1, count + 1)},
        objective={i + 1: row.rhs for i, row in enumerate(rows)},
    )


def surrogate_bound(S, direction):
    """Largest ``u b`` over ``u >= 0`` with ``u A = a`` for ``a`` the coefficients of ``direction``.

    :returns: (value, multipliers), or (None, None) when no combination reaches
        the direction."""
    outcome = lp_optimize(_multiplier_problem(S, direction), "max")
    if outcome.status is LpStatus.INFEASIBLE:
        return None, None
    if outcome.status is LpStatus.UNBOUNDED:
        raise ValueError("Multiplier problem is unbounded, the LP relaxation is infeasible.")
    count = len(S.lp_rows())
    return outcome.value, [outcome.witness[i] for i in range(1, count + 1)]


def _box_multipliers(S, target):
    # Multipliers on box rows alone that reproduce the target coefficients.
    mults = [Fraction(0)] * (len(S.rows) + 2 * S.n)
    for var, value in target.coefs:
        if value > 0:
            mults[len(S.rows) + var - 1] = value
        else:
            mults[len(S.rows) + S.n + var - 1] = -value
    return mults


def _checked_certificate(S, multipliers, target):
    certificate = CutCertificate.build(S, multipliers, target)
    if not certificate.verify(S):
        raise CertificateError("Cut certificate for '" + str(target) + "' failed re-verification.")
    return certificate


def _certificate_from_farkas(S, target, farkas):
    # Over an empty polytope every inequality is a cut: add a multiple of the
    # contradiction to the box combination until the rhs reaches beta.
    contradiction = [Fraction(0)] * (len(S.rows) + 2 * S.n)
    for i, mult in enumerate(farkas.rows):
        contradiction[i] = mult
    for var, mult in farkas.lower:
        contradiction[len(S.rows) + var - 1] += mult
    for var, mult in farkas.upper:
        contradiction[len(S.rows) + S.n + var - 1] += mult
    base = _box_multipliers(S, target)
    gap = combine(S.lp_rows(), contradiction).rhs
    lift = (target.rhs - combine(S.lp_rows(), base).rhs) / gap
    return _checked_certificate(
        S, [b + lift * c for b, c in zip(base, contradiction)], target
    )


def is_cg_cut(S, c):
    """Certificate that the clausal inequality of ``c`` is a rank-1 C-G cut for ``S_LP``, or None.

    :param S: the system.
    :type S: BinarySystem
    :param c: the clause.
    :type c: Clause
    :returns: CutCertificate or None"""
    target = clause_to_inequality(c)
    relaxation = lp_feasible(LpProblem.from_system(S))
    if not relaxation.feasible:
        return _certificate_from_farkas(S, target, relaxation.certificate)
    best, multipliers = surrogate_bound(S, target)
    if best is None:
        logger.debug("'{target}' is not a surrogate direction".format(target=target))
        return None
    if best <= target.rhs - 1:
        logger.debug(
            "surrogate for '{target}' only reaches {best}".format(target=target, best=rat_str(best))
        )
        return None
    if best > target.rhs:
        # Mix with the box combination (rhs beta - 1) to land exactly on beta.
        base = _box_multipliers(S, target)
        floor_rhs = combine(S.lp_rows(), base).rhs
        weight = (target.rhs - floor_rhs) / (best - floor_rhs)
        multipliers = [weight * u + (1 - weight) * b for u, b in zip(multipliers, base)]
    return _checked_certificate(S, multipliers, target)


def derive_cg_cut(S, a):
    """Construct a clausal C-G cut violated by an LP-infeasible partial assignment.

    The surrogate ``sum_{J+} x_j + sum_{J-} (1 - x_j) >= pi`` is the strongest
    one ``S_LP`` implies in the direction of the clause falsified by ``a``;
    adding bound rows for the first ``ceil(pi) - 1`` assigned variables and
    rounding up gives the cut.

    :returns: (Clause, SeparatorTrace, CutCertificate)"""
    if not lp_feasible(LpProblem.from_system(S)).feasible:
        raise ValueError("The LP relaxation of the system is infeasible.")
    if lp_consistent(S, a):
        raise LpConsistentError("Partial assignment " + str(a) + " is LP-consistent.")
    falsified = a.falsified_clause()
    direction = clause_to_inequality(falsified)
    best, multipliers = surrogate_bound(S, direction)
    pi = best + len(falsified.neg)
    if not 0 < pi <= len(falsified):
        raise CertificateError("Surrogate right hand side " + rat_str(pi) + " is out of range.")
    chosen = tuple(sorted(a.variables)[: ceil(pi) - 1])
    offset = len(S.rows)
    for var in chosen:
        if var in falsified.pos:
            multipliers[offset + S.n + var - 1] += 1
        else:
            multipliers[offset + var - 1] += 1
    clause = Clause(falsified.pos - set(chosen), falsified.neg - set(chosen))
    certificate = _checked_certificate(S, multipliers, clause_to_inequality(clause))
    trace = SeparatorTrace(
        LinIneq(direction.coefs, pi - len(falsified.neg)), pi, chosen, clause
    )
    logger.debug(
        "cut {clause} from pi={pi} dropping {chosen}".format(
            clause=clause, pi=rat_str(pi), chosen=list(chosen)
        )
    )
    return clause, trace, certificate


def prime_implicates(F):
    """Clauses implied by every point of ``F`` none of whose literals can be dropped."""
    primes = []
    projections = {}

    def consistent(J, values):
        if J not in projections:
            projections[J] = F.project(J)
        return values in projections[J]

    for size in range(F.n + 1):
        for J in combinations(range(1, F.n + 1), size):
            for values in product((0, 1), repeat=size):
                if consistent(J, values):
                    continue
                if all(
                    consistent(J[:i] + J[i + 1 :], values[:i] + values[i + 1 :])
                    for i in range(size)
                ):
                    primes.append(
                        Clause(
                            frozenset(var for var, v in zip(J, values) if v == 0),
                            frozenset(var for var, v in zip(J, values) if v == 1),
                        )
                    )
    return primes


def lp_consistency_via_cg(S, cap=None):
    """LP-consistency decided through C-G cuts: every prime implied clause must be one."""
    F = enumerate_feasible(S, cap)
    tested = []
    for clause in prime_implicates(F):
        if clause.is_empty():
            feasible = lp_feasible(LpProblem.from_system(S)).feasible
            tested.append({"clause": str(clause), "cg_cut": not feasible})
            if feasible:
                return ConsistencyReport(
                    Property.LP, False, witness=clause.falsifying_assignment(), details={"clauses": tested}
                )
            continue
        certificate = is_cg_cut(S, clause)
        tested.append({"clause": str(clause), "cg_cut": certificate is not None})
        if certificate is None:
            return ConsistencyReport(
                Property.LP,
                False,
                witness=clause.falsifying_assignment(),
                details={"clauses": tested, "failing_clause": str(clause)},
            )
    return ConsistencyReport(Property.LP, True, details={"clauses": tested})


def clause_universe(n):
    """Every nonempty clause over x1..xn, shortest first."""
    clauses = []
    for signs in product((0, 1, -1), repeat=n):
        if any(signs):
            clauses.append(
                Clause.from_literals(var * sign for var, sign in enumerate(signs, start=1) if sign)
            )
    return sorted(clauses, key=Clause.sort_key)


def prop5_discrepancy(S, cap=None):
    """First clause on which C-G membership over ``S_C`` and input provability disagree.

    :returns: dict describing the clause and both verdicts, or None."""
    limit = config["prop5"]["cap"] if cap is None else cap
    if S.n > limit:
        raise ValueError(
            "Clause universe over " + str(S.n) + " variables exceeds the cap of " + str(limit) + "."
        )
    require_within_cap(S, None)
    core = clausal_core(S)
    clausal = core.as_system(S.n)
    closure, _ = input_closure(core)
    for clause in clause_universe(S.n):
        cg = is_cg_cut(clausal, clause) is not None
        proof = closure.absorbs(clause)
        if cg != proof:
            logger.warning(
                "clause {clause}: cg cut {cg}, input proof {proof}".format(
                    clause=clause, cg=cg, proof=proof
                )
            )
            return {"clause": str(clause), "cg_cut": cg, "input_proof": proof}
    return None


def verify_prop5(S, cap=None):
    """True when C-G cuts of ``S_C`` with the box are exactly the input-provable clauses."""
    return prop5_discrepancy(S, cap) is None
