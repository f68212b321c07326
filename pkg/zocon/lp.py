"""Exact rational linear programming with Farkas certificates.

A two phase primal simplex over a Fraction tableau. Entering and leaving
variables follow Bland's rule, so the pivot sequence is deterministic and
terminates. Bounds are folded into the tableau (finite lower bounds are
shifted to zero, finite upper bounds become rows, free variables are split)
so that the dual values of the final phase one basis give a certificate
over the original rows and bounds.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from .core import LinIneq, PartialAssignment, var_name
from .util import to_rat, rat_str

logger = logging.getLogger(__name__)


class CertificateError(AssertionError):
    """A witness or certificate failed exact re-verification."""


class LpStatus(Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    OPTIMAL = "optimal"
    UNBOUNDED = "unbounded"


class LpProblem:
    """Rows ``A x >= b`` over variables 1..m with bounds, an optional objective and fixings.

    :param rows: the inequalities.
    :type rows: list of LinIneq
    :param num_vars: number of variables m.
    :type num_vars: int
    :param bounds: variable to (lower, upper), either side may be None for infinite.
        Variables not listed lie in [0, 1].
    :type bounds: dict
    :param objective: variable to coefficient.
    :type objective: dict
    :param fixings: 0-1 values imposed as lower = upper bounds.
    :type fixings: PartialAssignment"""

    def __init__(self, rows, num_vars, bounds=None, objective=None, fixings=None):
        self.rows = tuple(rows)
        self.num_vars = num_vars
        self.objective = None
        if objective is not None:
            self.objective = {var: to_rat(value) for var, value in dict(objective).items()}
        self.fixings = fixings if fixings is not None else PartialAssignment()
        self.bounds = {}
        for var in range(1, num_vars + 1):
            lower, upper = (0, 1) if bounds is None else bounds.get(var, (0, 1))
            lower = None if lower is None else to_rat(lower)
            upper = None if upper is None else to_rat(upper)
            if lower is not None and upper is not None and lower > upper:
                raise ValueError(
                    "Lower bound "
                    + rat_str(lower)
                    + " exceeds upper bound "
                    + rat_str(upper)
                    + " for "
                    + var_name(var)
                    + "."
                )
            self.bounds[var] = (lower, upper)
        used = set(self.fixings.variables)
        for row in self.rows:
            used |= row.variables
        if self.objective:
            used |= set(self.objective)
        if used and max(used) > num_vars:
            raise ValueError(
                "Problem uses " + var_name(max(used)) + " but declares " + str(num_vars) + " variables."
            )

    @classmethod
    def from_system(cls, S, fixings=None, objective=None):
        """``S_LP`` of a binary system, optionally with fixings and an objective."""
        return cls(S.rows, S.n, fixings=fixings, objective=objective)

    def effective_bounds(self):
        """Bounds intersected with the fixings; a fixing outside its bounds leaves lower > upper."""
        bounds = dict(self.bounds)
        for var, value in self.fixings.bindings:
            lower, upper = bounds[var]
            value = Fraction(value)
            bounds[var] = (
                value if lower is None else max(lower, value),
                value if upper is None else min(upper, value),
            )
        return bounds


@dataclass(frozen=True)
class FarkasCertificate:
    """Nonnegative multipliers on rows and bounds whose sum reads ``0 >= positive``.

    ``lower`` holds multipliers of ``x_j >= lower_j`` and ``upper`` those of
    ``-x_j >= -upper_j``, both as (variable, multiplier) pairs."""

    rows: tuple
    lower: tuple = ()
    upper: tuple = ()

    def combination(self, problem):
        bounds = problem.effective_bounds()
        coefs = {}
        rhs = Fraction(0)
        for row, mult in zip(problem.rows, self.rows):
            for var, value in row.coefs:
                coefs[var] = coefs.get(var, Fraction(0)) + mult * value
            rhs += mult * row.rhs
        for var, mult in self.lower:
            coefs[var] = coefs.get(var, Fraction(0)) + mult
            rhs += mult * bounds[var][0]
        for var, mult in self.upper:
            coefs[var] = coefs.get(var, Fraction(0)) - mult
            rhs -= mult * bounds[var][1]
        return LinIneq(coefs, rhs)

    def verify(self, problem):
        """True when the multipliers are nonnegative and combine to a contradiction."""
        if len(self.rows) != len(problem.rows):
            return False
        mults = list(self.rows) + [m for _, m in self.lower] + [m for _, m in self.upper]
        if any(m < 0 for m in mults):
            return False
        bounds = problem.effective_bounds()
        if any(bounds[var][0] is None for var, m in self.lower if m != 0):
            return False
        if any(bounds[var][1] is None for var, m in self.upper if m != 0):
            return False
        return self.combination(problem).is_contradiction()

    def to_dict(self):
        return {
            "rows": list(self.rows),
            "lower": {var_name(var): mult for var, mult in self.lower},
            "upper": {var_name(var): mult for var, mult in self.upper},
        }


@dataclass(frozen=True)
class LpOutcome:
    status: LpStatus
    witness: dict = field(default=None, compare=False)
    value: Fraction = None
    certificate: FarkasCertificate = None

    @property
    def feasible(self):
        return self.status is not LpStatus.INFEASIBLE

    def to_dict(self):
        return {
            "status": self.status.value,
            "witness": None
            if self.witness is None
            else {var_name(var): value for var, value in sorted(self.witness.items())},
            "value": self.value,
            "certificate": None if self.certificate is None else self.certificate.to_dict(),
        }


class _Tableau:
    """Dense tableau for ``M z = d, z >= 0`` with one basic column per row."""

    def __init__(self, matrix, rhs, basis, width):
        self.matrix = matrix
        self.width = width
        self.rhs = rhs
        self.basis = basis
        self.pivots = 0

    def pivot(self, row, col):
        pivot_row = self.matrix[row]
        factor = pivot_row[col]
        self.matrix[row] = [value / factor for value in pivot_row]
        self.rhs[row] = self.rhs[row] / factor
        pivot_row = self.matrix[row]
        for other in range(len(self.matrix)):
            if other == row:
                continue
            scale = self.matrix[other][col]
            if scale == 0:
                continue
            self.matrix[other] = [
                value - scale * pivot_value
                for value, pivot_value in zip(self.matrix[other], pivot_row)
            ]
            self.rhs[other] -= scale * self.rhs[row]
        self.basis[row] = col
        self.pivots += 1

    def reduced_profit(self, cost, col):
        return cost[col] - sum(
            cost[self.basis[r]] * self.matrix[r][col] for r in range(len(self.matrix))
        )

    def maximize(self, cost, allowed):
        """Run Bland's rule to optimality; returns the unbounded column or None."""
        while True:
            basic = set(self.basis)
            entering = None
            for col in range(self.width):
                if allowed[col] and col not in basic and self.reduced_profit(cost, col) > 0:
                    entering = col
                    break
            if entering is None:
                return None
            leaving = None
            for r in range(len(self.matrix)):
                if self.matrix[r][entering] > 0:
                    key = (self.rhs[r] / self.matrix[r][entering], self.basis[r])
                    if leaving is None or key < leaving[0]:
                        leaving = (key, r)
            if leaving is None:
                return entering
            logger.debug(
                "pivot on row {row} column {col}".format(row=leaving[1], col=entering)
            )
            self.pivot(leaving[1], entering)

    def solution(self):
        values = [Fraction(0)] * self.width
        for r, col in enumerate(self.basis):
            values[col] = self.rhs[r]
        return values


def _infeasible(problem, rows=None, lower=(), upper=()):
    certificate = FarkasCertificate(
        rows=tuple(rows) if rows is not None else (Fraction(0),) * len(problem.rows),
        lower=tuple(lower),
        upper=tuple(upper),
    )
    if not certificate.verify(problem):
        raise CertificateError("Farkas certificate failed re-verification.")
    return LpOutcome(LpStatus.INFEASIBLE, certificate=certificate)


def _check_witness(problem, witness):
    bounds = problem.effective_bounds()
    for var, (lower, upper) in bounds.items():
        if lower is not None and witness[var] < lower:
            raise CertificateError("Witness violates the lower bound of " + var_name(var) + ".")
        if upper is not None and witness[var] > upper:
            raise CertificateError("Witness violates the upper bound of " + var_name(var) + ".")
    for row in problem.rows:
        if not row.satisfied_by(witness):
            raise CertificateError("Witness violates row '" + str(row) + "'.")


def _solve(problem, direction=None):
    bounds = problem.effective_bounds()
    num_rows = len(problem.rows)

    for var, (lower, upper) in sorted(bounds.items()):
        if lower is not None and upper is not None and lower > upper:
            return _infeasible(problem, lower=[(var, Fraction(1))], upper=[(var, Fraction(1))])
    for i, row in enumerate(problem.rows):
        if row.is_contradiction():
            mults = [Fraction(0)] * num_rows
            mults[i] = Fraction(1)
            return _infeasible(problem, rows=mults)

    # Columns of z >= 0 and the offset of each variable: x = offset + sum sign * z.
    columns = []
    offset = {}
    constraints = []
    for var in range(1, problem.num_vars + 1):
        lower, upper = bounds[var]
        if lower is not None:
            offset[var] = lower
            columns.append((var, 1))
            if upper is not None:
                constraints.append(({len(columns) - 1: Fraction(-1)}, lower - upper, ("upper", var)))
        elif upper is not None:
            offset[var] = upper
            columns.append((var, -1))
        else:
            offset[var] = Fraction(0)
            columns.append((var, 1))
            columns.append((var, -1))
    column_of = {}
    for col, (var, sign) in enumerate(columns):
        column_of.setdefault(var, []).append((col, sign))
    for i, row in enumerate(problem.rows):
        if not row.coefs:
            continue
        coefs = {}
        for var, value in row.coefs:
            for col, sign in column_of[var]:
                coefs[col] = value * sign
        rhs = row.rhs - sum(value * offset[var] for var, value in row.coefs)
        constraints.append((coefs, rhs, ("row", i)))

    # Standard form: sigma * (G z - s) = sigma * h with sigma chosen so the rhs is >= 0.
    num_z = len(columns)
    num_cons = len(constraints)
    flipped = [rhs <= 0 for _, rhs, _ in constraints]
    artificial_rows = [r for r in range(num_cons) if not flipped[r]]
    width = num_z + num_cons + len(artificial_rows)
    matrix = []
    rhs_column = []
    basis = []
    initial = []
    for r, (coefs, rhs, _) in enumerate(constraints):
        sigma = -1 if flipped[r] else 1
        line = [Fraction(0)] * width
        for col, value in coefs.items():
            line[col] = sigma * value
        line[num_z + r] = Fraction(-sigma)
        if flipped[r]:
            basis.append(num_z + r)
        else:
            col = num_z + num_cons + artificial_rows.index(r)
            line[col] = Fraction(1)
            basis.append(col)
        initial.append(basis[-1])
        matrix.append(line)
        rhs_column.append(sigma * rhs)
    tableau = _Tableau(matrix, rhs_column, basis, width)
    is_artificial = [col >= num_z + num_cons for col in range(width)]

    cost = [Fraction(-1) if is_artificial[col] else Fraction(0) for col in range(width)]
    tableau.maximize(cost, [True] * width)
    shortfall = sum(
        tableau.rhs[r] for r, col in enumerate(tableau.basis) if is_artificial[col]
    )
    if shortfall > 0:
        row_mults = [Fraction(0)] * num_rows
        upper_mults = {}
        for r, (_, _, tag) in enumerate(constraints):
            dual = -sum(
                cost[tableau.basis[k]] * tableau.matrix[k][initial[r]]
                for k in range(num_cons)
            )
            mult = -dual if flipped[r] else dual
            if tag[0] == "row":
                row_mults[tag[1]] = mult
            else:
                upper_mults[tag[1]] = mult
        # Cancel the remaining coefficients with the bound rows.
        residual = {}
        for row, mult in zip(problem.rows, row_mults):
            for var, value in row.coefs:
                residual[var] = residual.get(var, Fraction(0)) + mult * value
        for var, mult in upper_mults.items():
            residual[var] = residual.get(var, Fraction(0)) - mult
        lower_mults = {}
        for var, value in residual.items():
            if value > 0:
                upper_mults[var] = upper_mults.get(var, Fraction(0)) + value
            elif value < 0:
                lower_mults[var] = -value
        logger.debug(
            "infeasible after {pivots} pivots, shortfall {shortfall}".format(
                pivots=tableau.pivots, shortfall=shortfall
            )
        )
        return _infeasible(
            problem,
            rows=row_mults,
            lower=sorted((var, m) for var, m in lower_mults.items() if m != 0),
            upper=sorted((var, m) for var, m in upper_mults.items() if m != 0),
        )

    # Drive zero valued artificials out of the basis, dropping redundant rows.
    keep = []
    for r in range(num_cons):
        if is_artificial[tableau.basis[r]]:
            col = next(
                (c for c in range(width) if not is_artificial[c] and tableau.matrix[r][c] != 0),
                None,
            )
            if col is None:
                continue
            tableau.pivot(r, col)
        keep.append(r)
    tableau.matrix = [tableau.matrix[r] for r in keep]
    tableau.rhs = [tableau.rhs[r] for r in keep]
    tableau.basis = [tableau.basis[r] for r in keep]

    status = LpStatus.FEASIBLE
    if direction is not None:
        sense = 1 if direction == "max" else -1
        cost = [Fraction(0)] * width
        for col, (var, sign) in enumerate(columns):
            cost[col] = sense * sign * problem.objective.get(var, Fraction(0))
        unbounded = tableau.maximize(cost, [not flag for flag in is_artificial])
        status = LpStatus.OPTIMAL if unbounded is None else LpStatus.UNBOUNDED

    z = tableau.solution()
    witness = dict(offset)
    for col, (var, sign) in enumerate(columns):
        witness[var] += sign * z[col]
    _check_witness(problem, witness)
    value = None
    if status is LpStatus.OPTIMAL:
        value = sum(
            (coef * witness[var] for var, coef in problem.objective.items()), Fraction(0)
        )
    logger.debug(
        "{status} after {pivots} pivots".format(status=status.value, pivots=tableau.pivots)
    )
    return LpOutcome(status, witness=witness, value=value)


def lp_feasible(p):
    """Decide feasibility of an :class:`LpProblem` exactly.

    :returns: LpOutcome with a witness when feasible, a Farkas certificate otherwise."""
    return _solve(p)


def lp_optimize(p, direction="max"):
    """Optimize the objective of an :class:`LpProblem` exactly.

    :param direction: ``max`` or ``min``.
    :type direction: string"""
    if p.objective is None:
        raise ValueError("lp_optimize needs a problem with an objective.")
    if direction not in ("max", "min"):
        raise ValueError("Direction must be max or min, found '" + str(direction) + "'.")
    return _solve(p, direction)
