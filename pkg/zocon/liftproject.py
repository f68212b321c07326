"""Lift-and-project: products with ``x_k`` and ``1 - x_k``, linearized, then projected.

Lifted systems number the product variables after the x variables:
``y_{i,k}`` for the i-th partner of k (partners in increasing order) is
variable ``n + position``.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import combinations

from .config import config
from .core import BinarySystem, LinIneq, combine, var_name
from .lp import LpProblem, LpStatus, lp_feasible, lp_optimize
from .oracle import enumerate_feasible
from .util import primitive_scale, to_rat

logger = logging.getLogger(__name__)


class FourierMotzkinBlowupError(ValueError):
    """Elimination produced more rows than the configured limit."""


class Mode(Enum):
    PREFIX = "prefix"
    AUX_ONLY = "aux-only"


def _bound_rows(num_vars):
    return [LinIneq({var: 1}, 0) for var in range(1, num_vars + 1)] + [
        LinIneq({var: -1}, -1) for var in range(1, num_vars + 1)
    ]


@dataclass(frozen=True)
class LiftedSystem:
    """``R_k(S_LP)`` over the x variables and the products ``y_{i,k}``.

    :param x_count: number of x variables n.
    :type x_count: int
    :param k: the lift variable.
    :type k: int
    :param aux: pairs (i, k) in the order of their variable numbers.
    :type aux: tuple
    :param rows: the ``x_k`` family followed by the ``1 - x_k`` family."""

    x_count: int
    k: int
    aux: tuple
    rows: tuple

    @property
    def num_vars(self):
        return self.x_count + len(self.aux)

    def aux_var(self, i):
        """Variable number of ``y_{i,k}``."""
        for position, pair in enumerate(self.aux, start=1):
            if pair[0] == i:
                return self.x_count + position
        raise ValueError("No product variable pairs " + var_name(i) + " with " + var_name(self.k) + ".")

    @property
    def names(self):
        return {
            self.x_count + position: "y{i}_{k}".format(i=min(pair), k=max(pair))
            for position, pair in enumerate(self.aux, start=1)
        }

    def bound_rows(self):
        """``0 <= x, y <= 1`` as rows."""
        return _bound_rows(self.num_vars)

    def format_rows(self):
        return [row.format(self.names) for row in self.rows]


@dataclass(frozen=True)
class ProjectedSystem:
    """Rows over the kept variables with the combination of pool rows that produced each.

    ``pool`` is the lifted rows followed by the bound rows of every variable;
    ``provenance[r]`` maps pool positions to multipliers."""

    keep: tuple
    rows: tuple
    provenance: tuple
    pool: tuple
    num_vars: int
    names: dict = field(default_factory=dict, compare=False)

    def bound_rows(self):
        # Bounds of the kept variables already survive among the rows.
        return []

    def verify_provenance(self, source_rows=None):
        """True when every row is reproduced exactly by its multiplier trail."""
        source = list(self.pool if source_rows is None else source_rows)
        for row, trail in zip(self.rows, self.provenance):
            if any(m < 0 or index >= len(source) for index, m in trail.items()):
                return False
            mults = [trail.get(index, Fraction(0)) for index in range(len(source))]
            combined = combine(source, mults)
            if combined.coefs != row.coefs or combined.rhs != row.rhs:
                return False
        return True

    def contains(self, point):
        """Membership of a rational point given as variable to value."""
        return all(row.satisfied_by(point) for row in self.rows)

    def format_rows(self):
        return [row.format(self.names) for row in self.rows]


def lift(S, k):
    """Multiply each row of ``S_LP`` (box included) by ``x_k`` and ``1 - x_k`` and linearize.

    :param S: the system.
    :type S: BinarySystem
    :param k: the lift variable.
    :type k: int
    :returns: LiftedSystem with ``2 (m + 2n)`` rows"""
    if not 1 <= k <= S.n:
        raise ValueError("Lift variable must lie in 1.." + str(S.n) + ", found " + str(k) + ".")
    partners = [i for i in range(1, S.n + 1) if i != k]
    y = {i: S.n + position for position, i in enumerate(partners, start=1)}
    times_x = []
    times_complement = []
    for row in S.lp_rows():
        a = row.as_dict()
        b = row.rhs
        a_k = a.get(k, Fraction(0))
        # (a x - b) x_k >= 0 with x_k^2 = x_k and x_i x_k = y_ik
        coefs = {y[i]: value for i, value in a.items() if i != k}
        coefs[k] = a_k - b
        times_x.append(LinIneq(coefs, 0))
        # (a x - b)(1 - x_k) >= 0
        coefs = {i: value for i, value in a.items() if i != k}
        coefs.update({y[i]: -value for i, value in a.items() if i != k})
        coefs[k] = b
        times_complement.append(LinIneq(coefs, b))
    lifted = LiftedSystem(S.n, k, tuple((i, k) for i in partners), tuple(times_x + times_complement))
    logger.debug("lifted on {k}: {count} rows".format(k=var_name(k), count=len(lifted.rows)))
    return lifted


def _normalized(row, trail):
    # Scale to a primitive integer row; trivial rows return None.
    if not row.coefs:
        if row.rhs <= 0:
            return None
        factor = 1 / row.rhs
    else:
        factor = primitive_scale(value for _, value in row.coefs)
    return row.scaled(factor), {index: m * factor for index, m in trail.items()}


def _insert(table, row, trail):
    normal = _normalized(row, trail)
    if normal is None:
        return
    row, trail = normal
    current = table.get(row.coefs)
    if current is None or row.rhs > current[0].rhs:
        table[row.coefs] = (row, trail)


def _contradiction(table):
    return table.get(())


def _eliminate(table, var):
    positive = []
    negative = []
    result = {}
    for row, trail in table.values():
        value = row.coef(var)
        if value > 0:
            positive.append((row, trail))
        elif value < 0:
            negative.append((row, trail))
        else:
            _insert(result, row, trail)
    for p_row, p_trail in positive:
        for q_row, q_trail in negative:
            lam = -q_row.coef(var)
            mu = p_row.coef(var)
            trail = {index: lam * m for index, m in p_trail.items()}
            for index, m in q_trail.items():
                trail[index] = trail.get(index, Fraction(0)) + mu * m
            _insert(result, combine([p_row, q_row], [lam, mu]), trail)
    logger.debug(
        "eliminated {var}: {p}x{n} pairs, {count} rows".format(
            var=var_name(var), p=len(positive), n=len(negative), count=len(result)
        )
    )
    return result


def _free_problem(rows, num_vars, objective=None):
    return LpProblem(
        rows,
        num_vars,
        bounds={var: (None, None) for var in range(1, num_vars + 1)},
        objective=objective,
    )


def _prune_redundant(table, num_vars):
    entries = sorted(table.values(), key=lambda entry: (entry[0].coefs, entry[0].rhs))
    i = 0
    while i < len(entries):
        row = entries[i][0]
        others = [other for j, (other, _) in enumerate(entries) if j != i]
        outcome = lp_optimize(_free_problem(others, num_vars, row.as_dict()), "min")
        if outcome.status is LpStatus.INFEASIBLE:
            break
        if outcome.status is LpStatus.OPTIMAL and outcome.value >= row.rhs:
            del entries[i]
        else:
            i += 1
    return {row.coefs: (row, trail) for row, trail in entries}


def _occurrences(table, var):
    return sum(1 for row, _ in table.values() if row.coef(var) != 0)


def fm_project(L, keep, redundancy=None, row_limit=None):
    """Fourier-Motzkin projection of a lifted or projected system onto ``keep``.

    Product variables go first, then the discarded x variables; within each
    group the variable with the fewest occurrences is eliminated next (ties to
    the smallest index). Rows are kept primitive and only the largest right
    hand side per coefficient vector survives.

    :param L: the system to project.
    :type L: LiftedSystem or ProjectedSystem
    :param keep: variables to keep.
    :type keep: iterable of int
    :param redundancy: drop rows implied by the others after every elimination,
        defaults to ``fm.redundancy`` in the configuration.
    :type redundancy: bool
    :param row_limit: largest row count tolerated, defaults to ``fm.row_limit``.
    :type row_limit: int
    :returns: ProjectedSystem"""
    keep = tuple(sorted(set(keep)))
    if any(var < 1 or var > L.num_vars for var in keep):
        raise ValueError("Kept variables must lie in 1.." + str(L.num_vars) + ".")
    redundancy = config["fm"]["redundancy"] if redundancy is None else redundancy
    row_limit = config["fm"]["row_limit"] if row_limit is None else row_limit
    pool = tuple(L.rows) + tuple(L.bound_rows())
    names = {var: name for var, name in getattr(L, "names", {}).items() if var in keep}

    if not keep and lp_feasible(_free_problem(pool, L.num_vars)).feasible:
        return ProjectedSystem(keep, (), (), pool, L.num_vars, names)

    table = {}
    for index, row in enumerate(pool):
        _insert(table, row, {index: Fraction(1)})
    x_count = getattr(L, "x_count", L.num_vars)
    pending = [var for var in range(1, L.num_vars + 1) if var not in keep]
    while pending and _contradiction(table) is None:
        group = [var for var in pending if var > x_count] or pending
        var = min(group, key=lambda v: (_occurrences(table, v), v))
        pending.remove(var)
        table = _eliminate(table, var)
        if len(table) > row_limit:
            raise FourierMotzkinBlowupError(
                "Eliminating "
                + var_name(var)
                + " produced "
                + str(len(table))
                + " rows, the limit is "
                + str(row_limit)
                + "."
            )
        if redundancy and _contradiction(table) is None:
            table = _prune_redundant(table, L.num_vars)

    contradiction = _contradiction(table)
    if contradiction is not None:
        entries = [contradiction]
    else:
        entries = sorted(table.values(), key=lambda entry: (entry[0].coefs, entry[0].rhs))
    return ProjectedSystem(
        keep,
        tuple(row for row, _ in entries),
        tuple(trail for _, trail in entries),
        pool,
        L.num_vars,
        names,
    )


def _is_box_row(row):
    return len(row.coefs) == 1 and row.coefs[0][1] in (1, -1) and row.rhs == min(row.coefs[0][1], 0)


def _new_rows(projected):
    return [row for row in projected.rows if not row.is_trivial() and not _is_box_row(row)]


def sequentialize(S, k, mode=Mode.PREFIX, redundancy=True):
    """Augment ``S`` with the projection of ``R_k(S_LP)``.

    ``PREFIX`` projects onto ``x_1..x_{k-1}``, ``AUX_ONLY`` eliminates the
    products only and keeps every x variable, which describes the convex hull
    of the ``x_k`` disjunction and dominates the first mode.

    :returns: BinarySystem"""
    lifted = lift(S, k)
    keep = range(1, k) if mode is Mode.PREFIX else range(1, S.n + 1)
    projected = fm_project(lifted, keep, redundancy=redundancy)
    augmented = S.augmented(_new_rows(projected))
    logger.info(
        "sequentialized on {k} ({mode}): {count} rows added".format(
            k=var_name(k), mode=mode.value, count=len(augmented.rows) - len(S.rows)
        )
    )
    return augmented


def sequentialize_through(S, K, mode=Mode.PREFIX, descending=True):
    """Apply :func:`sequentialize` for every k up to K.

    Descending order (K first) only ever adds rows over variables that precede
    the levels already handled, so their sequential LP consistency survives
    the later steps. ``descending=False`` applies 1..K, each step on the
    system augmented by the previous one."""
    if not 0 <= K <= S.n:
        raise ValueError("Level must lie in 0.." + str(S.n) + ", found " + str(K) + ".")
    levels = range(K, 0, -1) if descending else range(1, K + 1)
    for k in levels:
        S = sequentialize(S, k, mode)
    return S


def _as_point(target, n):
    if isinstance(target, dict):
        point = {var: to_rat(value) for var, value in target.items()}
    else:
        point = {var: to_rat(value) for var, value in enumerate(target, start=1)}
    if sorted(point) != list(range(1, n + 1)):
        raise ValueError("Target point must give a value for each of x1..x" + str(n) + ".")
    return point


def disjunctive_cuts(S, k, target):
    """Facets of the ``x_k`` disjunction hull that cut off ``target``.

    :param target: values of x1..xn, as a sequence or a dict.
    :type target: tuple or dict
    :returns: list of LinIneq"""
    point = _as_point(target, S.n)
    if any(value < 0 or value > 1 for value in point.values()) or not all(
        row.satisfied_by(point) for row in S.rows
    ):
        raise ValueError("Target point does not satisfy the LP relaxation.")
    hull = fm_project(lift(S, k), range(1, S.n + 1), redundancy=True)
    cuts = [row for row in hull.rows if not row.satisfied_by(point)]
    logger.debug(
        "{count} disjunctive cuts on {k}".format(count=len(cuts), k=var_name(k))
    )
    return cuts


def _reduce(matrix, width):
    # Reduced row echelon form over the rationals: (nonzero rows, pivot columns).
    rows = [[Fraction(value) for value in row] for row in matrix]
    pivots = []
    rank = 0
    for col in range(width):
        pivot = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        lead = rows[rank][col]
        rows[rank] = [value / lead for value in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col] != 0:
                factor = rows[i][col]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[rank])]
        pivots.append(col)
        rank += 1
    return rows[:rank], pivots


def _null_space(matrix, width):
    rows, pivots = _reduce(matrix, width)
    basis = []
    for free in range(width):
        if free in pivots:
            continue
        vector = [Fraction(0)] * width
        vector[free] = Fraction(1)
        for row, col in zip(rows, pivots):
            vector[col] = -row[free]
        basis.append(vector)
    return basis


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _row(normal, rhs):
    return LinIneq(
        {var: value for var, value in enumerate(normal, start=1)}, rhs
    ).canonical()


def integer_hull(S, cap=None):
    """Rows describing ``conv(D(S))``, computed from the enumerated points.

    The affine hull of the points gives pairs of opposite rows; inside it a
    facet is a hyperplane through ``d`` affinely independent points (``d``
    the dimension of the hull) with every point on one side. An empty
    ``D(S)`` gives the single row ``0 >= 1``.

    :param cap: enumeration cap, defaults to the configured one.
    :returns: BinarySystem"""
    points = sorted(enumerate_feasible(S, cap).points)
    if not points:
        logger.debug("integer hull of an empty system")
        return BinarySystem(S.n, (LinIneq((), 1),))
    origin = points[0]
    spanning, _ = _reduce(
        [[p - o for p, o in zip(point, origin)] for point in points[1:]], S.n
    )
    rows = []
    for normal in _null_space(spanning, S.n):
        rhs = _dot(normal, origin)
        rows.append(_row(normal, rhs))
        rows.append(_row([-value for value in normal], -rhs))
    dimension = len(spanning)
    if dimension:
        for chosen in combinations(points, dimension):
            first = chosen[0]
            equations = [
                [_dot(basis, [q - f for q, f in zip(other, first)]) for basis in spanning]
                for other in chosen[1:]
            ]
            solutions = _null_space(equations, dimension)
            if len(solutions) != 1:
                continue
            normal = [
                sum(c * basis[j] for c, basis in zip(solutions[0], spanning)) for j in range(S.n)
            ]
            rhs = _dot(normal, first)
            values = [_dot(normal, point) for point in points]
            if all(value >= rhs for value in values):
                rows.append(_row(normal, rhs))
            elif all(value <= rhs for value in values):
                rows.append(_row([-value for value in normal], -rhs))
    hull = BinarySystem(S.n, ()).augmented(
        [row for row in rows if not row.is_trivial() and not _is_box_row(row)]
    )
    logger.debug(
        "integer hull of dimension {d}: {count} rows".format(d=dimension, count=len(hull.rows))
    )
    return hull


def sequential_convexification(S):
    """The aux-only hull step on x_1, x_2, ... x_n in turn.

    Describes the same polytope as :func:`integer_hull` but its row count
    grows quickly; meant for systems with two or three variables."""
    for k in range(1, S.n + 1):
        if not lp_feasible(LpProblem.from_system(S)).feasible:
            return BinarySystem(S.n, (LinIneq((), 1),))
        S = sequentialize(S, k, Mode.AUX_ONLY)
    return S
