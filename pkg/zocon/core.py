"""Exact 0-1 models: inequalities, systems, clauses and partial assignments.

Variables are numbered from 1. Every inequality is kept in the ``>=`` sense,
``<=`` rows are negated when they are read and equalities become two rows.
The box ``0 <= x_j <= 1`` is never stored with the rows of a system, it is
materialized by :meth:`BinarySystem.box_rows` when a certificate needs it.
"""
import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .util import to_rat, rat_str, primitive_scale

logger = logging.getLogger(__name__)

Rat = Fraction


class UnsatisfiableClauseError(ValueError):
    """The empty clause has no inequality form."""


class UnassignedVariableError(KeyError, ValueError):
    """An inequality was evaluated at a point that does not bind all its variables."""


def var_name(var, names=None):
    """Name of a variable in reports, ``x<j>`` unless a name map is given."""
    if names is not None and var in names:
        return names[var]
    return "x{var}".format(var=var)


def _as_pairs(items):
    if isinstance(items, dict):
        return items.items()
    return items


@dataclass(frozen=True)
class LinIneq:
    """A linear inequality ``sum coefs[j] x_j >= rhs``.

    :param coefs: variable index to coefficient, either a dict or pairs.
    :type coefs: dict or iterable
    :param rhs: the right hand side.
    :type rhs: Fraction, int or "p/q" string
    :param text: source text of the row, kept for reports only."""

    coefs: tuple = ()
    rhs: Fraction = Fraction(0)
    text: str = field(default=None, compare=False)

    def __post_init__(self):
        cleaned = {}
        for var, value in _as_pairs(self.coefs):
            if not isinstance(var, int) or isinstance(var, bool) or var < 1:
                raise ValueError(
                    "Variable indices must be positive integers, found " + repr(var) + "."
                )
            cleaned[var] = cleaned.get(var, Fraction(0)) + to_rat(value)
        object.__setattr__(
            self,
            "coefs",
            tuple(sorted((var, value) for var, value in cleaned.items() if value != 0)),
        )
        object.__setattr__(self, "rhs", to_rat(self.rhs))

    @property
    def variables(self):
        return frozenset(var for var, _ in self.coefs)

    def as_dict(self):
        return dict(self.coefs)

    def coef(self, var):
        for other, value in self.coefs:
            if other == var:
                return value
        return Fraction(0)

    def lhs(self, point):
        """Exact value of the left hand side at a point.

        :param point: variable index to value.
        :type point: dict"""
        total = Fraction(0)
        for var, value in self.coefs:
            if var not in point:
                raise UnassignedVariableError(
                    "Variable " + var_name(var) + " of '" + str(self) + "' is not assigned."
                )
            total += value * point[var]
        return total

    def satisfied_by(self, point):
        return self.lhs(point) >= self.rhs

    def scaled(self, factor):
        """Multiply both sides by a positive factor."""
        factor = to_rat(factor)
        if factor <= 0:
            raise ValueError("Scaling factor must be positive, found " + rat_str(factor) + ".")
        return LinIneq(
            tuple((var, value * factor) for var, value in self.coefs), self.rhs * factor
        )

    def canonical(self):
        """Positive multiple whose coefficients are coprime integers.

        Rows without variables become ``0 >= 1``, ``0 >= 0`` or ``0 >= -1``."""
        if not self.coefs:
            sign = (self.rhs > 0) - (self.rhs < 0)
            return LinIneq((), sign)
        return self.scaled(primitive_scale(value for _, value in self.coefs))

    def is_trivial(self):
        return not self.coefs and self.rhs <= 0

    def is_contradiction(self):
        return not self.coefs and self.rhs > 0

    def clause(self):
        """The clause this inequality represents, or None when it is not clausal."""
        if not self.coefs or any(abs(value) != 1 for _, value in self.coefs):
            return None
        neg = frozenset(var for var, value in self.coefs if value < 0)
        pos = frozenset(var for var, value in self.coefs if value > 0)
        if self.rhs != 1 - len(neg):
            return None
        return Clause(pos, neg)

    def format(self, names=None):
        terms = []
        for var, value in self.coefs:
            name = var_name(var, names)
            magnitude = abs(value)
            body = name if magnitude == 1 else rat_str(magnitude) + " " + name
            if not terms:
                terms.append(body if value > 0 else "-" + body)
            else:
                terms.append(("+ " if value > 0 else "- ") + body)
        if not terms:
            terms.append("0")
        return " ".join(terms) + " >= " + rat_str(self.rhs)

    def __str__(self):
        return self.format()


def combine(rows, multipliers):
    """Nonnegative combination ``sum u_i row_i`` of inequalities.

    :param rows: the inequalities.
    :type rows: list of LinIneq
    :param multipliers: one multiplier per row.
    :type multipliers: list of Fraction"""
    coefs = {}
    rhs = Fraction(0)
    for row, mult in zip(rows, multipliers):
        mult = to_rat(mult)
        if mult == 0:
            continue
        if mult < 0:
            raise ValueError("Multipliers must be nonnegative, found " + rat_str(mult) + ".")
        for var, value in row.coefs:
            coefs[var] = coefs.get(var, Fraction(0)) + mult * value
        rhs += mult * row.rhs
    return LinIneq(coefs, rhs)


@dataclass(frozen=True)
class Clause:
    """A disjunction of literals: ``x_j`` for j in pos, ``not x_j`` for j in neg.

    The clause with no literals is the empty clause and stands for infeasibility."""

    pos: frozenset = frozenset()
    neg: frozenset = frozenset()

    def __post_init__(self):
        pos = frozenset(self.pos)
        neg = frozenset(self.neg)
        for var in pos | neg:
            if not isinstance(var, int) or var < 1:
                raise ValueError(
                    "Clause variables must be positive integers, found " + repr(var) + "."
                )
        if pos & neg:
            raise ValueError(
                "Variables "
                + ", ".join(var_name(var) for var in sorted(pos & neg))
                + " occur with both signs in a clause."
            )
        object.__setattr__(self, "pos", pos)
        object.__setattr__(self, "neg", neg)

    @classmethod
    def from_literals(cls, literals):
        """Build from signed indices, ``-j`` meaning ``not x_j``."""
        literals = list(literals)
        return cls(
            frozenset(lit for lit in literals if lit > 0),
            frozenset(-lit for lit in literals if lit < 0),
        )

    @classmethod
    def parse(cls, text):
        """Parse literals such as ``"x1 ~x3"``, ``"x1, -x3"`` or ``"x1 | !x3"``."""
        literals = []
        for token in re.split(r"[\s,|]+|\bv\b|∨", text.strip()):
            if not token:
                continue
            match = re.fullmatch(r"([~!\-¬]?)x(\d+)", token)
            if match is None:
                raise ValueError("Malformed literal '" + token + "' in clause '" + text + "'.")
            var = int(match.group(2))
            literals.append(-var if match.group(1) else var)
        return cls.from_literals(literals)

    @property
    def variables(self):
        return self.pos | self.neg

    @property
    def literals(self):
        return tuple(
            sorted(list(self.pos) + [-var for var in self.neg], key=lambda lit: (abs(lit), lit < 0))
        )

    def is_empty(self):
        return not self.pos and not self.neg

    def __len__(self):
        return len(self.pos) + len(self.neg)

    def absorbs(self, other):
        """True when every literal of this clause is a literal of ``other``."""
        return self.pos <= other.pos and self.neg <= other.neg

    def falsifying_assignment(self):
        return PartialAssignment(
            [(var, 0) for var in self.pos] + [(var, 1) for var in self.neg]
        )

    def satisfied_by(self, point):
        return any(point[var] == 1 for var in self.pos) or any(
            point[var] == 0 for var in self.neg
        )

    def sort_key(self):
        return (len(self), tuple((abs(lit), lit < 0) for lit in self.literals))

    def __str__(self):
        if self.is_empty():
            return "[]"
        return " | ".join(
            var_name(lit) if lit > 0 else "~" + var_name(-lit) for lit in self.literals
        )


EMPTY_CLAUSE = Clause()


@dataclass(frozen=True)
class PartialAssignment:
    """Values in {0,1} fixed for some of the variables, ``x_J = v_J``."""

    bindings: tuple = ()

    def __post_init__(self):
        cleaned = {}
        for var, value in _as_pairs(self.bindings):
            if not isinstance(var, int) or var < 1:
                raise ValueError(
                    "Assignment variables must be positive integers, found " + repr(var) + "."
                )
            if value not in (0, 1):
                raise ValueError(
                    "Variable "
                    + var_name(var)
                    + " can only take the values 0 and 1, found "
                    + repr(value)
                    + "."
                )
            if var in cleaned and cleaned[var] != value:
                raise ValueError("Variable " + var_name(var) + " is assigned twice.")
            cleaned[var] = int(value)
        object.__setattr__(self, "bindings", tuple(sorted(cleaned.items())))

    @classmethod
    def parse(cls, text):
        """Parse ``"x1=0,x3=0"``; the empty string is the empty assignment."""
        pairs = []
        for token in re.split(r"[\s,]+", text.strip()):
            if not token:
                continue
            match = re.fullmatch(r"x(\d+)=([01])", token)
            if match is None:
                raise ValueError("Malformed binding '" + token + "' in '" + text + "'.")
            pairs.append((int(match.group(1)), int(match.group(2))))
        return cls(pairs)

    @property
    def variables(self):
        return tuple(var for var, _ in self.bindings)

    def as_dict(self):
        return dict(self.bindings)

    def get(self, var, default=None):
        return self.as_dict().get(var, default)

    def __contains__(self, var):
        return var in self.variables

    def __len__(self):
        return len(self.bindings)

    def extended(self, var, value):
        bindings = self.as_dict()
        bindings[var] = value
        return PartialAssignment(bindings)

    def restricted(self, variables):
        variables = set(variables)
        return PartialAssignment([(var, value) for var, value in self.bindings if var in variables])

    def agrees_with(self, point):
        """True when a full point (tuple of values for x1..xn) extends this assignment."""
        return all(point[var - 1] == value for var, value in self.bindings)

    def falsified_clause(self):
        """The clause over the assigned variables that this assignment falsifies."""
        return Clause(
            frozenset(var for var, value in self.bindings if value == 0),
            frozenset(var for var, value in self.bindings if value == 1),
        )

    def sort_key(self):
        return (len(self), self.variables, tuple(value for _, value in self.bindings))

    def __str__(self):
        return ",".join(
            "{name}={value}".format(name=var_name(var), value=value) for var, value in self.bindings
        )


@dataclass(frozen=True)
class Objective:
    """Linear objective ``sense sum coefs[j] x_j`` with sense ``max`` or ``min``."""

    sense: str = "max"
    coefs: tuple = ()

    def __post_init__(self):
        if self.sense not in ("max", "min"):
            raise ValueError("Objective sense must be max or min, found '" + str(self.sense) + "'.")
        row = LinIneq(self.coefs, 0)
        object.__setattr__(self, "coefs", row.coefs)

    @property
    def variables(self):
        return frozenset(var for var, _ in self.coefs)

    def as_dict(self):
        return dict(self.coefs)

    def value(self, point):
        return LinIneq(self.coefs, 0).lhs(point)

    def better(self, first, second):
        """True when objective value ``first`` strictly improves on ``second``."""
        if second is None:
            return True
        return first > second if self.sense == "max" else first < second

    def __str__(self):
        text = LinIneq(self.coefs, 0).format()
        return self.sense + " " + text[: -len(" >= 0")]


@dataclass(frozen=True)
class BinarySystem:
    """A 0-1 system ``S``: ``n`` binary variables and an ordered tuple of rows.

    :param n: number of variables.
    :type n: int
    :param rows: the inequalities, in a stable order.
    :type rows: tuple of LinIneq"""

    n: int
    rows: tuple = ()

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("Variable count must be nonnegative, found " + str(self.n) + ".")
        rows = tuple(self.rows)
        for row in rows:
            for var in row.variables:
                if var > self.n:
                    raise ValueError(
                        "Row '"
                        + str(row)
                        + "' uses "
                        + var_name(var)
                        + " but the system only has "
                        + str(self.n)
                        + " variables."
                    )
        object.__setattr__(self, "rows", rows)

    def box_rows(self):
        """``x_j >= 0`` for every j, then ``-x_j >= -1`` for every j."""
        return [LinIneq({var: 1}, 0) for var in range(1, self.n + 1)] + [
            LinIneq({var: -1}, -1) for var in range(1, self.n + 1)
        ]

    def lp_rows(self):
        """Rows of ``S_LP`` with the box made explicit."""
        return list(self.rows) + self.box_rows()

    def restricted(self, variables):
        """``S_J``: the rows whose variables all lie in J."""
        variables = frozenset(variables)
        return BinarySystem(self.n, tuple(row for row in self.rows if row.variables <= variables))

    def augmented(self, rows):
        """Append rows, skipping those whose canonical form is already present."""
        seen = {row.canonical() for row in self.rows}
        extra = []
        for row in rows:
            key = row.canonical()
            if key not in seen:
                seen.add(key)
                extra.append(row)
        return BinarySystem(self.n, self.rows + tuple(extra))

    def satisfied_by(self, point):
        """True when a full 0-1 point (tuple for x1..xn) satisfies every row."""
        return all(evaluate(row, point) for row in self.rows)

    def violates_bound_rows(self, assignment):
        """True when some row whose variables are all bound by ``assignment`` fails."""
        values = assignment.as_dict()
        for row in self.rows:
            if row.variables <= values.keys() and not row.satisfied_by(values):
                return True
        return False

    def to_text(self, objective=None):
        lines = ["vars {n}".format(n=self.n)]
        lines.extend(str(row) for row in self.rows)
        if objective is not None:
            lines.append(str(objective))
        return "\n".join(lines) + "\n"


def clause_to_inequality(c):
    """``sum_{pos} x_j - sum_{neg} x_j >= 1 - |neg|`` for a nonempty clause.

    :param c: the clause.
    :type c: Clause"""
    if c.is_empty():
        raise UnsatisfiableClauseError("The empty clause is unsatisfiable and has no inequality.")
    coefs = {var: 1 for var in c.pos}
    coefs.update({var: -1 for var in c.neg})
    return LinIneq(coefs, 1 - len(c.neg))


def inequality_implies_clause(a, c, n):
    """True when every 0-1 point satisfying ``a`` satisfies ``c``.

    The falsifying assignment of ``c`` is fixed and the left side of ``a`` is
    maximized over the remaining variables; ``a`` implies ``c`` exactly when
    that maximum falls short of the right side."""
    if any(var > n for var in c.variables):
        raise ValueError("Clause '" + str(c) + "' uses variables beyond x" + str(n) + ".")
    fixed = c.falsifying_assignment().as_dict()
    best = Fraction(0)
    for var, value in a.coefs:
        if var in fixed:
            best += value * fixed[var]
        elif value > 0:
            best += value
    return best < a.rhs


def evaluate(a, p):
    """True when the full point ``p`` satisfies ``a`` exactly.

    :param p: values of x1..xn as a sequence, or a dict from index to value.
    :type p: tuple or dict"""
    if not isinstance(p, dict):
        p = {var: value for var, value in enumerate(p, start=1)}
    return a.satisfied_by(p)
