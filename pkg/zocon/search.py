"""Depth-first branching instrumented with node and backtrack counts.

A backtrack is counted for every opened node below the root whose subtree
produces no solution. Children rejected by the prune test are logged but
never opened.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import pandas as pd

from .config import config
from .core import PartialAssignment, var_name
from .liftproject import Mode, disjunctive_cuts, sequentialize_through
from .lp import LpProblem, LpStatus, lp_feasible, lp_optimize
from .oracle import (
    Property,
    RhsPolicy,
    check,
    parent_width,
    dependency_width,
    random_system,
)
from .util import rat_str

logger = logging.getLogger(__name__)


class Prune(Enum):
    ROWS = "rows"
    LP = "lp"
    NONE = "none"


class ValueOrder(Enum):
    ZERO_FIRST = "zero-first"
    ONE_FIRST = "one-first"
    LP_GUIDED = "lp-guided"


@dataclass(frozen=True)
class Strategy:
    """Branching order, prune test and value order.

    :param order: permutation of 1..n, natural order when None.
    :type order: tuple
    :param prune: test a child must pass to be opened.
    :type prune: Prune
    :param value_order: which value of the branching variable comes first.
    :type value_order: ValueOrder"""

    order: tuple = None
    prune: Prune = Prune.ROWS
    value_order: ValueOrder = None

    def __post_init__(self):
        if self.value_order is None:
            object.__setattr__(self, "value_order", ValueOrder(config["search"]["value_order"]))

    def order_for(self, S):
        order = tuple(range(1, S.n + 1)) if self.order is None else tuple(self.order)
        if sorted(order) != list(range(1, S.n + 1)):
            raise ValueError("Order " + str(order) + " is not a permutation of 1.." + str(S.n) + ".")
        return order


@dataclass
class SearchTrace:
    """Counts and per-node log of one search."""

    nodes: int = 0
    backtracks: int = 0
    solution: tuple = None
    objective_value: Fraction = None
    cuts: list = field(default_factory=list)
    log: list = field(default_factory=list)

    def record(self, depth, assignment, reason, value=None):
        self.log.append(
            {"depth": depth, "assignment": str(assignment), "reason": reason, "value": value}
        )

    def to_frame(self):
        return pd.DataFrame(self.log, columns=["depth", "assignment", "reason", "value"])

    def to_dict(self):
        return {
            "nodes": self.nodes,
            "backtracks": self.backtracks,
            "solution": None if self.solution is None else list(self.solution),
            "objective_value": self.objective_value,
            "cuts": [str(cut) for cut in self.cuts],
            "log": self.log,
        }


def _prune_reason(S, a, prune):
    if prune is Prune.ROWS and S.violates_bound_rows(a):
        return "rows"
    if prune is Prune.LP and not lp_feasible(LpProblem.from_system(S, fixings=a)).feasible:
        return "lp"
    return None


def _values(S, a, var, value_order):
    if value_order is ValueOrder.ONE_FIRST:
        return (1, 0)
    if value_order is ValueOrder.LP_GUIDED:
        outcome = lp_feasible(LpProblem.from_system(S, fixings=a))
        if outcome.feasible and outcome.witness[var] >= Fraction(1, 2):
            return (1, 0)
    return (0, 1)


def _point(S, a):
    return tuple(a.get(var) for var in range(1, S.n + 1))


def feasibility_search(S, strat):
    """Depth-first search for a 0-1 point of ``S``.

    :param S: the system.
    :type S: BinarySystem
    :param strat: order, prune test and value order.
    :type strat: Strategy
    :returns: SearchTrace"""
    order = strat.order_for(S)
    trace = SearchTrace(nodes=1)
    trace.record(0, PartialAssignment(), "root")

    def visit(a, depth):
        if depth == S.n:
            point = _point(S, a)
            if S.satisfied_by(point):
                trace.solution = point
                return True
            trace.record(depth, a, "leaf fails")
            return False
        var = order[depth]
        for value in _values(S, a, var, strat.value_order):
            child = a.extended(var, value)
            reason = _prune_reason(S, child, strat.prune)
            if reason is not None:
                trace.record(depth + 1, child, reason)
                continue
            trace.nodes += 1
            trace.record(depth + 1, child, "open")
            if visit(child, depth + 1):
                return True
            trace.backtracks += 1
            logger.debug("backtrack from {child}".format(child=child))
        return False

    visit(PartialAssignment(), 0)
    logger.debug(
        "search opened {nodes} nodes with {backtracks} backtracks".format(
            nodes=trace.nodes, backtracks=trace.backtracks
        )
    )
    return trace


def _most_fractional(witness, n):
    best = None
    for var in range(1, n + 1):
        value = witness[var]
        if value.denominator == 1:
            continue
        distance = min(value, 1 - value)
        if best is None or distance > best[0]:
            best = (distance, var)
    return None if best is None else best[1]


def branch_and_bound(S, objective, root_cut_variables=(), strat=None):
    """Depth-first branch and bound with disjunctive cuts at the root.

    The root LP is solved once; for each variable in ``root_cut_variables`` the
    disjunctive cuts violated by that optimum are added, then the root is
    solved again. Nodes branch on the most fractional variable (smallest index
    on ties) and are closed when their LP is infeasible, integral or no better
    than the incumbent. Every LP solve counts as a node, except that with a
    ``strat.prune`` of ``LP`` infeasible children are skipped uncounted and with
    ``ROWS`` children violating a fully bound row are skipped uncounted.

    :param objective: the objective.
    :type objective: Objective
    :param root_cut_variables: lift variables for root cuts.
    :type root_cut_variables: list of int
    :param strat: value order and prune test, opening every child when None.
    :type strat: Strategy
    :returns: SearchTrace"""
    strat = strat if strat is not None else Strategy(prune=Prune.NONE)
    if any(var > S.n for var in objective.variables):
        raise ValueError("Objective uses variables beyond x" + str(S.n) + ".")
    trace = SearchTrace()
    incumbent = {"value": None}

    def solve(system, a):
        problem = LpProblem.from_system(system, fixings=a, objective=objective.as_dict())
        return lp_optimize(problem, objective.sense)

    root = solve(S, PartialAssignment())
    if root.status is LpStatus.OPTIMAL and root_cut_variables:
        target = [root.witness[var] for var in range(1, S.n + 1)]
        cuts = []
        for k in root_cut_variables:
            cuts.extend(disjunctive_cuts(S, k, target))
        trace.cuts = cuts
        S = S.augmented(cuts)
        logger.info("{count} root cuts added".format(count=len(cuts)))
        root = solve(S, PartialAssignment())

    def node(a, depth, outcome):
        trace.nodes += 1
        if outcome.status is LpStatus.INFEASIBLE:
            trace.record(depth, a, "infeasible")
            return
        value = outcome.value
        if incumbent["value"] is not None and not objective.better(value, incumbent["value"]):
            trace.record(depth, a, "bound", rat_str(value))
            return
        var = _most_fractional(outcome.witness, S.n)
        if var is None:
            point = tuple(int(outcome.witness[j]) for j in range(1, S.n + 1))
            if not S.satisfied_by(point):
                raise ValueError("Integral LP optimum violates the system.")
            incumbent["value"] = value
            trace.solution = point
            trace.objective_value = value
            trace.record(depth, a, "integral", rat_str(value))
            return
        trace.record(depth, a, "branch " + var_name(var), rat_str(value))
        if strat.value_order is ValueOrder.LP_GUIDED:
            values = (1, 0) if outcome.witness[var] >= Fraction(1, 2) else (0, 1)
        else:
            values = (1, 0) if strat.value_order is ValueOrder.ONE_FIRST else (0, 1)
        for v in values:
            child = a.extended(var, v)
            if strat.prune is Prune.ROWS and S.violates_bound_rows(child):
                trace.record(depth + 1, child, "rows")
                continue
            result = solve(S, child)
            if strat.prune is Prune.LP and result.status is LpStatus.INFEASIBLE:
                trace.record(depth + 1, child, "lp")
                continue
            node(child, depth + 1, result)

    node(PartialAssignment(), 0, root)
    logger.debug("branch and bound used {nodes} nodes".format(nodes=trace.nodes))
    return trace


def _instance_row(S):
    return [str(row) for row in S.rows]


def no_backtrack_theorem_suite(seed_count, seed=0, max_vars=4, coeff_range=4):
    """Check the backtrack-free guarantees on seeded random feasible instances.

    (a) strong k-consistency with a :func:`parent_width` below k (fewer than k
    earlier neighbours per variable), (b) sequential j-consistency for every j,
    and (c) the system augmented by :func:`sequentialize_through` each give a
    search without backtracks. The premise of (a) is the parent width alone;
    :func:`dependency_width`, the out-degree toward later variables, is only
    reported alongside a counterexample as a diagnostic.

    :returns: dict with counts of instances meeting each premise and the
        counterexamples found"""
    summary = {"instances": 0, "premise_a": 0, "premise_b": 0, "premise_c": 0, "violations": []}
    for offset in range(seed_count):
        instance_seed = seed + offset
        n = 1 + instance_seed % max_vars
        m = 1 + (instance_seed // max_vars) % 3
        S = random_system(n, m, coeff_range, RhsPolicy.FEASIBLE, seed=instance_seed)
        summary["instances"] += 1
        rows_search = feasibility_search(
            S, Strategy(prune=Prune.ROWS, value_order=ValueOrder.ZERO_FIRST)
        )
        width = parent_width(S)
        for k in range(1, n + 1):
            if width < k and check(S, Property.STRONG_K, k).verdict:
                summary["premise_a"] += 1
                if rows_search.backtracks:
                    summary["violations"].append(
                        {
                            "part": "a",
                            "seed": instance_seed,
                            "k": k,
                            "out_width": dependency_width(S),
                            "rows": _instance_row(S),
                        }
                    )
                break
        if all(check(S, Property.SEQ_K, j).verdict for j in range(1, n + 1)):
            summary["premise_b"] += 1
            if rows_search.backtracks:
                summary["violations"].append(
                    {"part": "b", "seed": instance_seed, "rows": _instance_row(S)}
                )
        augmented = sequentialize_through(S, n, Mode.PREFIX)
        lp_search = feasibility_search(
            augmented, Strategy(prune=Prune.LP, value_order=ValueOrder.ZERO_FIRST)
        )
        reached = all(check(augmented, Property.SEQ_LP_K, k).verdict for k in range(1, n + 1))
        if reached:
            summary["premise_c"] += 1
        if lp_search.backtracks or not reached:
            summary["violations"].append(
                {
                    "part": "c",
                    "seed": instance_seed,
                    "sequential_lp": reached,
                    "backtracks": lp_search.backtracks,
                    "rows": _instance_row(augmented),
                }
            )
    logger.info(
        "no-backtrack suite: {count} instances, {bad} violations".format(
            count=summary["instances"], bad=len(summary["violations"])
        )
    )
    return summary
