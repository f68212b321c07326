"""Reconciliation of the two-variable worked example.

The example appears in three printed forms. Every claim made about it is
evaluated on each form; the corrected system must satisfy all of them and
each printed variant must fail at least one.
"""
import logging
from fractions import Fraction

import pandas as pd

from .core import BinarySystem, Clause, LinIneq, Objective, PartialAssignment
from .liftproject import Mode, disjunctive_cuts, fm_project, lift, sequentialize
from .lp import LpProblem, LpStatus, lp_optimize
from .oracle import Property, Relaxation, check, consistent_with, lp_consistent
from .resolution import clausal_core
from .search import Prune, Strategy, ValueOrder, branch_and_bound

logger = logging.getLogger(__name__)

CORRECTED = BinarySystem(2, (LinIneq({1: 2, 2: 4}, 1), LinIneq({1: 2, 2: -4}, -3)))

PRINTED_VARIANTS = {
    "rhs -1": BinarySystem(2, (LinIneq({1: 2, 2: 4}, -1), LinIneq({1: 2, 2: -4}, -3))),
    "coefficient -2": BinarySystem(2, (LinIneq({1: -2, 2: 4}, 1), LinIneq({1: 2, 2: -4}, -3))),
}

OBJECTIVE = Objective("max", {1: -1, 2: 3})

HALF = Fraction(1, 2)


def _optimum(S, fixings=None):
    problem = LpProblem.from_system(
        S, fixings=PartialAssignment(fixings or {}), objective=OBJECTIVE.as_dict()
    )
    outcome = lp_optimize(problem, "max")
    if outcome.status is not LpStatus.OPTIMAL:
        return None
    return (outcome.witness[1], outcome.witness[2])


def _interval(projected):
    bounds = []
    for direction in ("min", "max"):
        outcome = lp_optimize(
            LpProblem(projected.rows, projected.num_vars, bounds={
                var: (None, None) for var in range(1, projected.num_vars + 1)
            }, objective={1: 1}),
            direction,
        )
        if outcome.status is not LpStatus.OPTIMAL:
            return None
        bounds.append(outcome.value)
    return tuple(bounds)


def _root_cuts(S, k):
    root = _optimum(S)
    return [cut.canonical() for cut in disjunctive_cuts(S, k, root)]


def _x2_separates_nothing(S):
    return _root_cuts(S, 2) == [] and not lp_consistent(
        sequentialize(S, 2, Mode.PREFIX), PartialAssignment({1: 0})
    )


def _after_cut(S):
    return _optimum(S.augmented(_root_cuts(S, 1)))


def _bnb(S, cuts, prune):
    strat = Strategy(prune=prune, value_order=ValueOrder.ZERO_FIRST)
    trace = branch_and_bound(S, OBJECTIVE, cuts, strat)
    return trace.nodes, trace.solution


CLAIMS = [
    ("x1=0 is LP-consistent", lambda S: lp_consistent(S, PartialAssignment({1: 0}))),
    ("(0,0) is LP-inconsistent", lambda S: not lp_consistent(S, PartialAssignment({1: 0, 2: 0}))),
    ("(0,1) is LP-inconsistent", lambda S: not lp_consistent(S, PartialAssignment({1: 0, 2: 1}))),
    (
        "x1=0 is inconsistent",
        lambda S: not consistent_with(S, PartialAssignment({1: 0}), Relaxation.EXACT),
    ),
    ("not sequentially LP 2-consistent", lambda S: not check(S, Property.SEQ_LP_K, 2).verdict),
    (
        "clausal core is {x1 | x2, x1 | ~x2}",
        lambda S: set(clausal_core(S)) == {Clause.parse("x1 x2"), Clause.parse("x1 ~x2")},
    ),
    (
        "adding x1 + x2 >= 1 gives LP-consistency",
        lambda S: check(S.augmented([LinIneq({1: 1, 2: 1}, 1)]), Property.LP).verdict,
    ),
    (
        "R_2 projected onto x1 is [1/2, 1]",
        lambda S: _interval(fm_project(lift(S, 2), [1])) == (HALF, 1),
    ),
    ("root optimum is (1/2, 1)", lambda S: _optimum(S) == (HALF, 1)),
    (
        "only root cut on x1 is x1 - 4 x2 >= -3",
        lambda S: _root_cuts(S, 1) == [LinIneq({1: 1, 2: -4}, -3)],
    ),
    ("x2 disjunction cuts nothing at the root but excludes x1=0", _x2_separates_nothing),
    ("optimum after the cut is (0, 3/4)", lambda S: _after_cut(S) == (0, Fraction(3, 4))),
    ("x2=0 branch optimum is (1/2, 0)", lambda S: _optimum(S, {2: 0}) == (HALF, 0)),
    ("x2=1 branch optimum is (1, 1)", lambda S: _optimum(S, {2: 1}) == (1, 1)),
    (
        "branch and cut with root cuts on x1, x2 uses 5 nodes",
        lambda S: _bnb(S, [1, 2], Prune.NONE) == (5, (1, 1)),
    ),
    (
        "after sequentializing on x2 the search uses 2 nodes",
        lambda S: _bnb(sequentialize(S, 2, Mode.PREFIX), [], Prune.LP) == (2, (1, 1)),
    ),
]


def evaluate(S):
    """Truth of every claim on ``S``; a claim whose premise breaks counts as false."""
    results = {}
    for name, claim in CLAIMS:
        try:
            results[name] = bool(claim(S))
        except (ValueError, TypeError) as err:
            logger.debug("claim '{name}' raised {err}".format(name=name, err=err))
            results[name] = False
    return results


def reconcile():
    """Evaluate all claims on the corrected system and the printed variants.

    :returns: (passed, DataFrame of claims by system)"""
    systems = {"corrected": CORRECTED}
    systems.update(PRINTED_VARIANTS)
    table = pd.DataFrame({name: evaluate(S) for name, S in systems.items()})
    table.index.name = "claim"
    passed = bool(table["corrected"].all()) and all(
        not table[name].all() for name in PRINTED_VARIANTS
    )
    logger.info("errata gate {state}".format(state="passed" if passed else "failed"))
    return passed, table
