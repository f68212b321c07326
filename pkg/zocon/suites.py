"""Seeded property suites behind ``zocon verify``.

Every suite draws its instances from a base seed so that a run can be
replayed exactly; a counterexample is reported with its seed and rows.
"""
import logging
from dataclasses import dataclass, field

import pandas as pd

from .config import config
from .cuts import (
    LpConsistentError,
    derive_cg_cut,
    is_cg_cut,
    lp_consistency_via_cg,
    prop5_discrepancy,
)
from .liftproject import Mode, integer_hull, sequentialize
from .lp import LpProblem, lp_feasible
from .oracle import (
    Property,
    RhsPolicy,
    check,
    consistent_by_projection,
    enumerate_feasible,
    lp_consistent,
    random_clause_system,
    random_system,
    partial_assignments,
    witness_is_genuine,
)
from .resolution import clausal_core, full_closure
from . import errata, search

logger = logging.getLogger(__name__)

SUITES = (
    "prop1",
    "prop4",
    "prop5",
    "prop-cc",
    "cor1",
    "prop6",
    "prop7",
    "prop10",
    "domain",
    "no-backtrack",
    "errata",
)


@dataclass
class SuiteReport:
    """Outcome of one suite run."""

    name: str
    seeds: int
    seed: int
    instances: int = 0
    checks: int = 0
    skipped: int = 0
    violations: list = field(default_factory=list)
    table: pd.DataFrame = None

    @property
    def passed(self):
        return not self.violations

    def to_dict(self):
        result = {
            "suite": self.name,
            "seeds": self.seeds,
            "seed": self.seed,
            "instances": self.instances,
            "checks": self.checks,
            "skipped": self.skipped,
            "passed": self.passed,
            "violations": self.violations,
        }
        if self.table is not None:
            result["table"] = self.table.reset_index()
        return result


def _instances(seeds, seed, policy=None, max_vars=None, coeff_range=None):
    max_vars = config["verify"]["max_vars"] if max_vars is None else max_vars
    coeff_range = config["verify"]["coeff_range"] if coeff_range is None else coeff_range
    for offset in range(seeds):
        instance_seed = seed + offset
        n = 1 + instance_seed % max_vars
        m = 1 + (instance_seed // max_vars) % 3
        rhs_policy = policy
        if rhs_policy is None:
            rhs_policy = RhsPolicy.FEASIBLE if instance_seed % 2 else RhsPolicy.FREE
        yield instance_seed, random_system(n, m, coeff_range, rhs_policy, seed=instance_seed)


def _violation(report, instance_seed, S, **details):
    entry = {"seed": instance_seed, "rows": [str(row) for row in S.rows]}
    entry.update(details)
    report.violations.append(entry)
    logger.warning(
        "{suite}: counterexample at seed {seed}".format(suite=report.name, seed=instance_seed)
    )


def _prop1(report, S, instance_seed):
    result = check(S, Property.CONSISTENT)
    report.checks += 1
    if result.verdict != consistent_by_projection(S):
        _violation(report, instance_seed, S, verdict=result.verdict)
    elif not result.verdict and not witness_is_genuine(S, result):
        _violation(report, instance_seed, S, witness=str(result.witness))


def _prop4(report, S, instance_seed):
    closure = full_closure(clausal_core(S))
    augmented = S.augmented(closure.inequalities())
    report.checks += 1
    result = check(augmented, Property.CONSISTENT)
    if not result.verdict:
        _violation(report, instance_seed, S, closure=closure.to_list(), witness=str(result.witness))


def _prop_cc(report, S, instance_seed):
    if not lp_feasible(LpProblem.from_system(S)).feasible:
        report.skipped += 1
        return
    for J, a in partial_assignments(S.n, range(1, S.n + 1)):
        report.checks += 1
        infeasible = not lp_consistent(S, a)
        cut = is_cg_cut(S, a.falsified_clause()) is not None
        try:
            clause, _, certificate = derive_cg_cut(S, a)
            violated = set(clause.falsifying_assignment().bindings) <= set(a.bindings)
            derived = violated and certificate.verify(S)
        except LpConsistentError:
            derived = False
        if not infeasible == cut == derived:
            _violation(
                report,
                instance_seed,
                S,
                assignment=str(a),
                lp_infeasible=infeasible,
                cg_cut=cut,
                derived=derived,
            )
            return


def _cor1(report, S, instance_seed):
    report.checks += 1
    direct = check(S, Property.LP).verdict
    via_cuts = lp_consistency_via_cg(S).verdict
    if direct != via_cuts:
        _violation(report, instance_seed, S, lp_consistent=direct, via_cg=via_cuts)


def _prop6(report, S, instance_seed):
    if not check(S, Property.CONSISTENT).verdict:
        report.skipped += 1
        return
    report.checks += 1
    result = check(S, Property.LP)
    if not result.verdict:
        _violation(report, instance_seed, S, witness=str(result.witness))


def _prop7(report, S, instance_seed):
    hull = integer_hull(S)
    report.checks += 1
    same_points = enumerate_feasible(hull).points == enumerate_feasible(S).points
    result = check(hull, Property.LP)
    if not same_points or not result.verdict:
        _violation(
            report,
            instance_seed,
            S,
            same_points=same_points,
            witness=None if result.witness is None else str(result.witness),
        )


def _prop10(report, S, instance_seed):
    points = enumerate_feasible(S).points
    for k in range(1, min(3, S.n) + 1):
        for mode in Mode:
            augmented = sequentialize(S, k, mode)
            report.checks += 1
            result = check(augmented, Property.SEQ_LP_K, k)
            same_points = enumerate_feasible(augmented).points == points
            if not result.verdict or not same_points:
                _violation(
                    report,
                    instance_seed,
                    S,
                    k=k,
                    mode=mode.value,
                    same_points=same_points,
                    witness=None if result.witness is None else str(result.witness),
                )
                return


def _domain(report, S, instance_seed):
    if not check(S, Property.CONSISTENT).verdict:
        report.skipped += 1
        return
    report.checks += 1
    result = check(S, Property.DOMAIN)
    if not result.verdict:
        _violation(report, instance_seed, S, witness=str(result.witness))


_PER_INSTANCE = {
    "prop1": (_prop1, None),
    "prop4": (_prop4, None),
    "prop-cc": (_prop_cc, None),
    "cor1": (_cor1, None),
    "prop6": (_prop6, RhsPolicy.FEASIBLE),
    "prop7": (_prop7, None),
    "prop10": (_prop10, RhsPolicy.FEASIBLE),
    "domain": (_domain, RhsPolicy.FEASIBLE),
}


def run_suite(name, seeds=None, seed=None):
    """Run a named suite.

    :param name: one of :data:`SUITES`.
    :type name: string
    :param seeds: number of random instances, defaults to ``verify.seeds``.
    :type seeds: int
    :param seed: base seed, defaults to ``verify.seed``.
    :type seed: int
    :returns: SuiteReport"""
    if name not in SUITES:
        raise ValueError("Unknown suite '" + name + "', expected one of " + ", ".join(SUITES) + ".")
    seeds = config["verify"]["seeds"] if seeds is None else seeds
    seed = config["verify"]["seed"] if seed is None else seed
    report = SuiteReport(name, seeds, seed)
    logger.info("running {name} on {seeds} seeds from {seed}".format(name=name, seeds=seeds, seed=seed))

    if name in _PER_INSTANCE:
        step, policy = _PER_INSTANCE[name]
        for instance_seed, S in _instances(seeds, seed, policy):
            report.instances += 1
            step(report, S, instance_seed)
    elif name == "prop5":
        limit = min(config["verify"]["max_vars"], config["prop5"]["cap"])
        for offset in range(seeds):
            instance_seed = seed + offset
            n = 1 + instance_seed % limit
            S = random_clause_system(n, 1 + (instance_seed // limit) % 4, seed=instance_seed)
            report.instances += 1
            report.checks += 1
            discrepancy = prop5_discrepancy(S)
            if discrepancy is not None:
                _violation(report, instance_seed, S, **discrepancy)
    elif name == "no-backtrack":
        summary = search.no_backtrack_theorem_suite(
            seeds, seed, config["verify"]["max_vars"], config["verify"]["coeff_range"]
        )
        report.instances = summary["instances"]
        report.checks = summary["premise_a"] + summary["premise_b"] + summary["premise_c"]
        report.violations = summary["violations"]
    else:
        passed, table = errata.reconcile()
        report.instances = len(table.columns)
        report.checks = int(table.size)
        report.table = table
        if not passed:
            report.violations.append({"gate": "errata", "claims": table.reset_index()})
    return report
