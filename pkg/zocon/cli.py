"""
Consistency analysis of 0-1 linear systems.

Usage:
    zocon check <file> --property=PROP [--order=ORDER] [options]
    zocon closure <file> [--mode=MODE] [options]
    zocon cut-test <file> --clause=LITERALS [options]
    zocon cut-derive <file> --assign=BINDINGS [options]
    zocon lnp <file> --k=K [--mode=MODE] [options]
    zocon search <file> [--prune=PRUNE] [--order=ORDER] [--value-order=VALUES] [options]
    zocon bnb <file> [--root-cuts=VARS] [--prune=PRUNE] [--value-order=VALUES] [options]
    zocon verify --suite=SUITE [--seeds=N] [options]
    zocon -h | --help

Options:
    --property=PROP         consistent, domain, k:<k>, strong-k:<k>, seq-k:<k>, lp or seq-lp-k:<k>
    --order=ORDER           Branching order as a permutation, e.g. "2,1"
    --mode=MODE             full|input for closure, prefix|aux-only for lnp
    --clause=LITERALS       Clause literals, e.g. "x1 ~x3"
    --assign=BINDINGS       Partial assignment, e.g. "x1=0,x3=0"
    --k=K                   Lift variable
    --prune=PRUNE           rows, lp or none
    --value-order=VALUES    zero-first, one-first or lp-guided
    --root-cuts=VARS        Variables whose disjunctions cut the root, e.g. "1,2"
    --suite=SUITE           prop1, prop4, prop5, prop-cc, cor1, prop6, prop7, prop10,
                            domain, no-backtrack or errata
    --seeds=N               Number of random instances
    --format=FORMAT         text or json [default: text]
    --seed=SEED             Base seed of random suites
    --cap=CAP               Enumeration cap for this run
    -v, --verbose           Debug logging
    -h, --help              Show this text
"""
import json
import logging
import sys

import pandas as pd
import yaml
from docopt import DocoptExit, docopt

from .config import config
from .core import Clause, PartialAssignment, clause_to_inequality
from .cuts import LpConsistentError, derive_cg_cut, is_cg_cut, surrogate_bound
from .liftproject import Mode, fm_project, lift, sequentialize
from .lp import LpProblem, lp_feasible
from .modelfile import format_model, load_model
from .oracle import Property, check, enumerate_feasible, witness_is_genuine
from .resolution import clausal_core, full_closure, input_closure
from .search import Prune, Strategy, ValueOrder, branch_and_bound, feasibility_search
from .suites import SUITES, run_suite
from .util import jsonable

logger = logging.getLogger(__name__)

COMMANDS = ("check", "closure", "cut-test", "cut-derive", "lnp", "search", "bnb", "verify")


class UsageError(ValueError):
    """A command line flag has an invalid value."""


def _flag(parse, text, name):
    try:
        return parse(text)
    except ValueError as err:
        raise UsageError("Invalid value for " + name + ": " + str(err))


def _integer(text, name, minimum=0):
    value = _flag(int, text, name)
    if value < minimum:
        raise UsageError(name + " must be at least " + str(minimum) + ", found " + str(value) + ".")
    return value


def _variables(text, name):
    return tuple(_integer(part, name, 1) for part in text.replace(",", " ").split())


def _order(text, n):
    if text is None:
        return None
    order = _variables(text, "--order")
    if sorted(order) != list(range(1, n + 1)):
        raise UsageError("--order must be a permutation of 1.." + str(n) + ", found " + text + ".")
    return order


def _enum(kind, text, name, default):
    return _flag(kind, default if text is None else text, name)


def _check(opts, S, objective, cap):
    prop, k = _flag(Property.parse, opts["--property"], "--property")
    if k is not None and not 1 <= k <= S.n:
        raise UsageError("Level in --property must lie in 1.." + str(S.n) + ", found " + str(k) + ".")
    result = check(S, prop, k, _order(opts["--order"], S.n), cap)
    report = {"result": result.to_dict()}
    if not result.verdict:
        report["witness_verified"] = witness_is_genuine(S, result, cap)
    if prop not in (Property.LP, Property.SEQ_LP_K):
        report["tables"] = {"feasible points": enumerate_feasible(S, cap).to_frame()}
    return (0 if result.verdict else 1), report


def _closure(opts, S, objective, cap):
    mode = opts["--mode"] or "full"
    if mode not in ("full", "input"):
        raise UsageError("--mode for closure must be full or input, found " + mode + ".")
    core = clausal_core(S, cap)
    report = {"mode": mode, "clausal_core": core.to_list()}
    if mode == "full":
        closure = full_closure(core)
    else:
        closure, dag = input_closure(core)
        report["proof"] = dag.to_dict()
        report["proof_replays"] = dag.replay()
    report["closure"] = closure.to_list()
    report["added"] = [str(clause) for clause in closure if clause not in core]
    report["infeasible"] = closure.infeasible
    return 0, report


def _cut_test(opts, S, objective, cap):
    clause = _flag(Clause.parse, opts["--clause"], "--clause")
    if clause.is_empty() or any(var > S.n for var in clause.variables):
        raise UsageError("--clause needs literals over x1..x" + str(S.n) + ".")
    certificate = is_cg_cut(S, clause)
    report = {"clause": str(clause), "cg_cut": certificate is not None}
    if certificate is not None:
        report["certificate"] = certificate.to_dict(S)
        report["certificate_verified"] = certificate.verify(S)
        return 0, report
    best, _ = surrogate_bound(S, clause_to_inequality(clause))
    if best is None:
        report["diagnostic"] = "not a surrogate direction"
    else:
        report["diagnostic"] = "surrogate exists but too weak"
        report["best_rhs"] = best
    return 1, report


def _cut_derive(opts, S, objective, cap):
    a = _flag(PartialAssignment.parse, opts["--assign"], "--assign")
    if any(var > S.n for var in a.variables):
        raise UsageError("--assign binds variables beyond x" + str(S.n) + ".")
    if not lp_feasible(LpProblem.from_system(S)).feasible:
        return 1, {"assignment": str(a), "error": "The LP relaxation of the system is infeasible."}
    try:
        clause, trace, certificate = derive_cg_cut(S, a)
    except LpConsistentError as err:
        return 1, {"assignment": str(a), "lp_consistent": True, "error": str(err)}
    return 0, {
        "assignment": str(a),
        "clause": str(clause),
        "trace": trace.to_dict(),
        "certificate": certificate.to_dict(S),
        "certificate_verified": certificate.verify(S),
    }


def _lnp(opts, S, objective, cap):
    k = _integer(opts["--k"], "--k", 1)
    if k > S.n:
        raise UsageError("--k must lie in 1.." + str(S.n) + ", found " + str(k) + ".")
    mode = _enum(Mode, opts["--mode"], "--mode", "prefix")
    lifted = lift(S, k)
    keep = range(1, k) if mode is Mode.PREFIX else range(1, S.n + 1)
    projected = fm_project(lifted, keep, redundancy=True)
    augmented = sequentialize(S, k, mode)
    result = check(augmented, Property.SEQ_LP_K, k, cap=cap)
    report = {
        "k": k,
        "mode": mode.value,
        "lifted": lifted.format_rows(),
        "projected": projected.format_rows(),
        "provenance_verified": projected.verify_provenance(),
        "augmented": format_model(augmented),
        "result": result.to_dict(),
    }
    return (0 if result.verdict else 1), report


def _search(opts, S, objective, cap):
    strat = Strategy(
        _order(opts["--order"], S.n),
        _enum(Prune, opts["--prune"], "--prune", "rows"),
        _enum(ValueOrder, opts["--value-order"], "--value-order", config["search"]["value_order"]),
    )
    trace = feasibility_search(S, strat)
    report = {"trace": trace.to_dict(), "tables": {"nodes": trace.to_frame()}}
    return (0 if trace.solution is not None else 1), report


def _bnb(opts, S, objective, cap):
    if objective is None:
        raise UsageError("bnb needs a model file with a max or min line.")
    cuts = () if opts["--root-cuts"] is None else _variables(opts["--root-cuts"], "--root-cuts")
    if any(var > S.n for var in cuts):
        raise UsageError("--root-cuts names variables beyond x" + str(S.n) + ".")
    strat = Strategy(
        prune=_enum(Prune, opts["--prune"], "--prune", "none"),
        value_order=_enum(
            ValueOrder, opts["--value-order"], "--value-order", config["search"]["value_order"]
        ),
    )
    trace = branch_and_bound(S, objective, cuts, strat)
    report = {
        "objective": str(objective),
        "trace": trace.to_dict(),
        "tables": {"nodes": trace.to_frame()},
    }
    return (0 if trace.solution is not None else 1), report


def _verify(opts):
    suite = opts["--suite"]
    if suite not in SUITES:
        raise UsageError("--suite must be one of " + ", ".join(SUITES) + ", found " + suite + ".")
    seeds = None if opts["--seeds"] is None else _integer(opts["--seeds"], "--seeds")
    seed = None if opts["--seed"] is None else _integer(opts["--seed"], "--seed")
    result = run_suite(suite, seeds, seed)
    report = {"result": result.to_dict()}
    if result.table is not None:
        report["tables"] = {"claims": result.table}
    return (0 if result.passed else 1), report


_HANDLERS = {
    "check": _check,
    "closure": _closure,
    "cut-test": _cut_test,
    "cut-derive": _cut_derive,
    "lnp": _lnp,
    "search": _search,
    "bnb": _bnb,
}


def run_command(argv):
    """Run one command.

    :param argv: arguments after the program name.
    :type argv: list of string
    :returns: (exit code, report dict); the report echoes the command and,
        for file commands, the parsed model."""
    try:
        opts = docopt(__doc__, argv=argv, help=False)
    except DocoptExit as err:
        return 2, {"command": list(argv), "error": str(err).strip()}
    report = {"command": list(argv)}
    if opts["--help"]:
        report["usage"] = __doc__.strip()
        return 0, report
    try:
        if opts["--format"] not in ("text", "json"):
            raise UsageError("--format must be text or json, found " + opts["--format"] + ".")
        cap = None if opts["--cap"] is None else _integer(opts["--cap"], "--cap", 0)
        command = next(name for name in COMMANDS if opts[name])
        if command == "verify":
            code, result = _verify(opts)
        else:
            S, objective = load_model(opts["<file>"])
            report["model"] = format_model(S, objective)
            code, result = _HANDLERS[command](opts, S, objective, cap)
    except (ValueError, OSError) as err:
        # Every input error of the library is a ValueError; CertificateError is not.
        logger.debug("{name}: {err}".format(name=type(err).__name__, err=err))
        report["error"] = str(err)
        return 2, report
    report.update(result)
    return code, report


def render(report, fmt="text"):
    """Text (YAML with tables) or JSON rendering of a report."""
    tables = report.get("tables", {})
    body = {key: value for key, value in report.items() if key != "tables"}
    if fmt == "json":
        if tables:
            body["tables"] = tables
        return json.dumps(jsonable(body), indent=2)
    if "usage" in body:
        return body["usage"]
    text = yaml.safe_dump(jsonable(body), sort_keys=False, allow_unicode=True)
    for name, frame in tables.items():
        text += "\n" + name + ":\n" + (
            frame.to_string(index=False) if isinstance(frame, pd.DataFrame) else str(frame)
        ) + "\n"
    return text


def _format_of(argv):
    for i, arg in enumerate(argv):
        if arg.startswith("--format="):
            return arg.split("=", 1)[1]
        if arg == "--format" and i + 1 < len(argv):
            return argv[i + 1]
    return "text"


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    level = "DEBUG" if "-v" in argv or "--verbose" in argv else config["logging"]["level"]
    logging.basicConfig(level=level, format=config["logging"]["format"])
    code, report = run_command(argv)
    fmt = _format_of(argv)
    if code == 2:
        sys.stderr.write(str(report.get("error", "")) + "\n")
        if "Usage" not in str(report.get("error", "")):
            sys.stderr.write(__doc__.strip() + "\n")
    else:
        sys.stdout.write(render(report, "json" if fmt == "json" else "text") + "\n")
    sys.exit(code)


if __name__ == "__main__":
    main()
