import json
import os
import shutil
import tempfile

from nose.tools import eq_, ok_

import zocon as zc
from zocon.cli import main, render, run_command

MODELS = os.path.join(os.path.dirname(zc.__file__), "models")


def _model(name):
    return os.path.join(MODELS, name + ".mod")


class Test_check:
    def test_lp_consistent(self):
        """cli_tests: check exits 0 when the property holds"""
        code, report = run_command(["check", _model("nine_points"), "--property=lp"])
        eq_(code, 0, msg="The nine-point system is LP-consistent")
        ok_(report["result"]["verdict"], msg="Wrong verdict")
        ok_("vars 4" in report["model"], msg="Model not echoed")

    def test_witness(self):
        """cli_tests: check exits 1 with a verified witness"""
        code, report = run_command(["check", _model("lp_gap"), "--property=seq-lp-k:2"])
        eq_(code, 1, msg="The LP gap system is not sequentially LP 2-consistent")
        eq_(report["result"]["witness"], "x1=0", msg="Wrong witness")
        ok_(report["witness_verified"], msg="Witness not verified")

    def test_order(self):
        """cli_tests: --order reverses the branching order"""
        code, _ = run_command(["check", _model("order_sensitive"), "--property=seq-k:2", "--order=2,1"])
        eq_(code, 1, msg="Reversed order should fail")

    def test_usage_errors(self):
        """cli_tests: Bad flags exit 2"""
        for argv in [
            ["check", _model("nine_points"), "--property=bogus"],
            ["check", _model("nine_points"), "--property=k:9"],
            ["check", _model("nine_points"), "--property=lp", "--order=1,1,2,3"],
            ["check", _model("nine_points"), "--property=lp", "--format=xml"],
            ["check", _model("nine_points"), "--property=lp", "--cap=2"],
            ["check", _model("missing"), "--property=lp"],
            ["check", MODELS, "--property=lp"],
            ["closure", _model("nine_points"), "--mode=bogus"],
            ["bnb", _model("nine_points")],
            [],
        ]:
            code, report = run_command(argv)
            eq_(code, 2, msg="Expected usage error for " + " ".join(argv))
            ok_("error" in report, msg="No error message for " + " ".join(argv))

    def test_not_utf8(self):
        """cli_tests: A Latin-1 model file is an input error"""
        directory = tempfile.mkdtemp()
        path = os.path.join(directory, "latin1.mod")
        try:
            with open(path, "wb") as file:
                file.write("vars 1\n# caf\u00e9\nx1 >= 1\n".encode("latin-1"))
            code, report = run_command(["check", path, "--property=lp"])
        finally:
            shutil.rmtree(directory)
        eq_(code, 2, msg="Expected an input error")
        ok_(report["error"].startswith("line 2, column 6: "), msg="Wrong position: " + report["error"])

    def test_help(self):
        """cli_tests: --help prints the usage"""
        code, report = run_command(["--help"])
        eq_(code, 0, msg="Help should exit 0")
        ok_(render(report).startswith("Consistency analysis"), msg="Usage not rendered")


class Test_commands:
    def test_closure(self):
        """cli_tests: Full and input closures"""
        code, report = run_command(["closure", _model("order_sensitive")])
        eq_(code, 0, msg="closure should succeed")
        ok_("x2" in report["closure"], msg="x2 missing from the closure")
        code, report = run_command(["closure", _model("eight_clauses"), "--mode=input"])
        eq_(len(report["closure"]), 12, msg="Expected twelve clauses")
        ok_(report["proof_replays"], msg="Proof does not replay")

    def test_cut_test(self):
        """cli_tests: Certified cut and diagnosed failure"""
        code, report = run_command(["cut-test", _model("nine_points"), "--clause=x1 x3"])
        eq_(code, 0, msg="x1 | x3 is a cut")
        ok_(report["certificate_verified"], msg="Certificate not verified")
        code, report = run_command(["cut-test", _model("lp_gap"), "--clause=x1"])
        eq_(code, 1, msg="x1 is no cut of the LP gap system")
        eq_(report["diagnostic"], "surrogate exists but too weak", msg="Wrong diagnostic")

    def test_cut_derive(self):
        """cli_tests: Separation from an LP-infeasible assignment"""
        code, report = run_command(["cut-derive", _model("nine_points"), "--assign=x1=0,x3=0"])
        eq_(code, 0, msg="Derivation should succeed")
        eq_(report["clause"], "x1 | x3", msg="Wrong clause")
        ok_(report["certificate_verified"], msg="Certificate not verified")
        code, report = run_command(["cut-derive", _model("nine_points"), "--assign=x1=0,x3=1"])
        eq_(code, 1, msg="LP-consistent assignment has no cut")
        ok_(report["lp_consistent"], msg="Should report LP-consistency")

    def test_lnp(self):
        """cli_tests: Lift and project on x2"""
        code, report = run_command(["lnp", _model("lp_gap"), "--k=2"])
        eq_(code, 0, msg="Sequentializing should reach level 2")
        ok_("x1 >= 1/2" in report["projected"], msg="Missing projected row")
        ok_(report["provenance_verified"], msg="Provenance not verified")
        eq_(len(report["lifted"]), 12, msg="Wrong lifted row count")

    def test_search(self):
        """cli_tests: Search with LP pruning backtracks once on the LP gap system"""
        code, report = run_command(["search", _model("lp_gap"), "--prune=lp"])
        eq_(code, 0, msg="Search should find a point")
        eq_(report["trace"]["backtracks"], 1, msg="Wrong backtrack count")

    def test_bnb(self):
        """cli_tests: Branch and bound with root cuts"""
        code, report = run_command(["bnb", _model("lp_gap"), "--root-cuts=1,2"])
        eq_(code, 0, msg="bnb should find the optimum")
        eq_(report["trace"]["nodes"], 5, msg="Wrong node count")
        eq_(report["trace"]["solution"], [1, 1], msg="Wrong solution")

    def test_bnb_prune(self):
        """cli_tests: --prune=lp skips the infeasible children"""
        _, report = run_command(["bnb", _model("lp_gap"), "--value-order=zero-first"])
        eq_(report["trace"]["nodes"], 5, msg="Every child should count by default")
        _, report = run_command(["bnb", _model("lp_gap"), "--prune=lp", "--value-order=zero-first"])
        eq_(report["trace"]["nodes"], 3, msg="Infeasible children should be skipped")

    def test_verify(self):
        """cli_tests: Errata gate and a short property suite"""
        code, report = run_command(["verify", "--suite=errata"])
        eq_(code, 0, msg="Errata gate should pass")
        code, report = run_command(["verify", "--suite=prop1", "--seeds=5"])
        eq_(code, 0, msg="prop1 should pass")
        eq_(report["result"]["instances"], 5, msg="Wrong instance count")
        code, _ = run_command(["verify", "--suite=bogus"])
        eq_(code, 2, msg="Unknown suite should exit 2")


class Test_rendering:
    def test_json(self):
        """cli_tests: JSON reports keep rationals exact"""
        _, report = run_command(["cut-test", _model("nine_points"), "--clause=x1 x3"])
        body = json.loads(render(report, "json"))
        ok_(isinstance(body["certificate"]["combined_rhs"], str), msg="Rational not a string")
        eq_(body["clause"], "x1 | x3", msg="Wrong clause")

    def test_text(self):
        """cli_tests: Text reports carry their tables"""
        _, report = run_command(["check", _model("nine_points"), "--property=consistent"])
        ok_("feasible points:" in render(report), msg="Table missing")
        _, report = run_command(["check", _model("nine_points"), "--property=lp"])
        ok_("tables" not in report, msg="LP properties need no enumerated table")

    def test_main_exit_code(self):
        """cli_tests: main exits with the command's code"""
        try:
            main(["check", _model("lp_gap"), "--property=lp", "--format=json"])
        except SystemExit as err:
            eq_(err.code, 1, msg="The LP gap system is not LP-consistent")
        else:
            ok_(False, msg="main did not exit")
