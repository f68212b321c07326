from nose.tools import eq_, ok_, assert_raises

from zocon import errata
from zocon.suites import SUITES, run_suite


class Test_errata:
    @classmethod
    def setup_class(cls):
        cls.passed, cls.table = errata.reconcile()

    def test_gate(self):
        """errata_tests: The corrected system passes and each printed form fails"""
        ok_(self.passed, msg="Errata gate failed")
        ok_(self.table["corrected"].all(), msg="A claim fails on the corrected system")
        eq_(list(self.table.columns), ["corrected", "rhs -1", "coefficient -2"], msg="Wrong columns")
        eq_(len(self.table), len(errata.CLAIMS), msg="Claims missing")

    def test_rhs_variant(self):
        """errata_tests: With rhs -1 the origin is LP-consistent"""
        ok_(not self.table.loc["(0,0) is LP-inconsistent", "rhs -1"], msg="Claim should fail")
        ok_(not self.table.loc["x1=0 is inconsistent", "rhs -1"], msg="Claim should fail")

    def test_coefficient_variant(self):
        """errata_tests: With coefficient -2 the clausal core changes"""
        ok_(
            not self.table.loc["clausal core is {x1 | x2, x1 | ~x2}", "coefficient -2"],
            msg="Claim should fail",
        )
        ok_(not self.table.loc["x2=0 branch optimum is (1/2, 0)", "coefficient -2"], msg="Claim should fail")
        ok_(self.table.loc["x1=0 is LP-consistent", "coefficient -2"], msg="Claim should hold")

    def test_evaluate(self):
        """errata_tests: Evaluation of the corrected system alone"""
        ok_(all(errata.evaluate(errata.CORRECTED).values()), msg="Corrected system fails a claim")


class Test_suites:
    def test_small_runs(self):
        """errata_tests: Every property suite passes on a few seeds"""
        seeds = {
            "prop1": 10,
            "prop4": 10,
            "prop5": 6,
            "prop-cc": 6,
            "cor1": 8,
            "prop6": 10,
            "prop7": 5,
            "prop10": 6,
            "domain": 10,
            "no-backtrack": 6,
        }
        for name, count in seeds.items():
            report = run_suite(name, seeds=count)
            ok_(report.passed, msg=name + " found " + str(report.violations))
            eq_(report.instances, count, msg=name + " ran the wrong number of instances")

    def test_consistency_suites_draw_feasible_systems(self):
        """errata_tests: prop6 and domain draw nonempty systems"""
        for name in ["prop6", "domain"]:
            report = run_suite(name, seeds=12)
            ok_(report.passed, msg=name + " found " + str(report.violations))
            eq_(report.checks + report.skipped, report.instances, msg=name + " lost instances")
            # Seeds 0, 4 and 8 draw one variable; a nonempty one variable system is consistent.
            ok_(report.checks >= 3, msg=name + " skipped " + str(report.skipped))

    def test_errata_suite(self):
        """errata_tests: The errata suite carries the claims table"""
        report = run_suite("errata")
        ok_(report.passed, msg="Errata suite failed")
        ok_(report.table is not None, msg="Claims table missing")
        eq_(report.to_dict()["suite"], "errata", msg="Wrong suite name")

    def test_names(self):
        """errata_tests: Suite names"""
        eq_(len(SUITES), 11, msg="Wrong suite count")
        assert_raises(ValueError, run_suite, "bogus")
