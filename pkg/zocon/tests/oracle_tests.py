from nose.tools import eq_, ok_, assert_raises

from zocon.core import BinarySystem, LinIneq, PartialAssignment
from zocon.oracle import (
    EnumerationCapError,
    Property,
    Relaxation,
    RhsPolicy,
    check,
    consistent_by_projection,
    consistent_with,
    dependency_width,
    enumerate_feasible,
    parent_width,
    project,
    random_clause_system,
    random_system,
    witness_is_genuine,
)

NINE_POINTS = BinarySystem(
    4, (LinIneq({1: 1, 2: 1, 4: 1}, 1), LinIneq({1: 1, 2: -1, 3: 1}, 0), LinIneq({1: 1, 4: -1}, 0))
)
ORDER_SENSITIVE = BinarySystem(2, (LinIneq({1: 3, 2: 2}, 1), LinIneq({1: -1, 2: 2}, 0)))
LP_GAP = BinarySystem(2, (LinIneq({1: 2, 2: 4}, 1), LinIneq({1: 2, 2: -4}, -3)))
PACKING = BinarySystem(3, (LinIneq({1: -1, 2: -1}, -1), LinIneq({2: -1, 3: -1}, -1)))
MERGED = BinarySystem(3, (LinIneq({1: -1, 2: -2, 3: -1}, -2),))


class Test_enumeration:
    @classmethod
    def setup_class(cls):
        cls.F = enumerate_feasible(NINE_POINTS)

    def test_nine_points(self):
        """oracle_tests: Example with nine feasible points"""
        expected = {(1, a, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1)}
        expected.add((0, 1, 1, 0))
        eq_(set(self.F.points), expected, msg="Wrong feasible set")

    def test_projection(self):
        """oracle_tests: Projection onto (x1, x2)"""
        eq_(project(self.F, [1, 2]), frozenset([(0, 1), (1, 0), (1, 1)]), msg="Wrong projection")

    def test_frame(self):
        """oracle_tests: Feasible points as a data frame"""
        frame = self.F.to_frame()
        eq_(frame.shape, (9, 4), msg="Wrong frame shape")
        eq_(list(frame.columns), ["x1", "x2", "x3", "x4"], msg="Wrong columns")

    def test_cap(self):
        """oracle_tests: Enumeration refuses systems beyond the cap"""
        assert_raises(EnumerationCapError, enumerate_feasible, NINE_POINTS, 3)

    def test_relaxations(self):
        """oracle_tests: Exact, subset and LP consistency of one assignment"""
        a = PartialAssignment({1: 0, 2: 0})
        ok_(not consistent_with(NINE_POINTS, a, Relaxation.EXACT), msg="(0,0) has no extension")
        ok_(consistent_with(NINE_POINTS, a, Relaxation.SUBSET), msg="(0,0) violates no row over x1, x2")
        ok_(not consistent_with(NINE_POINTS, a, Relaxation.LP), msg="(0,0) is LP-infeasible")


class Test_checks:
    def test_nine_points(self):
        """oracle_tests: Not consistent with witness (0,0), domain consistent"""
        report = check(NINE_POINTS, Property.CONSISTENT)
        ok_(not report.verdict, msg="Should not be consistent")
        eq_(report.witness, PartialAssignment({1: 0, 2: 0}), msg="Wrong witness")
        ok_(witness_is_genuine(NINE_POINTS, report), msg="Witness not genuine")
        ok_(check(NINE_POINTS, Property.DOMAIN).verdict, msg="Should be domain consistent")
        ok_(check(NINE_POINTS, Property.LP).verdict, msg="Should be LP-consistent")

    def test_order_sensitive(self):
        """oracle_tests: Sequentially consistent but not 2-consistent"""
        ok_(check(ORDER_SENSITIVE, Property.SEQ_K, 1).verdict, msg="Should be sequentially 1-consistent")
        ok_(check(ORDER_SENSITIVE, Property.SEQ_K, 2).verdict, msg="Should be sequentially 2-consistent")
        report = check(ORDER_SENSITIVE, Property.K, 2)
        ok_(not report.verdict, msg="Should not be 2-consistent")
        eq_(report.witness, PartialAssignment({2: 0}), msg="Wrong witness")
        eq_(report.details["variable"], 1, msg="Wrong variable")
        ok_(witness_is_genuine(ORDER_SENSITIVE, report), msg="Witness not genuine")
        eq_(dependency_width(ORDER_SENSITIVE), 1, msg="Wrong width")
        eq_(parent_width(ORDER_SENSITIVE, (2, 1)), 1, msg="Wrong parent width")

    def test_widths_differ(self):
        """oracle_tests: Two earlier neighbours of x3 give parent width 2 but out-degree 1"""
        S = BinarySystem(3, (LinIneq({1: 1, 3: 1}, 1), LinIneq({2: 1, 3: -1}, 0)))
        eq_(parent_width(S), 2, msg="x3 has two earlier neighbours")
        eq_(dependency_width(S), 1, msg="x1 and x2 each point only at x3")

    def test_reversed_order(self):
        """oracle_tests: Order x2, x1 is not sequentially 2-consistent"""
        ok_(not check(ORDER_SENSITIVE, Property.SEQ_K, 2, order=(2, 1)).verdict, msg="Should fail")

    def test_lp_gap(self):
        """oracle_tests: LP relaxation admits x1 = 0"""
        report = check(LP_GAP, Property.SEQ_LP_K, 2)
        ok_(not report.verdict, msg="Should not be sequentially LP 2-consistent")
        eq_(report.witness, PartialAssignment({1: 0}), msg="Wrong witness")
        ok_(witness_is_genuine(LP_GAP, report), msg="Witness not genuine")
        lp = check(LP_GAP, Property.LP)
        ok_(not lp.verdict, msg="Should not be LP-consistent")
        eq_(lp.witness, PartialAssignment({1: 0}), msg="Wrong LP witness")

    def test_packing(self):
        """oracle_tests: Both packing formulations are LP-consistent"""
        ok_(check(PACKING, Property.CONSISTENT).verdict, msg="Packing rows should be consistent")
        ok_(check(PACKING, Property.LP).verdict, msg="Packing rows should be LP-consistent")
        ok_(check(MERGED, Property.LP).verdict, msg="Merged row should be LP-consistent")
        eq_(enumerate_feasible(PACKING).points, enumerate_feasible(MERGED).points, msg="Same points")

    def test_projection_agrees(self):
        """oracle_tests: Consistency agrees with the projection equality"""
        for S in [NINE_POINTS, ORDER_SENSITIVE, LP_GAP, PACKING, MERGED]:
            eq_(
                check(S, Property.CONSISTENT).verdict,
                consistent_by_projection(S),
                msg="Disagreement on " + S.to_text(),
            )

    def test_unary_rows_restrict_domains(self):
        """oracle_tests: A value excluded by a unary row is outside the domain"""
        S = BinarySystem(1, (LinIneq({1: 1}, 1),))
        ok_(check(S, Property.CONSISTENT).verdict, msg="x1 >= 1 should be consistent")
        ok_(check(S, Property.DOMAIN).verdict, msg="x1 >= 1 should be domain consistent")

    def test_level_checked(self):
        """oracle_tests: Levels outside 1..n are rejected"""
        assert_raises(ValueError, check, ORDER_SENSITIVE, Property.K, 3)

    def test_property_parse(self):
        """oracle_tests: Property names with levels"""
        eq_(Property.parse("seq-lp-k:2"), (Property.SEQ_LP_K, 2), msg="Wrong parse")
        eq_(Property.parse("lp"), (Property.LP, None), msg="Wrong parse")
        assert_raises(ValueError, Property.parse, "k")
        assert_raises(ValueError, Property.parse, "lp:2")
        assert_raises(ValueError, Property.parse, "bogus")


class Test_random:
    def test_seeded(self):
        """oracle_tests: Random systems are reproducible"""
        eq_(random_system(3, 2, seed=7), random_system(3, 2, seed=7), msg="Same seed differs")

    def test_feasible_policy(self):
        """oracle_tests: Feasible policy keeps a planted point"""
        for seed in range(20):
            S = random_system(4, 3, 4, RhsPolicy.FEASIBLE, seed=seed)
            ok_(len(enumerate_feasible(S)) > 0, msg="Seed " + str(seed) + " infeasible")

    def test_prop6(self):
        """oracle_tests: Consistent systems are LP-consistent"""
        for seed in range(25):
            S = random_system(1 + seed % 4, 1 + seed % 3, seed=seed)
            if check(S, Property.CONSISTENT).verdict:
                ok_(check(S, Property.LP).verdict, msg="Seed " + str(seed) + " breaks it")

    def test_clause_systems(self):
        """oracle_tests: Random clause systems hold clausal rows"""
        S = random_clause_system(3, 4, seed=1)
        eq_(len(S.rows), 4, msg="Wrong row count")
        ok_(all(row.clause() is not None for row in S.rows), msg="Non-clausal row")
