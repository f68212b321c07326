from fractions import Fraction

from nose.tools import eq_, ok_

from zocon.core import BinarySystem, Clause, LinIneq, PartialAssignment
from zocon.oracle import consistent_with, enumerate_feasible, lp_consistent
from zocon.resolution import (
    ClauseSet,
    clausal_core,
    full_closure,
    has_input_proof,
    input_closure,
    resolvent,
    row_clauses,
)


def _clauses(*texts):
    return {Clause.parse(text) for text in texts}


NINE_POINTS = BinarySystem(
    4, (LinIneq({1: 1, 2: 1, 4: 1}, 1), LinIneq({1: 1, 2: -1, 3: 1}, 0), LinIneq({1: 1, 4: -1}, 0))
)
ORDER_SENSITIVE = BinarySystem(2, (LinIneq({1: 3, 2: 2}, 1), LinIneq({1: -1, 2: 2}, 0)))
EIGHT_CLAUSES = BinarySystem(
    4,
    tuple(
        LinIneq({1: 1, 2: s2, 3: s3, 4: s4}, 1 - [s2, s3, s4].count(-1))
        for s2 in (1, -1)
        for s3 in (1, -1)
        for s4 in (1, -1)
    ),
)


class Test_core:
    def test_nine_points(self):
        """resolution_tests: Clausal rows are their own core"""
        eq_(
            set(clausal_core(NINE_POINTS)),
            _clauses("x1 x2 x4", "x1 ~x2 x3", "x1 ~x4"),
            msg="Wrong clausal core",
        )

    def test_order_sensitive(self):
        """resolution_tests: Prime clauses of non-clausal rows"""
        eq_(set(clausal_core(ORDER_SENSITIVE)), _clauses("x1 x2", "~x1 x2"), msg="Wrong clausal core")

    def test_row_clauses(self):
        """resolution_tests: Literals are dropped while the row still implies the clause"""
        eq_(row_clauses(LinIneq({1: 2, 2: 1, 3: 1}, 2), 3), _clauses("x1 x2", "x1 x3"), msg="Wrong primes")

    def test_unsatisfiable_row(self):
        """resolution_tests: An unsatisfiable row contributes the empty clause"""
        core = clausal_core(BinarySystem(2, (LinIneq({1: 1, 2: 1}, 3), LinIneq({1: 1}, 1))))
        ok_(core.infeasible, msg="Empty clause missing")
        eq_(len(core), 1, msg="Empty clause should absorb everything")

    def test_clause_set_reduced(self):
        """resolution_tests: Clause sets drop absorbed members"""
        eq_(set(ClauseSet(frozenset(_clauses("x1", "x1 x2")))), _clauses("x1"), msg="x1 | x2 kept")


class Test_closure:
    def test_resolvent(self):
        """resolution_tests: Resolvents need exactly one clash"""
        eq_(
            resolvent(Clause.parse("x1 x2 x4"), Clause.parse("x1 ~x4")),
            (Clause.parse("x1 x2"), 4),
            msg="Wrong resolvent",
        )
        eq_(resolvent(Clause.parse("x1 x2"), Clause.parse("~x1 ~x2")), None, msg="Two clashes resolved")
        eq_(resolvent(Clause.parse("x1"), Clause.parse("x2")), None, msg="No clash resolved")

    def test_full_closure_nine_points(self):
        """resolution_tests: Closure adds x1 | x2 and x1 | x3"""
        closure = full_closure(clausal_core(NINE_POINTS))
        eq_(set(closure), _clauses("x1 x2", "x1 x3", "x1 ~x4"), msg="Wrong closure")

    def test_full_closure_order_sensitive(self):
        """resolution_tests: Closure of the order sensitive core is x2"""
        eq_(set(full_closure(clausal_core(ORDER_SENSITIVE))), _clauses("x2"), msg="Wrong closure")

    def test_closure_sound(self):
        """resolution_tests: Every closure clause holds on every feasible point"""
        F = enumerate_feasible(NINE_POINTS)
        for clause in full_closure(clausal_core(NINE_POINTS)):
            for point in F.points:
                ok_(clause.satisfied_by(dict(enumerate(point, start=1))), msg=str(clause) + " fails")

    def test_refutation(self):
        """resolution_tests: An infeasible clause set resolves to the empty clause"""
        C = ClauseSet(frozenset(_clauses("x1 x2", "x1 ~x2", "~x1 x2", "~x1 ~x2")))
        ok_(full_closure(C).infeasible, msg="Empty clause not derived")

    def test_input_closure_eight_clauses(self):
        """resolution_tests: Input resolution stops at the three-literal clauses"""
        core = clausal_core(EIGHT_CLAUSES)
        eq_(len(core), 8, msg="Wrong core")
        closure, dag = input_closure(core)
        eq_(len(closure), 12, msg="Expected the twelve three-literal clauses")
        ok_(all(len(clause) == 3 and 1 in clause.pos for clause in closure), msg="Wrong clause shape")
        ok_(dag.replay(), msg="Proof does not replay")
        ok_(not has_input_proof(core, Clause.parse("x1")), msg="x1 has no input proof")
        ok_(Clause.parse("x1") in full_closure(core), msg="Full resolution derives x1")

    def test_input_closure_not_lp_consistent(self):
        """resolution_tests: The augmented eight-clause system still admits x1 = 0 in its LP"""
        closure, _ = input_closure(clausal_core(EIGHT_CLAUSES))
        augmented = EIGHT_CLAUSES.augmented(closure.inequalities())
        point = {1: 0, 2: Fraction(1, 2), 3: Fraction(1, 2), 4: Fraction(1, 2)}
        ok_(all(row.satisfied_by(point) for row in augmented.rows), msg="Point violates a row")
        ok_(lp_consistent(augmented, PartialAssignment({1: 0})), msg="x1=0 should be LP-feasible")
        ok_(
            not consistent_with(augmented, PartialAssignment({1: 0})),
            msg="x1=0 has no 0-1 extension",
        )
        ok_(not lp_consistent(augmented, PartialAssignment({1: 0, 2: 0})), msg="(0,0) should be LP-infeasible")

    def test_input_proof(self):
        """resolution_tests: Input proof of x1 from x1 | x2 and x1 | ~x2"""
        core = ClauseSet(frozenset(_clauses("x1 x2", "x1 ~x2")))
        ok_(has_input_proof(core, Clause.parse("x1")), msg="x1 should have an input proof")
        closure, dag = input_closure(core)
        steps = dag.derivation(Clause.parse("x1"))
        eq_(len(steps), 3, msg="Two axioms and one resolvent expected")
        ok_(dag.replay(), msg="Proof does not replay")

    def test_inequalities(self):
        """resolution_tests: Closures turn back into clausal rows"""
        closure = full_closure(clausal_core(ORDER_SENSITIVE))
        eq_(closure.inequalities(), [LinIneq({2: 1}, 1)], msg="Wrong rows")
        eq_(closure.as_system(2).n, 2, msg="Wrong variable count")
