import pytest

from liefund import kolmogorov as K
from liefund.fundsol import (
    ConstraintSystem,
    admitted_algebra,
    build_constraints,
    combine,
    residual_conditions,
    same_span,
    solve_constraints,
)
from liefund.jet import check_symmetry, structure_constants
from liefund.symcore import Const, is_zero

a1, a2, a3, a4, a5, a6, a7, a8 = K.a
t0, x0, y0 = K.SOURCE
BASIS = list(K.X.values())
LAMBDAS = [K.LAMBDA[n] for n in K.X]
Y = list(K.Y.values())


@pytest.fixture(scope="module")
def system():
    return build_constraints(BASIS, LAMBDAS, K.SOURCE)


@pytest.fixture(scope="module")
def solution(system):
    return solve_constraints(system)


def same(e1, e2):
    return is_zero(e1 - e2)


class TestBuildConstraints:
    def test_shape_and_labels(self, system):
        assert len(system.matrix) == 4
        assert all(len(row) == 8 for row in system.matrix)
        assert [c.name for c in system.columns] == [f"a{i}" for i in range(1, 9)]
        assert system.row_labels[-1].startswith("lambda + div xi")

    def test_entries_free_of_independent_variables(self, system):
        from liefund.symcore import free_symbols

        for row in system.matrix:
            for entry in row:
                assert not (free_symbols(entry) & set(K.VARIABLES))

    def test_rows_match_elimination_system(self, system):
        for got, want in zip(system.equations(), K.CONSTRAINTS):
            assert same(got, want)

    def test_first_row_literally(self, system):
        assert same(system.equations()[0], 2 * a2 * t0 + a3 * t0**2 + a6)

    def test_printed_fourth_row_differs_by_sign_of_a3_term(self, system):
        diff = K.CONSTRAINT_ROW4_AS_PRINTED - system.equations()[3]
        assert same(diff, -2 * a3 * (2 * t0 - x0**2))

    def test_single_time_translation(self):
        s = build_constraints([K.X["X6"]], [0], K.SOURCE)
        assert [[str(e) for e in row] for row in s.matrix] == [["1"], ["0"], ["0"], ["0"]]

    def test_empty_basis(self):
        s = build_constraints([], [], K.SOURCE)
        assert s.matrix == []
        assert s.equations() == []
        assert solve_constraints(s).dimension == 0


class TestSolveConstraints:
    def test_dimension_four(self, solution):
        assert solution.dimension == 4

    def test_span_matches_corrected_basis(self, solution):
        assert same_span(solution.fields, Y)

    def test_basis_is_exactly_the_closed_form(self, solution):
        for got, want in zip(solution.fields, Y):
            assert got.equals(want), (got.to_text(), want.to_text())

    def test_no_stratification_warnings(self, solution):
        assert solution.warnings == []

    def test_relations(self, solution):
        rel = {s.name: e for s, e in solution.relations}
        assert set(rel) == {"a1", "a6", "a7", "a8"}
        assert same(rel["a6"], -2 * a2 * t0 - a3 * t0**2)
        assert same(rel["a8"], -2 * a2 - a3 * (2 * t0 - x0**2) - 3 * a4 * (y0 - t0 * x0) + a5 * x0)

    def test_defining_conditions_hold_identically(self, solution):
        for Yk in solution.fields:
            lam = check_symmetry(Yk, K.L0)
            assert lam is not None
            assert all(is_zero(r) for r in residual_conditions(Yk, lam, K.SOURCE))

    def test_closure(self, solution):
        structure_constants(solution.fields)

    def test_single_constrained_field(self):
        s = build_constraints([K.X["X6"]], [0], K.SOURCE)
        assert solve_constraints(s).dimension == 0

    def test_zero_matrix_keeps_basis(self):
        basis = [K.X["X6"], K.X["X7"]]
        zero = ConstraintSystem(basis, [[Const(0), Const(0)]], ["trivial"], K.SOURCE)
        sol = solve_constraints(zero)
        assert sol.dimension == 2
        assert same_span(sol.fields, basis)

    def test_admitted_algebra_is_build_then_solve(self, solution):
        direct = admitted_algebra(BASIS, LAMBDAS, K.SOURCE)
        assert same_span(direct.fields, solution.fields)


class TestPrintedY2:
    def test_outside_the_span(self, solution):
        assert not same_span(solution.fields, [K.Y["Y1"], K.Y2_AS_PRINTED, K.Y["Y3"], K.Y["Y4"]])

    def test_violates_divergence_condition_by_four_t0(self):
        lam = check_symmetry(K.Y2_AS_PRINTED, K.L0)
        assert lam is not None  # still a symmetry, just not of the source problem
        residuals = residual_conditions(K.Y2_AS_PRINTED, lam, K.SOURCE)
        assert all(is_zero(r) for r in residuals[:3])
        assert same(residuals[3], 4 * t0)


class TestSameSpan:
    def test_distinct_translations(self):
        assert not same_span([K.X["X6"]], [K.X["X7"]])

    def test_scaling(self):
        assert same_span([K.Y["Y1"]], [K.Y["Y1"].scale(2)])

    def test_parameter_dependent_recombination(self):
        mixed = combine(Y, [Const(1), t0, x0 * y0, Const(0)])
        assert same_span(Y, [mixed, Y[1], Y[2], Y[3]])

    def test_different_dimensions(self):
        assert not same_span(Y, Y[:3])
