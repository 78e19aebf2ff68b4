from fractions import Fraction

import pytest

import props
from liefund import kolmogorov as K
from liefund.parser import (
    Declarations,
    DuplicateDeclarationError,
    ExponentError,
    ParseError,
    PositivityError,
    ProblemError,
    UndeclaredSymbolError,
    bundled_problem_path,
    parse_expression,
    parse_pde,
    parse_problem,
    parse_problem_text,
    parse_vector_field,
)
from liefund.symcore import Const, Power, Product, assume_positive, exp, is_zero

t, x, y = K.VARIABLES
t0, x0, y0 = K.SOURCE

DECL = Declarations.of(list(K.VARIABLES), list(K.SOURCE), [K.C], positive=[K.tau])
BARE = Declarations.of(list(K.VARIABLES), list(K.SOURCE), [K.C])


def same(e1, e2):
    with assume_positive(K.tau):
        return is_zero(e1 - e2)


class TestExpressions:
    def test_product(self):
        assert parse_expression("2*t", DECL) == Product([Const(2), t])

    def test_decimals_are_exact(self):
        e = parse_expression("0.25", DECL)
        assert isinstance(e, Const) and e.value == Fraction(1, 4)
        assert parse_expression("1.125", DECL).value == Fraction(9, 8)

    def test_gaussian_factor(self):
        e = parse_expression("exp(-(x-x0)^2/(4*(t-t0)))", DECL)
        assert same(e, exp(-((x - x0) ** 2) / (4 * K.tau)))

    def test_fractional_power_with_positivity(self):
        e = parse_expression("(t-t0)^(3/2)", DECL)
        assert isinstance(e, Power) and e.exponent == Fraction(3, 2)
        assert same(e, K.tau ** Fraction(3, 2))

    def test_negative_rational_exponent(self):
        assert same(parse_expression("(t-t0)^(-1/2)", DECL), K.tau ** Fraction(-1, 2))

    def test_fractional_power_without_positivity(self):
        with pytest.raises(PositivityError):
            parse_expression("(t-t0)^(3/2)", BARE)

    def test_precedence(self):
        assert same(parse_expression("-x^2", DECL), -(x**2))
        assert same(parse_expression("1 - x - y", DECL), 1 - x - y)
        assert same(parse_expression("x/2/t", DECL), x / (2 * t))

    def test_unicode_accepted(self):
        assert parse_vector_field("∂_t", DECL).equals(K.X["X6"])

    @pytest.mark.parametrize(
        "text, error, col",
        [
            ("2*", ParseError, 3),
            ("q + 1", UndeclaredSymbolError, 1),
            ("t^x", ExponentError, 3),
            ("t^(1/0)", ExponentError, 6),
            ("(t", ParseError, 3),
            ("t $ x", ParseError, 3),
        ],
    )
    def test_errors_carry_location(self, text, error, col):
        with pytest.raises(error) as info:
            parse_expression(text, DECL)
        assert info.value.line == 1
        assert info.value.col == col

    def test_dependent_variable_rejected_in_plain_expressions(self):
        with pytest.raises(UndeclaredSymbolError):
            parse_expression("u + 1", DECL)


class TestVectorFields:
    @pytest.mark.parametrize(
        "text, name",
        [
            ("Dx + t*Dy", "X1"),
            ("2*t*Dt + x*Dx + 3*y*Dy - 2*u*Du", "X2"),
            ("t^2*Dt + (t*x + 3*y)*Dx + 3*t*y*Dy - (2*t + x^2)*u*Du", "X3"),
            ("3*t^2*Dx + t^3*Dy + 3*(y - t*x)*u*Du", "X4"),
            ("2*t*Dx + t^2*Dy - x*u*Du", "X5"),
            ("Dt", "X6"),
            ("Dy", "X7"),
            ("u*Du", "X8"),
        ],
    )
    def test_symmetry_operators(self, text, name):
        assert parse_vector_field(text, DECL).equals(K.X[name])

    def test_component_form(self):
        X = parse_vector_field("xi_x = 2*t; xi_y = t^2; alpha = -x", DECL)
        assert X.equals(K.X["X5"])

    def test_component_form_defaults_to_zero(self):
        assert parse_vector_field("xi_t = 1", DECL).equals(K.X["X6"])

    @pytest.mark.parametrize("text", ["x*Du", "u^2*Du", "u*Dt", "(1 + u)*Du"])
    def test_outside_restricted_form(self, text):
        with pytest.raises(ParseError):
            parse_vector_field(text, DECL)

    def test_source_point_fields(self):
        problem = parse_problem(bundled_problem_path())
        for name, Y in K.Y.items():
            assert problem.expects[name].equals(Y), name


class TestPDE:
    def test_kolmogorov(self):
        L = parse_pde("u_t - u_xx + x*u_y = 0", DECL)
        assert L.to_text() == "u_t - u_xx + x*u_y"
        assert set(L.terms) == set(K.L0.terms)

    def test_right_hand_side_moved_left(self):
        L = parse_pde("u_t = u_xx - x*u_y", DECL)
        assert all(same(L.terms[k], K.L0.terms[k]) for k in K.L0.terms)

    def test_mixed_derivative_suffix_order(self):
        L = parse_pde("u_xt + u_tx = 0", DECL)
        assert list(L.terms) == [(0, 1)]
        assert same(L.terms[(0, 1)], 2)

    def test_order_three_rejected(self):
        with pytest.raises(ParseError, match="order <= 2 supported"):
            parse_pde("u_xxx = 0", DECL)

    def test_nonlinear_rejected(self):
        with pytest.raises(ParseError):
            parse_pde("u*u_x = 0", DECL)


class TestProblemFiles:
    def test_bundled_problem(self):
        p = parse_problem(bundled_problem_path())
        assert list(p.fields) == [f"X{i}" for i in range(1, 9)]
        for name, X in K.X.items():
            assert p.fields[name].equals(X)
        assert p.pde.to_text() == K.L0.to_text()
        assert p.flows == ["Y1", "Y4"]
        assert p.tasks == ["verify-symmetry", "fundsol", "reduce", "verify-kernel", "commutators"]
        assert p.kernel["C0"] == 0

    def test_bundled_reduction_data(self):
        p = parse_problem(bundled_problem_path())
        with p.positivity():
            assert is_zero(p.multiplier - K.ANSATZ_MULTIPLIER)
            assert is_zero(p.omega - K.OMEGA)
            assert is_zero(p.solutions["classical"] - K.CLASSICAL_SOLUTION)
            invariants = {inv.name: inv for inv in p.invariants}
            assert is_zero(invariants["I1"].expr - K.I1)
            assert invariants["I2"].under == ["Y1", "Y4"]

    def test_empty_file(self):
        with pytest.raises(ProblemError, match="no PDE declared"):
            parse_problem_text("")

    def test_comments_only(self):
        with pytest.raises(ProblemError, match="no PDE declared"):
            parse_problem_text("# nothing here\n\n")

    def test_redeclared_variable(self):
        with pytest.raises(ProblemError) as info:
            parse_problem_text("vars: t, x\nvars: t\ndepvar: u\npde: u_t = u_xx\n")
        assert any(isinstance(e, DuplicateDeclarationError) for e in info.value.errors)

    def test_errors_are_aggregated_with_locations(self):
        text = "vars: t, x\ndepvar: u\npde: u_t = u_xx\nfield A: q*Dt\nfield B: x*Du\n"
        with pytest.raises(ProblemError) as info:
            parse_problem_text(text)
        lines = sorted(e.line for e in info.value.errors)
        assert lines == [4, 5]
        assert "4:" in str(info.value) and "5:" in str(info.value)

    def test_continuation_lines(self):
        text = "vars: t, x\ndepvar: u\npde: u_t\n    - u_xx = 0\nfield A: Dt\n"
        p = parse_problem_text(text)
        assert p.pde.to_text() == "u_t - u_xx"

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            parse_problem(tmp_path / "absent.lft")


def test_parser_round_trip():
    props.parser_round_trip()
