from fractions import Fraction

import pytest

import props
from liefund import kolmogorov as K
from liefund.jet import (
    ClosureError,
    JetError,
    LinearJetExpression,
    LinearPDE,
    VectorField,
    analyze_symmetry,
    check_symmetry,
    commutator,
    prolong_apply,
    structure_constants,
)
from liefund.symcore import is_zero

V = K.VARIABLES
X = K.X
t, x, y = V


def same(e1, e2):
    return is_zero(e1 - e2)


def jet_equals(E: LinearJetExpression, target: dict):
    keys = set(E.coeffs) | set(target)
    return all(same(E.coeffs.get(k, 0), target.get(k, 0)) for k in keys)


class TestVectorField:
    def test_rejects_dependent_variable_in_coefficients(self):
        with pytest.raises(JetError):
            VectorField(V, (K.u, 0, 0), 0)

    def test_arity_must_match(self):
        with pytest.raises((JetError, ValueError)):
            VectorField(V, (1, 0), 0)

    def test_operator_text(self):
        assert X["X5"].to_text() == "2*t*∂_x + t^2*∂_y - x*u*∂_u"

    def test_acts_on_functions(self):
        assert same(X["X2"](x * y), 4 * x * y)
        assert same(X["X8"].act(K.u, K.u), K.u)

    def test_arithmetic(self):
        assert (X["X1"] - X["X1"]).is_zero()
        assert (X["X6"].scale(2) + X["X6"].scale(-2)).is_zero()
        assert (X["X6"] + X["X7"]).equals(VectorField(V, (1, 0, 1), 0))


class TestLinearPDE:
    def test_kolmogorov_operator(self):
        assert K.L0.order == 2
        assert K.L0.m == 3
        assert K.L0.to_text() == "u_t - u_xx + x*u_y"

    def test_apply(self):
        assert same(K.L0.apply(y), x)
        assert is_zero(K.L0.apply(x))

    def test_mixed_partials_stored_canonically(self):
        L = LinearPDE(V, {(2, 1): 1})
        assert (1, 2) in L.terms


class TestProlongation:
    def test_time_translation_annihilates_the_operator(self):
        assert jet_equals(prolong_apply(X["X6"], K.L0), {})

    def test_scaling_gives_minus_four_times_the_operator(self):
        E = prolong_apply(X["X2"], K.L0)
        assert jet_equals(E, {k: -4 * c for k, c in K.L0.terms.items()})

    def test_galilean_field_has_zero_multiplier(self):
        assert jet_equals(prolong_apply(X["X1"], K.L0), {})

    def test_order_above_two_rejected(self):
        with pytest.raises(JetError, match="order"):
            prolong_apply(X["X1"], LinearPDE(V, {(1, 1, 1): 1}))

    def test_first_order_pde(self):
        # transport u_t + u_x: shift fields are symmetries, dilation in x alone is not
        L = LinearPDE(V, {(0,): 1, (1,): 1})
        assert same(check_symmetry(VectorField(V, (1, 1, 0), 0), L), 0)
        assert check_symmetry(VectorField(V, (0, x, 0), 0), L) is None


class TestCheckSymmetry:
    @pytest.mark.parametrize("name", list(X))
    def test_every_basis_field(self, name):
        lam = check_symmetry(X[name], K.L0)
        assert lam is not None
        assert same(lam, K.LAMBDA[name])

    def test_named_examples(self):
        assert same(check_symmetry(X["X5"], K.L0), -x)
        assert same(check_symmetry(X["X3"], K.L0), -(4 * t + x**2))

    def test_general_element(self):
        general = sum((X[n].scale(a) for n, a in zip(X, K.a)), VectorField.zero(V))
        lam = check_symmetry(general, K.L0)
        assert lam is not None
        assert same(lam, K.GENERAL_LAMBDA)

    def test_non_symmetry_reports_unmatched_u_y(self):
        d_x = VectorField(V, (0, 1, 0), 0)
        assert check_symmetry(d_x, K.L0) is None
        report = analyze_symmetry(d_x, K.L0)
        assert report.multiplier is None
        assert set(report.remainder.coeffs) == {(2,)}
        assert same(report.remainder.coeffs[(2,)], 1)

    def test_prefers_constant_first_order_pivot(self):
        assert analyze_symmetry(X["X2"], K.L0).pivot == (0,)

    @pytest.mark.parametrize("pivot", [(0,), (1, 1), (2,)])
    def test_explicit_pivots(self, pivot):
        assert same(check_symmetry(X["X4"], K.L0, pivot=pivot), K.LAMBDA["X4"])

    def test_source_point_fields_are_symmetries(self):
        with_lam = {n: check_symmetry(Y, K.L0) for n, Y in K.Y.items()}
        assert all(lam is not None for lam in with_lam.values())


class TestCommutator:
    def test_examples(self):
        assert commutator(X["X6"], X["X1"]).equals(X["X7"])
        assert commutator(X["X1"], X["X5"]).equals(-X["X8"])

    @pytest.mark.parametrize("name", list(X))
    def test_self_bracket_vanishes(self, name):
        assert commutator(X[name], X[name]).is_zero()

    def test_bracket_of_symmetries_is_symmetry(self):
        Z = commutator(X["X3"], X["X4"])
        assert check_symmetry(Z, K.L0) is not None


class TestStructureConstants:
    def test_full_algebra_closes(self):
        basis = list(X.values())
        c = structure_constants(basis)
        assert len(c) == 8 and all(len(row) == 8 for row in c)
        for i, Xi in enumerate(basis):
            for j, Xj in enumerate(basis):
                rebuilt = sum((basis[k].scale(c[i][j][k]) for k in range(8)), VectorField.zero(V))
                assert (commutator(Xi, Xj) - rebuilt).is_zero()

    def test_known_entry(self):
        c = structure_constants(list(X.values()))
        assert c[0][4] == [0, 0, 0, 0, 0, 0, 0, -1]
        assert all(isinstance(v, Fraction) for v in c[0][4])

    def test_single_field(self):
        assert structure_constants([X["X6"]]) == [[[0]]]

    def test_closure_failure_names_missing_field(self):
        with pytest.raises(ClosureError) as info:
            structure_constants([X["X1"], X["X5"]], candidates=X)
        assert info.value.pair == (0, 1)
        assert info.value.suggestions == ["X8"]
        assert "X8" in str(info.value)

    def test_source_point_algebra_closes(self):
        c = structure_constants(list(K.Y.values()))
        assert c[0][3] == [0, 0, 0, 1]  # [Y1, Y4] = Y4


# ---------------------------------------------------------------- properties


def test_commutator_antisymmetry():
    props.commutator_antisymmetry()


def test_jacobi_identity():
    props.jacobi_identity()


def test_multiplier_linearity():
    props.multiplier_linearity()


def test_pivot_independence():
    props.pivot_independence()
