"""Hypothesis strategies and property checks shared by the unit and acceptance suites."""

from __future__ import annotations

import math
from fractions import Fraction

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from liefund import kolmogorov as K
from liefund.fundsol import combine
from liefund.jet import check_symmetry, commutator
from liefund.parser import Declarations, parse_expression
from liefund.reduce import check_invariant
from liefund.symcore import (
    Const,
    EvaluationError,
    Power,
    Symbol,
    SymbolKind,
    assume_positive,
    differentiate,
    eval_numeric,
    exp,
    is_zero,
    normalize,
    to_text,
)

CASES = 200
PROPERTY = settings(max_examples=CASES, deadline=None, suppress_health_check=[HealthCheck.too_slow])

t, x, y = K.t, K.x, K.y
A, B = Symbol("a", SymbolKind.CONSTANT), Symbol("b", SymbolKind.CONSTANT)
VARS = (t, x, y)
DECL = Declarations.of([t, x, y], [K.t0], [A, B], positive=[t])

small = st.fractions(min_value=-3, max_value=3, max_denominator=4)


def _leaf():
    return st.one_of(st.sampled_from([t, x, y, A, B]), small.map(Const))


def _poly(depth=2):
    if depth == 0:
        return _leaf()
    sub = _poly(depth - 1)
    return st.one_of(
        _leaf(),
        st.tuples(sub, sub).map(lambda p: p[0] + p[1]),
        st.tuples(sub, sub).map(lambda p: p[0] * p[1]),
        st.tuples(sub, st.integers(0, 3)).map(lambda p: Power(p[0], p[1])),
    )


# Denominators and exponents stay bounded on the sampling box, so numeric checks are well conditioned.
_DENOMS = [1 + x**2, 1 + y**2 + x**2, t, 2 + t * x**2]
_EXP_ARGS = st.tuples(small, small, st.sampled_from([x, y, t, x * y, x**2, t * x])).map(
    lambda p: Const(p[0] / 2) + Const(p[1] / 3) * p[2]
)


def _factor():
    return st.one_of(
        _poly(2),
        st.tuples(_poly(1), st.sampled_from(_DENOMS)).map(lambda p: p[0] / p[1]),
        _EXP_ARGS.map(exp),
        st.sampled_from([Power(t, Fraction(1, 2)), Power(t, Fraction(3, 2)), Power(t, Fraction(-1, 2))]),
    )


expressions = st.one_of(
    _factor(),
    st.tuples(_factor(), _factor()).map(lambda p: p[0] * p[1]),
    st.tuples(_factor(), _factor(), _factor()).map(lambda p: p[0] * p[1] + p[2]),
)

variables = st.sampled_from(VARS)
points = st.fixed_dictionaries({
    "t": st.floats(0.5, 2.0),
    "x": st.floats(-1.0, 1.0),
    "y": st.floats(-1.0, 1.0),
    "a": st.floats(-1.0, 1.0),
    "b": st.floats(-1.0, 1.0),
})


def positivity():
    return assume_positive(t)


# ------------------------------------------------------------------ symcore


@PROPERTY
@given(expressions, expressions, small, small, variables)
def linearity(e1, e2, ca, cb, v):
    with positivity():
        lhs = differentiate(A * e1 + B * e2 + ca * e1 + cb * e2, v)
        rhs = (A + ca) * differentiate(e1, v) + (B + cb) * differentiate(e2, v)
        assert is_zero(lhs - rhs)


@PROPERTY
@given(expressions, expressions, variables)
def leibniz(e1, e2, v):
    with positivity():
        d = differentiate(e1 * e2, v) - e1 * differentiate(e2, v) - e2 * differentiate(e1, v)
        assert is_zero(d)


@PROPERTY
@given(expressions, variables, variables)
def clairaut(e, v1, v2):
    with positivity():
        assert is_zero(differentiate(differentiate(e, v1), v2) - differentiate(differentiate(e, v2), v1))


@PROPERTY
@given(expressions, variables, points)
def derivative_matches_finite_difference(e, v, pt):
    with positivity():
        d = differentiate(e, v)
    h = 1e-5
    try:
        value = eval_numeric(d, pt)
        hi = eval_numeric(e, {**pt, v.name: pt[v.name] + h})
        lo = eval_numeric(e, {**pt, v.name: pt[v.name] - h})
    except EvaluationError:
        return
    fd = (hi - lo) / (2 * h)
    assert math.isfinite(value)
    assert abs(value - fd) <= 1e-6 * (1 + abs(value))


@PROPERTY
@given(expressions)
def normalize_idempotent(e):
    with positivity():
        once = normalize(e)
        assert normalize(once) == once


# ------------------------------------------------------------------- parser


@PROPERTY
@given(expressions, st.booleans())
def parser_round_trip(e, canonical):
    with positivity():
        src = normalize(e) if canonical else e
        back = parse_expression(to_text(src), DECL)
        assert is_zero(back - e)


# ---------------------------------------------------------------------- jet

X_NAMES = list(K.X)
coeff_vectors = st.lists(st.integers(-3, 3), min_size=8, max_size=8)


def element(coeffs):
    return combine([K.X[n] for n in X_NAMES], [Const(c) for c in coeffs])


@PROPERTY
@given(coeff_vectors, coeff_vectors)
def commutator_antisymmetry(c1, c2):
    X, Y = element(c1), element(c2)
    assert (commutator(X, Y) + commutator(Y, X)).is_zero()


@PROPERTY
@given(coeff_vectors, coeff_vectors, coeff_vectors)
def jacobi_identity(c1, c2, c3):
    X, Y, Z = element(c1), element(c2), element(c3)
    total = commutator(X, commutator(Y, Z)) + commutator(Y, commutator(Z, X)) + commutator(Z, commutator(X, Y))
    assert total.is_zero()


@PROPERTY
@given(coeff_vectors, coeff_vectors, small)
def multiplier_linearity(c1, c2, c):
    X, Y = element(c1), element(c2)
    lx, ly = check_symmetry(X, K.L0), check_symmetry(Y, K.L0)
    lxy = check_symmetry(X + Y.scale(c), K.L0)
    assert lx is not None and ly is not None and lxy is not None
    assert is_zero(lxy - (lx + c * ly))


@PROPERTY
@given(coeff_vectors)
def pivot_independence(c):
    X = element(c)
    lams = [check_symmetry(X, K.L0, pivot=p) for p in K.L0.terms]
    assert all(lam is not None for lam in lams)
    assert all(is_zero(lam - lams[0]) for lam in lams[1:])


# ------------------------------------------------------------------- reduce

exponents = st.tuples(st.integers(0, 2), st.integers(0, 3), small)


@settings(max_examples=CASES, deadline=None)
@given(st.lists(exponents, min_size=1, max_size=3))
def invariant_combinations(terms):
    """Polynomials in the two invariants are again invariant."""
    combo = Const(0)
    for k1, k2, c in terms:
        combo = combo + c * Power(K.I1, k1) * Power(K.I2, k2)
    with assume_positive(K.tau):
        assert check_invariant(K.Y["Y1"], combo)
        assert check_invariant(K.Y["Y4"], combo)


ALL = {
    "linearity": linearity,
    "leibniz": leibniz,
    "clairaut": clairaut,
    "finite-difference consistency": derivative_matches_finite_difference,
    "normalize idempotence": normalize_idempotent,
    "parser round trip": parser_round_trip,
    "commutator antisymmetry": commutator_antisymmetry,
    "Jacobi identity": jacobi_identity,
}
