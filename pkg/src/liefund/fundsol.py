"""Point constraints at the source and the resulting sub-algebra.

For the general element ``X = sum a_i X_i`` the fields admitted by the
delta-forced equation satisfy ``xi(x0) = 0`` and ``lambda(x0) + div xi(x0) = 0``.
Both are linear in the ``a_i``, so the admitted sub-algebra is the exact
nullspace of a small matrix over rational functions of the source point.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from . import linalg
from .jet import VectorField
from .symcore import (
    Const,
    Symbol,
    SymbolKind,
    as_expr,
    differentiate,
    is_zero,
    normalize,
    substitute,
)

log = logging.getLogger(__name__)


@dataclass
class ConstraintSystem:
    basis: list
    matrix: list  # rows of Expressions, one column per basis field
    row_labels: list
    source: tuple

    @property
    def columns(self) -> list:
        return [Symbol(f"a{i + 1}", SymbolKind.CONSTANT) for i in range(len(self.basis))]

    def equations(self) -> list:
        """Each row as ``sum_i entry * a_i``."""
        cols = self.columns
        out = []
        for row in self.matrix:
            acc = Const(0)
            for c, a in zip(row, cols):
                acc = acc + c * a
            out.append(normalize(acc))
        return out


def _at_source(e, variables, source):
    return substitute(e, dict(zip(variables, source)))


def build_constraints(basis, lambdas, source) -> ConstraintSystem:
    if not basis:
        return ConstraintSystem([], [], [], tuple(source))
    variables = basis[0].variables
    if len(source) != len(variables):
        raise ValueError("one source parameter per independent variable is required")
    lambdas = [as_expr(l) for l in lambdas]
    rows = []
    labels = []
    for j, v in enumerate(variables):
        rows.append([_at_source(X.xi[j], variables, source) for X in basis])
        labels.append(f"xi_{v.name}({', '.join(s.name for s in source)}) = 0")
    last = []
    for X, lam in zip(basis, lambdas):
        div = Const(0)
        for c, v in zip(X.xi, variables):
            div = div + differentiate(c, v)
        last.append(_at_source(lam + div, variables, source))
    rows.append(last)
    labels.append("lambda + div xi = 0 at the source")
    return ConstraintSystem(list(basis), rows, labels, tuple(source))


@dataclass
class Solution:
    fields: list
    vectors: list  # coefficient vectors over the input basis (Expressions)
    relations: list  # (column symbol, Expression in the free columns)
    warnings: list = field(default_factory=list)

    @property
    def dimension(self) -> int:
        return len(self.fields)


def combine(basis, coeffs, name=None) -> VectorField:
    variables = basis[0].variables
    xi = [Const(0)] * len(variables)
    alpha = Const(0)
    for X, c in zip(basis, coeffs):
        if is_zero(c):
            continue
        xi = [acc + c * comp for acc, comp in zip(xi, X.xi)]
        alpha = alpha + c * X.alpha
    return VectorField(variables, [normalize(e) for e in xi], normalize(alpha), name)


def solve_constraints(system: ConstraintSystem) -> Solution:
    n = len(system.basis)
    if n == 0:
        return Solution([], [], [], ["empty basis: nothing to constrain"])
    matrix = [[as_expr(e).normal_form() for e in row] for row in system.matrix]
    matrix = [row for row in matrix if any(not e.is_zero() for e in row)]
    vectors, ech = linalg.nullspace(matrix, n)
    vectors = [[v.to_expression() for v in vec] for vec in vectors]

    def first_nonzero(vec):
        return next(i for i, v in enumerate(vec) if not is_zero(v))

    vectors.sort(key=first_nonzero)
    fields = [combine(system.basis, vec, f"Y{k + 1}") for k, vec in enumerate(vectors)]

    cols = system.columns
    relations = []
    for i, j in sorted(ech.pivots, key=lambda p: p[1]):
        row = ech.rows[i]
        rhs = Const(0)
        for f in range(n):
            if f != j and not row[f].is_zero():
                rhs = rhs - (row[f] / row[j]).to_expression() * cols[f]
        relations.append((cols[j], normalize(rhs)))
    for w in ech.warnings:
        log.warning(w)
    return Solution(fields, vectors, relations, list(ech.warnings))


def admitted_algebra(basis, lambdas, source) -> Solution:
    return solve_constraints(build_constraints(basis, lambdas, source))


def _rank(fields, variables) -> int:
    if not fields:
        return 0
    return linalg.rank(linalg.coefficient_rows([f.components() for f in fields], variables))


def same_span(A, B) -> bool:
    """Equal spans over rational functions of everything but the variables."""
    if not A and not B:
        return True
    variables = (A or B)[0].variables
    ra, rb = _rank(A, variables), _rank(B, variables)
    return ra == rb == _rank(list(A) + list(B), variables)


def residual_conditions(X: VectorField, lam, source) -> list:
    """``[xi^j(x0)...] + [lambda(x0) + div xi(x0)]``; all zero for admitted fields."""
    return [row[0] for row in build_constraints([X], [lam], source).matrix]
