"""Prolongation, the infinitesimal invariance test and commutators.

Vector fields are restricted to the form ``xi^i(x) d/dx^i + alpha(x) u d/du``.
Jet coordinates ``u_alpha`` are indexed by sorted tuples of variable
positions, so ``u_xt`` and ``u_tx`` share the index ``(0, 1)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import linalg
from .symcore import (
    Const,
    Expression,
    Symbol,
    SymbolKind,
    as_expr,
    diff_any,
    differentiate,
    free_symbols,
    is_zero,
    normalize,
    to_text,
)

log = logging.getLogger(__name__)

MAX_ORDER = 2


class JetError(ValueError):
    pass


def canonical_index(idx) -> tuple:
    return tuple(sorted(idx))


def index_name(idx, variables, depvar: str = "u") -> str:
    if not idx:
        return depvar
    return depvar + "_" + "".join(variables[i].name for i in idx)


def jet_symbol(idx, variables, depvar: str = "u") -> Symbol:
    return Symbol(index_name(canonical_index(idx), variables, depvar), SymbolKind.PLACEHOLDER)


def _check_jet_free(e: Expression, what: str):
    bad = [s.name for s in free_symbols(e) if s.kind is SymbolKind.PLACEHOLDER]
    if bad:
        raise JetError(f"{what} must not contain the dependent variable or jet symbols: {sorted(bad)}")


@dataclass(frozen=True, eq=False)
class VectorField:
    """``sum_i xi[i] d/dvariables[i] + alpha * u d/du``."""

    variables: tuple
    xi: tuple
    alpha: Expression = Const(0)
    name: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "xi", tuple(as_expr(c) for c in self.xi))
        object.__setattr__(self, "alpha", as_expr(self.alpha))
        if len(self.xi) != len(self.variables):
            raise JetError("one xi coefficient per independent variable is required")
        for c in self.components():
            _check_jet_free(c, "vector field coefficients")

    @classmethod
    def zero(cls, variables, name=None):
        return cls(variables, [Const(0)] * len(variables), Const(0), name)

    def components(self) -> list:
        return list(self.xi) + [self.alpha]

    def named(self, name):
        return VectorField(self.variables, self.xi, self.alpha, name)

    def normalized(self) -> "VectorField":
        return VectorField(self.variables, [normalize(c) for c in self.xi], normalize(self.alpha), self.name)

    def __call__(self, f) -> Expression:
        """First-order part applied to a function of the independent variables."""
        f = as_expr(f)
        acc = Const(0)
        for c, v in zip(self.xi, self.variables):
            if not is_zero(c):
                acc = acc + c * differentiate(f, v)
        return normalize(acc)

    def act(self, f, depvar: Symbol) -> Expression:
        """Full action ``xi . grad f + alpha u df/du`` on ``f(x, u)``."""
        f = as_expr(f)
        return normalize(self(f) + self.alpha * depvar * diff_any(f, depvar))

    def _combine(self, other, s):
        if self.variables != other.variables:
            raise JetError("vector fields over different variables")
        return VectorField(
            self.variables,
            [normalize(a + s * b) for a, b in zip(self.xi, other.xi)],
            normalize(self.alpha + s * other.alpha),
        )

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "VectorField":
        c = as_expr(c)
        return VectorField(self.variables, [normalize(c * a) for a in self.xi], normalize(c * self.alpha))

    __rmul__ = scale

    def is_zero(self) -> bool:
        return all(is_zero(c) for c in self.components())

    def equals(self, other) -> bool:
        return (self - other).is_zero()

    def to_text(self, depvar: str = "u", unicode: bool = True) -> str:
        return operator_text(self, depvar, unicode)

    def __str__(self):
        return self.to_text()


def operator_text(X: VectorField, depvar: str = "u", unicode: bool = True) -> str:
    """Render as an operator sum, e.g. ``2*t*∂_t + x*∂_x - 2*u*∂_u``."""
    d = "∂_" if unicode else "D"
    parts = []
    pairs = [(c, d + v.name) for c, v in zip(X.xi, X.variables)]
    pairs.append((X.alpha, f"{depvar}*{d}{depvar}"))
    for c, op in pairs:
        c = normalize(c)
        if is_zero(c):
            continue
        s = to_text(c)
        if s == "1":
            term = op
        elif s == "-1":
            term = "-" + op
        else:
            simple = all(ch not in s[1:] for ch in "+-") or (s.startswith("(") and s.endswith(")"))
            term = f"{s}*{op}" if simple else f"({s})*{op}"
        parts.append(term)
    if not parts:
        return "0"
    out = parts[0]
    for p in parts[1:]:
        out += " - " + p[1:] if p.startswith("-") else " + " + p
    return out


@dataclass(frozen=True)
class LinearPDE:
    """``L u = sum A_alpha D^alpha u`` with multi-indices over ``variables``."""

    variables: tuple
    terms: dict
    depvar: str = "u"

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        terms = {}
        for idx, coeff in self.terms.items():
            idx = canonical_index(idx)
            coeff = as_expr(coeff)
            _check_jet_free(coeff, "PDE coefficients")
            if any(i < 0 or i >= len(self.variables) for i in idx):
                raise JetError(f"multi-index {idx} out of range")
            terms[idx] = normalize(terms[idx] + coeff) if idx in terms else coeff
        if not terms:
            raise JetError("a PDE needs at least one term")
        object.__setattr__(self, "terms", terms)

    @property
    def m(self) -> int:
        return len(self.variables)

    @property
    def order(self) -> int:
        return max(len(i) for i in self.terms)

    def apply(self, u) -> Expression:
        """``L u`` for an explicit function ``u`` of the independent variables."""
        u = as_expr(u)
        acc = Const(0)
        cache = {(): u}
        for idx in sorted(self.terms, key=len):
            d = cache.get(idx)
            if d is None:
                d = u
                for i in idx:
                    d = differentiate(d, self.variables[i])
                cache[idx] = d
            acc = acc + self.terms[idx] * d
        return normalize(acc)

    def as_jet(self) -> "LinearJetExpression":
        return LinearJetExpression(self.terms)

    def to_text(self) -> str:
        return self.as_jet().to_text(self.variables, self.depvar)

    def __hash__(self):
        return hash((self.variables, tuple(sorted(self.terms.items()))))


class LinearJetExpression:
    """``sum_alpha c_alpha u_alpha`` with coefficients free of jet symbols."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        out = {}
        for idx, c in (coeffs or {}).items():
            c = normalize(c)
            if not is_zero(c):
                out[canonical_index(idx)] = c
        self.coeffs = out

    def __getitem__(self, idx) -> Expression:
        return self.coeffs.get(canonical_index(idx), Const(0))

    def indices(self):
        return set(self.coeffs)

    def __add__(self, other: "LinearJetExpression") -> "LinearJetExpression":
        out = dict(self.coeffs)
        for idx, c in other.coeffs.items():
            out[idx] = out[idx] + c if idx in out else c
        return LinearJetExpression(out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c) -> "LinearJetExpression":
        c = as_expr(c)
        return LinearJetExpression({i: c * v for i, v in self.coeffs.items()})

    def total_derivative(self, i: int, variables) -> "LinearJetExpression":
        v = variables[i]
        out = {}
        for idx, c in self.coeffs.items():
            dc = differentiate(c, v)
            out[idx] = out[idx] + dc if idx in out else dc
            up = canonical_index(idx + (i,))
            out[up] = out[up] + c if up in out else c
        return LinearJetExpression(out)

    def is_zero(self) -> bool:
        return not self.coeffs

    def to_text(self, variables, depvar: str = "u") -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for idx in self.coeffs:
            s = to_text(self.coeffs[idx])
            name = index_name(idx, variables, depvar)
            if s == "1":
                parts.append(name)
            elif s == "-1":
                parts.append("-" + name)
            elif any(ch in s[1:] for ch in "+-"):
                parts.append(f"({s})*{name}")
            else:
                parts.append(f"{s}*{name}")
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self):
        return f"LinearJetExpression({ {k: str(v) for k, v in self.coeffs.items()} })"


def prolong_apply(X: VectorField, L: LinearPDE) -> LinearJetExpression:
    """Order-p prolongation of ``X`` applied to ``L u``.

    With the characteristic ``Q = alpha u - sum xi^i u_i`` the prolonged
    coefficient is ``phi^alpha = D^alpha Q + sum_i xi^i u_{alpha i}``.
    """
    if L.order > MAX_ORDER:
        raise JetError(f"order {L.order} PDEs are not supported (order <= {MAX_ORDER})")
    if X.variables != L.variables:
        raise JetError("vector field and PDE use different variables")
    m = L.m
    q = {(): X.alpha}
    for i in range(m):
        q[(i,)] = -X.xi[i]
    Q = LinearJetExpression(q)
    derivs = {(): Q}

    def d_alpha(idx):
        if idx not in derivs:
            derivs[idx] = d_alpha(idx[:-1]).total_derivative(idx[-1], L.variables)
        return derivs[idx]

    result = LinearJetExpression()
    for idx, A in L.terms.items():
        own = {idx: X(A)}
        shift = {canonical_index(idx + (i,)): X.xi[i] for i in range(m)}
        phi = d_alpha(idx) + LinearJetExpression(shift)
        result = result + LinearJetExpression(own) + phi.scale(A)
    return result


@dataclass
class SymmetryCheck:
    multiplier: Optional[Expression]
    remainder: LinearJetExpression
    pivot: tuple
    prolonged: LinearJetExpression = field(repr=False, default=None)

    @property
    def is_symmetry(self) -> bool:
        return self.multiplier is not None


def _choose_pivot(L: LinearPDE):
    items = [(i, c) for i, c in L.terms.items() if not is_zero(c)]
    consts = [(i, c) for i, c in items if c.normal_form().is_constant()]
    for i, c in sorted(consts):
        if len(i) == 1:
            return i
    if consts:
        return sorted(consts)[0][0]
    return sorted(items)[0][0]


def analyze_symmetry(X: VectorField, L: LinearPDE, pivot=None) -> SymmetryCheck:
    E = prolong_apply(X, L)
    pivot = canonical_index(pivot) if pivot is not None else _choose_pivot(L)
    lam = normalize(E[pivot] / L.terms[pivot])
    remainder = E - L.as_jet().scale(lam)
    if remainder.is_zero():
        return SymmetryCheck(lam, remainder, pivot, E)
    return SymmetryCheck(None, remainder, pivot, E)


def check_symmetry(X: VectorField, L: LinearPDE, pivot=None) -> Optional[Expression]:
    """The multiplier lambda with ``X_p(Lu) = lambda Lu``, or None."""
    return analyze_symmetry(X, L, pivot).multiplier


def commutator(X: VectorField, Y: VectorField) -> VectorField:
    if X.variables != Y.variables:
        raise JetError("vector fields over different variables")
    xi = [normalize(X(b) - Y(a)) for a, b in zip(X.xi, Y.xi)]
    alpha = normalize(X(Y.alpha) - Y(X.alpha))
    return VectorField(X.variables, xi, alpha)


class ClosureError(JetError):
    def __init__(self, i, j, remainder: VectorField, names, suggestions=()):
        self.pair = (i, j)
        self.remainder = remainder
        self.suggestions = list(suggestions)
        msg = f"[{names[i]}, {names[j]}] = {remainder.to_text()} leaves the span of the basis"
        if self.suggestions:
            msg += f"; adding {', '.join(self.suggestions)} would contain it"
        super().__init__(msg)


def _as_number(n):
    return n.constant() if n.is_constant() else n.to_expression()


def structure_constants(basis, candidates=None):
    """``c[i][j][k]`` with ``[X_i, X_j] = sum_k c[i][j][k] X_k``.

    Entries are Fractions; they stay Expressions only when a commutator
    coefficient depends on source parameters.  Raises :class:`ClosureError`
    if a commutator leaves the span; ``candidates`` (a dict name ->
    field) is searched for fields that would restore closure.
    """
    n = len(basis)
    names = [b.name or f"#{k}" for k, b in enumerate(basis)]
    if n == 0:
        return []
    variables = basis[0].variables
    M = linalg.coefficient_rows([b.components() for b in basis], variables)
    table = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            C = commutator(basis[i], basis[j])
            if C.is_zero():
                continue
            full = linalg.coefficient_rows([b.components() for b in basis] + [C.components()], variables)
            sol = linalg.solve([r[:n] for r in full], [r[n] for r in full])
            if sol is None:
                remainder = C
                suggestions = []
                for cname, cand in (candidates or {}).items():
                    ext = linalg.coefficient_rows(
                        [b.components() for b in basis] + [cand.components(), C.components()], variables
                    )
                    if linalg.solve([r[: n + 1] for r in ext], [r[n + 1] for r in ext]) is not None:
                        suggestions.append(cname)
                raise ClosureError(i, j, remainder, names, suggestions)
            for k in range(n):
                v = _as_number(sol[k])
                table[i][j][k] = v
                table[j][i][k] = -v if not isinstance(v, Expression) else normalize(-v)
    del M
    return table
