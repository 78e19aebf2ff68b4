"""Invariants, ansatz reduction to an ODE and symbolic solution checks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .jet import LinearPDE, VectorField
from .symcore import (
    Const,
    Expression,
    Symbol,
    SymbolKind,
    as_expr,
    differentiate,
    free_symbols,
    is_zero,
    normalize,
    substitute,
    to_text,
)

OMEGA = Symbol("omega")


class ReductionError(ValueError):
    def __init__(self, message, residual: Optional[Expression] = None):
        self.residual = residual
        if residual is not None:
            message = f"{message}: {to_text(residual)}"
        super().__init__(message)


def check_invariant(X: VectorField, invariant, depvar: Symbol = Symbol("u", SymbolKind.PLACEHOLDER)) -> bool:
    """``X I = 0`` with ``X`` acting on functions of the variables and ``u``."""
    return is_zero(X.act(invariant, depvar))


@dataclass(frozen=True)
class Ansatz:
    """``u = multiplier * phi(omega)``."""

    multiplier: Expression
    omega: Expression

    def __post_init__(self):
        object.__setattr__(self, "multiplier", as_expr(self.multiplier))
        object.__setattr__(self, "omega", as_expr(self.omega))
        if is_zero(self.multiplier):
            raise ValueError("the ansatz multiplier must not vanish")
        if any(s.kind is SymbolKind.PLACEHOLDER for s in free_symbols(self.omega)):
            raise ValueError("the similarity variable must not involve the dependent variable")

    def assemble(self, profile) -> Expression:
        """``multiplier * profile(omega)`` as a function of the variables."""
        return normalize(self.multiplier * substitute(profile, {OMEGA: self.omega}))


@dataclass(frozen=True)
class ReducedODE:
    """``c2 phi'' + c1 phi' + c0 phi = 0`` in the variable ``omega``."""

    c2: Expression
    c1: Expression
    c0: Expression

    def coefficients(self):
        return (self.c2, self.c1, self.c0)

    def residual(self, profile) -> Expression:
        p = as_expr(profile)
        d1 = differentiate(p, OMEGA)
        d2 = differentiate(d1, OMEGA)
        return normalize(self.c2 * d2 + self.c1 * d1 + self.c0 * p)

    def is_solution(self, profile) -> bool:
        return is_zero(self.residual(profile))

    def equals(self, c2, c1, c0) -> bool:
        return all(is_zero(a - as_expr(b)) for a, b in zip(self.coefficients(), (c2, c1, c0)))

    def to_text(self, unicode: bool = True) -> str:
        phi, om = ("φ", "ω") if unicode else ("phi", "omega")
        parts = []
        for c, d in zip(self.coefficients(), (phi + "''", phi + "'", phi)):
            c = normalize(c)
            if is_zero(c):
                continue
            s = to_text(c).replace("omega", om)
            if s == "1":
                term = d
            elif s == "-1":
                term = "-" + d
            elif any(ch in s[1:] for ch in "+-"):
                term = f"({s})*{d}"
            else:
                term = f"{s}*{d}"
            parts.append(term)
        out = parts[0] if parts else "0"
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out + " = 0"

    def __str__(self):
        return self.to_text()


def _total_derivative(expansion: dict, v: Symbol, omega_v: Expression) -> dict:
    """``D_v`` of ``sum_k c_k phi^(k)(omega)``."""
    out = {}
    for k, c in expansion.items():
        dc = differentiate(c, v)
        out[k] = out[k] + dc if k in out else dc
        up = c * omega_v
        out[k + 1] = out[k + 1] + up if k + 1 in out else up
    return {k: normalize(c) for k, c in out.items()}


def ansatz_coefficients(L: LinearPDE, a: Ansatz) -> dict:
    """``L(F phi(omega)) / F`` as ``{k: coefficient of phi^(k)}`` in the variables."""
    grads = [differentiate(a.omega, v) for v in L.variables]
    cache = {(): {0: a.multiplier}}

    def expand(idx):
        if idx not in cache:
            i = idx[-1]
            cache[idx] = _total_derivative(expand(idx[:-1]), L.variables[i], grads[i])
        return cache[idx]

    total = {}
    for idx, A in L.terms.items():
        for k, c in expand(idx).items():
            total[k] = total[k] + A * c if k in total else A * c
    return {k: normalize(c / a.multiplier) for k, c in total.items()}


def _inversion(omega: Expression, variables):
    """A variable ``v`` with ``omega`` affine in ``v``, and ``v`` written via ``OMEGA``."""
    for v in reversed(variables):
        slope = differentiate(omega, v)
        if is_zero(slope) or v in free_symbols(slope):
            continue
        offset = normalize(omega - slope * v)
        return v, normalize((OMEGA - offset) / slope)
    return None


def substitute_ansatz(L: LinearPDE, a: Ansatz) -> ReducedODE:
    """Reduce ``L u = 0`` under ``u = F phi(omega)`` to an ODE in ``omega``.

    The coefficients are divided by the coefficient of ``phi''`` and then
    rewritten in ``omega`` by solving ``omega`` for a variable it is affine
    in.  Any remaining dependence on the independent variables is a
    reduction failure.
    """
    coeffs = ansatz_coefficients(L, a)
    order = max((k for k, c in coeffs.items() if not is_zero(c)), default=None)
    if order is None:
        raise ReductionError("the ansatz solves the equation identically for every profile")
    if order != 2:
        raise ReductionError(f"reduced equation has order {order}, expected 2", coeffs.get(order))
    lead = coeffs[2]
    ratios = [normalize(coeffs.get(k, Const(0)) / lead) for k in (2, 1, 0)]
    inv = _inversion(a.omega, L.variables)
    if inv is None:
        raise ReductionError("the similarity variable is not affine in any independent variable")
    v, v_of_omega = inv
    out = []
    for k, r in zip((2, 1, 0), ratios):
        c = substitute(r, {v: v_of_omega})
        stray = [s for s in free_symbols(c) if s in L.variables]
        if stray:
            names = ", ".join(sorted(s.name for s in stray))
            raise ReductionError(f"coefficient of phi^({k}) is not a function of omega alone (depends on {names})", c)
        out.append(c)
    return ReducedODE(*out)


def verify_solution(L: LinearPDE, u) -> bool:
    return is_zero(L.apply(u))


@dataclass(frozen=True)
class StepFactor:
    """Piecewise-constant factor in time: ``before`` for t < jump, ``after`` beyond."""

    before: Expression
    after: Expression
    jump: Expression

    def __post_init__(self):
        for name in ("before", "after", "jump"):
            object.__setattr__(self, name, as_expr(getattr(self, name)))

    @classmethod
    def heaviside(cls, c1, c0, jump):
        """``c1 * theta(t - jump) + c0``."""
        c1, c0 = as_expr(c1), as_expr(c0)
        return cls(c0, c1 + c0, jump)

    @classmethod
    def constant(cls, c, jump=Const(0)):
        return cls(c, c, jump)


class UnsupportedFactorError(ValueError):
    pass


def weak_factor_check(fields, h: StepFactor, time_index: int = 0) -> bool:
    """Whether ``Y h = 0`` for every field, in the sense of distributions.

    ``h`` depends on time only, so ``Y h = xi_t (after - before) delta(t - jump)``,
    which vanishes iff ``(after - before) * xi_t`` is zero at ``t = jump``
    (the rule ``(t - t0) delta(t - t0) = 0``).
    """
    fields = [fields] if isinstance(fields, VectorField) else list(fields)
    if not fields:
        return True
    variables = fields[0].variables
    for part in (h.before, h.after, h.jump):
        if any(s in variables for s in free_symbols(part)):
            raise UnsupportedFactorError("step factor values and jump must be free of the independent variables")
    jump = normalize(h.after - h.before)
    if is_zero(jump):
        return True
    t = variables[time_index]
    for Y in fields:
        at_jump = substitute(Y.xi[time_index], {t: h.jump})
        if not is_zero(jump * at_jump):
            return False
    return True
