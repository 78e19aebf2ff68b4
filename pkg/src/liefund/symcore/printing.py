"""Plain-text rendering that the parser reads back."""

from __future__ import annotations

from fractions import Fraction

from .expr import Const, Exp, Expression, Power, Product, Sum, Symbol

_SUM, _PROD, _POW, _ATOM = 1, 2, 3, 4


def _frac_text(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _exponent_text(q: Fraction) -> str:
    if q.denominator == 1 and q >= 0:
        return str(q.numerator)
    return f"({_frac_text(q)})"


def _prec(e: Expression) -> int:
    if isinstance(e, Sum):
        return _SUM
    if isinstance(e, Product):
        return _PROD
    if isinstance(e, Const):
        if e.value < 0 or e.value.denominator != 1:
            return _PROD
        return _ATOM
    if isinstance(e, Power):
        return _POW
    return _ATOM


def _wrap(e: Expression, min_prec: int) -> str:
    s = to_text(e)
    return f"({s})" if _prec(e) < min_prec else s


def _product_text(factors) -> str:
    sign = ""
    factors = list(factors)
    if factors and isinstance(factors[0], Const) and factors[0].value < 0:
        c = -factors[0].value
        sign = "-"
        factors = factors[1:] if c == 1 and len(factors) > 1 else [Const(c)] + factors[1:]
    num, den = [], []
    for i, f in enumerate(factors):
        if isinstance(f, Power) and f.exponent < 0 and num:
            inv = f.base if f.exponent == -1 else Power(f.base, -f.exponent)
            den.append(_wrap(inv, _POW if isinstance(inv, Power) else _ATOM))
        elif isinstance(f, Const) and i == 0:
            num.append(_frac_text(f.value))
        else:
            num.append(_wrap(f, _POW if not isinstance(f, Product) else _ATOM))
    text = "*".join(num)
    for d in den:
        text += "/" + d
    return sign + text


def to_text(e: Expression) -> str:
    if isinstance(e, Const):
        return _frac_text(e.value)
    if isinstance(e, Symbol):
        return e.name
    if isinstance(e, Exp):
        return f"exp({to_text(e.arg)})"
    if isinstance(e, Power):
        return f"{_wrap(e.base, _ATOM)}^{_exponent_text(e.exponent)}"
    if isinstance(e, Product):
        return _product_text(e.factors)
    if isinstance(e, Sum):
        parts = []
        for i, t in enumerate(e.terms):
            s = to_text(t)
            if isinstance(t, Sum):
                s = f"({s})"
            if i == 0:
                parts.append(s)
            elif s.startswith("-"):
                parts.append(" - " + s[1:])
            else:
                parts.append(" + " + s)
        return "".join(parts)
    raise TypeError(f"unknown node {type(e).__name__}")
