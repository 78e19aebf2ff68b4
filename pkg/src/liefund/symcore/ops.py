from __future__ import annotations

import math

from .errors import EvaluationError, SymcoreError
from .expr import Const, Exp, Expression, Power, Product, Sum, Symbol, SymbolKind, as_expr


def normalize(e) -> Expression:
    """Canonical tree: one fraction of expanded polynomials per exp/radical part."""
    e = as_expr(e)
    return e.normal_form().to_expression()


def is_zero(e) -> bool:
    """Exact zero test on the declared domain (see :mod:`.normal`)."""
    return as_expr(e).normal_form().is_zero()


def equal(a, b) -> bool:
    return (as_expr(a).normal_form() - as_expr(b).normal_form()).is_zero()


def differentiate(e, v: Symbol) -> Expression:
    if not isinstance(v, Symbol) or v.kind is not SymbolKind.INDEPENDENT:
        raise SymcoreError(f"can only differentiate with respect to an independent variable, got {v!r}")
    return as_expr(e).normal_form().diff(v).to_expression()


def diff_any(e, v: Symbol) -> Expression:
    """Partial derivative with respect to any symbol (placeholders included)."""
    return as_expr(e).normal_form().diff(v).to_expression()


def _subs_tree(e: Expression, bindings: dict) -> Expression:
    if isinstance(e, Symbol):
        return bindings.get(e, e)
    if isinstance(e, Const):
        return e
    if isinstance(e, Sum):
        return Sum([_subs_tree(t, bindings) for t in e.terms])
    if isinstance(e, Product):
        return Product([_subs_tree(f, bindings) for f in e.factors])
    if isinstance(e, Power):
        return Power(_subs_tree(e.base, bindings), e.exponent)
    if isinstance(e, Exp):
        return Exp(_subs_tree(e.arg, bindings))
    raise TypeError(type(e).__name__)


def substitute(e, bindings: dict) -> Expression:
    """Simultaneous substitution followed by normalisation."""
    bindings = {k: as_expr(v) for k, v in bindings.items()}
    return normalize(_subs_tree(as_expr(e), bindings))


def substitute_raw(e, bindings: dict) -> Expression:
    bindings = {k: as_expr(v) for k, v in bindings.items()}
    return _subs_tree(as_expr(e), bindings)


def _lookup(bindings, s: Symbol):
    if s in bindings:
        return bindings[s]
    if s.name in bindings:
        return bindings[s.name]
    raise EvaluationError(f"unbound symbol {s.name!r}")


def eval_numeric(e, bindings=None) -> float:
    """IEEE double evaluation of the tree; constants are rounded once."""
    bindings = bindings or {}
    e = as_expr(e)

    def ev(node):
        if isinstance(node, Const):
            return float(node.value)
        if isinstance(node, Symbol):
            return float(_lookup(bindings, node))
        if isinstance(node, Sum):
            return math.fsum(ev(t) for t in node.terms)
        if isinstance(node, Product):
            out = 1.0
            for f in node.factors:
                out *= ev(f)
            return out
        if isinstance(node, Power):
            b = ev(node.base)
            r = node.exponent
            if r.denominator == 1:
                if b == 0 and r < 0:
                    raise EvaluationError("division by zero")
                return b ** r.numerator
            if b < 0:
                raise EvaluationError("non-integer power of a negative number")
            if b == 0 and r < 0:
                raise EvaluationError("division by zero")
            return b ** float(r)
        if isinstance(node, Exp):
            return math.exp(ev(node.arg))
        raise TypeError(type(node).__name__)

    try:
        return ev(e)
    except ZeroDivisionError as exc:
        raise EvaluationError("division by zero") from exc
    except OverflowError as exc:
        raise EvaluationError(str(exc)) from exc


def _code(node, names) -> str:
    if isinstance(node, Const):
        return repr(float(node.value))
    if isinstance(node, Symbol):
        return names[node]
    if isinstance(node, Sum):
        return "(" + " + ".join(_code(t, names) for t in node.terms) + ")"
    if isinstance(node, Product):
        return "(" + " * ".join(_code(f, names) for f in node.factors) + ")"
    if isinstance(node, Power):
        r = node.exponent
        if r.denominator == 1:
            return f"({_code(node.base, names)} ** {r.numerator})"
        return f"({_code(node.base, names)} ** {float(r)!r})"
    if isinstance(node, Exp):
        return f"_exp({_code(node.arg, names)})"
    raise TypeError(type(node).__name__)


def compile_numeric(e, args, constants=None):
    """Compile ``e`` into a numpy-vectorised function of ``args``.

    ``constants`` binds remaining symbols to fixed floats.
    """
    import numpy as np

    e = as_expr(e)
    constants = constants or {}
    names = {}
    params = []
    for i, s in enumerate(args):
        names[s] = f"_a{i}"
        params.append(f"_a{i}")
    env = {"_exp": np.exp}
    for j, (s, v) in enumerate(constants.items()):
        sym = s if isinstance(s, Symbol) else None
        if sym is None:
            raise TypeError("constant bindings must be keyed by Symbol")
        names[sym] = f"_c{j}"
        env[f"_c{j}"] = float(v)
    from .expr import free_symbols

    missing = [s.name for s in free_symbols(e) if s not in names]
    if missing:
        raise EvaluationError(f"unbound symbols {sorted(missing)}")
    src = f"def _f({', '.join(params)}):\n    return {_code(e, names)}\n"
    exec(compile(src, "<liefund-compiled>", "exec"), env)
    return env["_f"]
