"""Expression tree nodes.

Trees are immutable.  Structural equality (``==``) compares trees node by
node; mathematical equality is decided by :func:`liefund.symcore.is_zero`
on the difference.  Every node lazily caches its canonical normal form.
"""

from __future__ import annotations

import enum
from fractions import Fraction
from numbers import Rational


class SymbolKind(enum.Enum):
    INDEPENDENT = "independent"
    PARAMETER = "parameter"
    CONSTANT = "constant"
    PLACEHOLDER = "placeholder"


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, float):
        # floats enter exactly; callers wanting decimal semantics pass strings
        return Fraction(value)
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def as_expr(value) -> "Expression":
    if isinstance(value, Expression):
        return value
    return Const(as_fraction(value))


class Expression:
    __slots__ = ("_nf", "_hash")

    def _init_cache(self):
        object.__setattr__(self, "_nf", None)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("expressions are immutable")

    def _key(self):
        raise NotImplementedError

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Expression):
            return NotImplemented
        return type(self) is type(other) and self._key() == other._key()

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((type(self).__name__, self._key()))
            object.__setattr__(self, "_hash", h)
        return h

    # arithmetic builds unsimplified trees
    def __add__(self, other):
        return Sum((self, as_expr(other)))

    def __radd__(self, other):
        return Sum((as_expr(other), self))

    def __sub__(self, other):
        return Sum((self, Product((Const(-1), as_expr(other)))))

    def __rsub__(self, other):
        return Sum((as_expr(other), Product((Const(-1), self))))

    def __mul__(self, other):
        return Product((self, as_expr(other)))

    def __rmul__(self, other):
        return Product((as_expr(other), self))

    def __truediv__(self, other):
        return Product((self, Power(as_expr(other), -1)))

    def __rtruediv__(self, other):
        return Product((as_expr(other), Power(self, -1)))

    def __neg__(self):
        return Product((Const(-1), self))

    def __pow__(self, exponent):
        return Power(self, exponent)

    def normal_form(self):
        """Canonical form of this tree, cached per set of positivity assumptions."""
        from .domain import positive_bases

        ctx = positive_bases()
        cached = self._nf
        if cached is not None and (cached[0] is ctx or cached[0] == ctx):
            return cached[1]
        from .normal import to_normal

        nf = to_normal(self)
        object.__setattr__(self, "_nf", (ctx, nf))
        return nf

    def children(self) -> tuple:
        return ()

    def __str__(self):
        from .printing import to_text

        return to_text(self)


class Const(Expression):
    __slots__ = ("value",)

    def __init__(self, value):
        object.__setattr__(self, "value", as_fraction(value))
        self._init_cache()

    def _key(self):
        return (self.value,)

    def __neg__(self):
        return Const(-self.value)

    def __repr__(self):
        return f"Const({self.value})"


class Symbol(Expression):
    __slots__ = ("name", "kind")

    def __init__(self, name: str, kind: SymbolKind = SymbolKind.INDEPENDENT):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "kind", SymbolKind(kind))
        self._init_cache()

    def _key(self):
        return (self.name, self.kind.value)

    def sort_key(self):
        return (self.name, self.kind.value)

    def __repr__(self):
        return f"Symbol({self.name!r}, {self.kind.name})"


class Sum(Expression):
    __slots__ = ("terms",)

    def __init__(self, terms):
        terms = tuple(as_expr(t) for t in terms)
        if not terms:
            raise ValueError("empty Sum")
        object.__setattr__(self, "terms", terms)
        self._init_cache()

    def _key(self):
        return self.terms

    def children(self):
        return self.terms

    def __repr__(self):
        return f"Sum({list(self.terms)!r})"


class Product(Expression):
    __slots__ = ("factors",)

    def __init__(self, factors):
        factors = tuple(as_expr(f) for f in factors)
        if not factors:
            raise ValueError("empty Product")
        object.__setattr__(self, "factors", factors)
        self._init_cache()

    def _key(self):
        return self.factors

    def children(self):
        return self.factors

    def __repr__(self):
        return f"Product({list(self.factors)!r})"


class Power(Expression):
    __slots__ = ("base", "exponent")

    def __init__(self, base, exponent):
        object.__setattr__(self, "base", as_expr(base))
        object.__setattr__(self, "exponent", as_fraction(exponent))
        self._init_cache()

    def _key(self):
        return (self.base, self.exponent)

    def children(self):
        return (self.base,)

    def __repr__(self):
        return f"Power({self.base!r}, {self.exponent})"


class Exp(Expression):
    __slots__ = ("arg",)

    def __init__(self, arg):
        object.__setattr__(self, "arg", as_expr(arg))
        self._init_cache()

    def _key(self):
        return (self.arg,)

    def children(self):
        return (self.arg,)

    def __repr__(self):
        return f"Exp({self.arg!r})"


def exp(arg) -> Exp:
    return Exp(as_expr(arg))


def symbols(names: str, kind: SymbolKind = SymbolKind.INDEPENDENT):
    """``symbols("t x y")`` -> tuple of Symbols of one kind."""
    return tuple(Symbol(n, kind) for n in names.replace(",", " ").split())


def free_symbols(e: Expression) -> set:
    out = set()
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Symbol):
            out.add(node)
        else:
            stack.extend(node.children())
    return out


def walk(e: Expression):
    stack = [e]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(node.children())
