"""Positivity assumptions that license non-integer powers.

Assumptions live in a context variable, so they are scoped with ``with``
and never leak between threads::

    with assume_positive(t - t0):
        differentiate((t - t0) ** Fraction(3, 2), t)
"""

from __future__ import annotations

from contextvars import ContextVar

from .errors import DomainAssumptionError

_POSITIVE: ContextVar[tuple] = ContextVar("liefund_positive", default=())


def positive_bases() -> tuple:
    """Registered (primitive polynomial, sign) pairs; sign * poly > 0."""
    return _POSITIVE.get()


def _entry(e):
    from .expr import as_expr

    nf = as_expr(e).normal_form()
    sg = nf.single_group()
    if sg is None or sg[0] is not None or sg[1] or not sg[2].is_poly():
        raise DomainAssumptionError(f"positivity can only be declared for polynomials, got {e}")
    poly = sg[2].num
    if poly.is_constant():
        raise DomainAssumptionError("positivity declaration of a constant")
    content, prim = poly.primitive()
    return prim, (1 if content > 0 else -1)


class assume_positive:
    def __init__(self, *exprs):
        self.entries = tuple(_entry(e) for e in exprs)
        self._tokens = []

    def __enter__(self):
        current = _POSITIVE.get()
        merged = current + tuple(x for x in self.entries if x not in current)
        self._tokens.append(_POSITIVE.set(merged))
        return self

    def __exit__(self, *exc):
        _POSITIVE.reset(self._tokens.pop())
        return False
