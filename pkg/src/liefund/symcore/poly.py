"""Multivariate polynomials and rational functions over Q.

Rational functions keep their denominators factored over a set of
primitive base polynomials that are refined by trial division so that no
base divides another.  This is not a full factorisation, so two equal
rational functions may occasionally print differently; the zero test is
unaffected because it only inspects numerators.
"""

from __future__ import annotations

import heapq
import math
import os
from fractions import Fraction
from functools import reduce

from .errors import ResourceLimitError
from .expr import Symbol

DEFAULT_TERM_CAP = 100_000


def term_cap() -> int:
    raw = os.environ.get("LIEFUND_TERM_CAP")
    return int(raw) if raw else DEFAULT_TERM_CAP


def _sym_key(s: Symbol):
    return s.sort_key()


def mono_key(m):
    return tuple((s.name, s.kind.value, e) for s, e in m)


def mono_mul(a, b):
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for s, e in b:
        d[s] = d.get(s, 0) + e
    return tuple(sorted(d.items(), key=lambda it: _sym_key(it[0])))


def mono_div(a, b):
    """a / b as a monomial, or None if b does not divide a."""
    if not b:
        return a
    d = dict(a)
    for s, e in b:
        have = d.get(s, 0)
        if have < e:
            return None
        if have == e:
            del d[s]
        else:
            d[s] = have - e
    return tuple(sorted(d.items(), key=lambda it: _sym_key(it[0])))


def mono_degree(m) -> int:
    return sum(e for _, e in m)


class Poly:
    """Sparse polynomial: dict monomial -> nonzero Fraction."""

    __slots__ = ("terms", "_key")

    def __init__(self, terms=None):
        self.terms = terms if terms is not None else {}
        self._key = None

    @classmethod
    def const(cls, c) -> "Poly":
        c = Fraction(c)
        return cls({(): c} if c else {})

    @classmethod
    def symbol(cls, s: Symbol) -> "Poly":
        return cls({((s, 1),): Fraction(1)})

    # -- predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def constant(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def symbols(self) -> set:
        return {s for m in self.terms for s, _ in m}

    def degree(self) -> int:
        return max((mono_degree(m) for m in self.terms), default=0)

    # -- identity ---------------------------------------------------------
    def key(self):
        k = self._key
        if k is None:
            k = tuple(sorted((mono_key(m), c) for m, c in self.terms.items()))
            self._key = k
        return k

    def __eq__(self, other):
        return isinstance(other, Poly) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Poly({self.key()})"

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other: "Poly") -> "Poly":
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Poly(out)

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def scale(self, c) -> "Poly":
        c = Fraction(c)
        if not c:
            return Poly()
        if c == 1:
            return self
        return Poly({m: v * c for m, v in self.terms.items()})

    def mul_mono(self, m, c=Fraction(1)) -> "Poly":
        return Poly({mono_mul(k, m): v * c for k, v in self.terms.items()})

    def __mul__(self, other: "Poly") -> "Poly":
        a, b = self.terms, other.terms
        if not a or not b:
            return Poly()
        if len(a) == 1 and () in a:
            return other.scale(a[()])
        if len(b) == 1 and () in b:
            return self.scale(b[()])
        out = {}
        for m1, c1 in a.items():
            for m2, c2 in b.items():
                m = mono_mul(m1, m2)
                v = out.get(m, 0) + c1 * c2
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        if len(out) > term_cap():
            raise ResourceLimitError(
                f"polynomial expansion produced {len(out)} terms (cap {term_cap()}; "
                "raise LIEFUND_TERM_CAP to allow more)"
            )
        return Poly(out)

    def pow(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative polynomial power")
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def diff(self, s: Symbol) -> "Poly":
        out = {}
        for m, c in self.terms.items():
            for i, (v, e) in enumerate(m):
                if v == s:
                    nm = m[:i] + (((v, e - 1),) if e > 1 else ()) + m[i + 1:]
                    out[nm] = out.get(nm, 0) + c * e
                    break
        return Poly({m: c for m, c in out.items() if c})

    # -- division and content ----------------------------------------------
    def _order_vars(self, other=None):
        syms = self.symbols() if other is None else self.symbols() | other.symbols()
        return sorted(syms, key=_sym_key)

    @staticmethod
    def _vec(m, order):
        d = dict(m)
        return tuple(d.get(v, 0) for v in order)

    def leading(self, order=None):
        """Lex-leading (monomial, coefficient); variables ordered by name."""
        order = order if order is not None else self._order_vars()
        m = max(self.terms, key=lambda mm: self._vec(mm, order))
        return m, self.terms[m]

    def exact_div(self, d: "Poly"):
        """self / d if d divides self exactly, else None."""
        if d.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if self.is_zero():
            return Poly()
        if d.is_constant():
            return self.scale(1 / d.constant())
        order = self._order_vars(d)
        lm_d, lc_d = d.leading(order)
        rem = dict(self.terms)
        quot = {}
        vec = self._vec
        # max-heap of remainder monomials; stale entries are skipped on pop
        heap = [(tuple(-e for e in vec(m, order)), i, m) for i, m in enumerate(rem)]
        heapq.heapify(heap)
        counter = len(heap)
        while rem:
            while heap[0][2] not in rem:
                heapq.heappop(heap)
            lm_r = heapq.heappop(heap)[2]
            m = mono_div(lm_r, lm_d)
            if m is None:
                return None
            c = rem.pop(lm_r) / lc_d
            quot[m] = quot.get(m, 0) + c
            for dm, dc in d.terms.items():
                k = mono_mul(dm, m)
                if k == lm_r:
                    continue
                old = rem.get(k)
                v = (old or 0) - c * dc
                if v:
                    if old is None:
                        heapq.heappush(heap, (tuple(-e for e in vec(k, order)), counter, k))
                        counter += 1
                    rem[k] = v
                else:
                    rem.pop(k, None)
        return Poly({m: c for m, c in quot.items() if c})

    def primitive(self):
        """(content, primitive part) with integer coefficients, gcd 1 and a
        positive lex-leading coefficient."""
        if self.is_zero():
            return Fraction(0), self
        coeffs = list(self.terms.values())
        den = reduce(lambda a, b: a * b // math.gcd(a, b), (c.denominator for c in coeffs), 1)
        g = reduce(math.gcd, (abs(c.numerator * (den // c.denominator)) for c in coeffs), 0)
        content = Fraction(g, den)
        _, lc = self.leading()
        if lc < 0:
            content = -content
        if content == 1:
            return content, self
        return content, self.scale(1 / content)

    def monomial_content(self):
        if not self.terms:
            return ()
        it = iter(self.terms)
        common = dict(next(it))
        for m in it:
            d = dict(m)
            for s in list(common):
                e = min(common[s], d.get(s, 0))
                if e:
                    common[s] = e
                else:
                    del common[s]
            if not common:
                return ()
        return tuple(sorted(common.items(), key=lambda it: _sym_key(it[0])))


# -- rational functions ------------------------------------------------------


def _base_factors(p: Poly):
    """p = content * prod(base^k): bases primitive, single variables split off."""
    content, prim = p.primitive()
    mono = prim.monomial_content()
    factors = [(Poly.symbol(s), e) for s, e in mono]
    rest = prim.terms if not mono else {mono_div(m, mono): c for m, c in prim.terms.items()}
    rest = Poly(rest)
    if not rest.is_constant():
        factors.append((rest, 1))
    else:
        content *= rest.constant()
    return content, factors


def _refine(bases):
    work = []
    for b in bases:
        if b not in work:
            work.append(b)
    changed = True
    while changed:
        changed = False
        for i in range(len(work)):
            for j in range(len(work)):
                if i == j or work[i] == work[j]:
                    continue
                if work[j].degree() > work[i].degree():
                    continue
                q = work[i].exact_div(work[j])
                if q is not None and not q.is_constant():
                    _, q = q.primitive()
                    work[i] = q
                    changed = True
        dedup = []
        for b in work:
            if b not in dedup:
                dedup.append(b)
        work = dedup
    return work


def _decompose(p: Poly, bases):
    """p = c * prod(b^k) over refined bases."""
    c = Fraction(1)
    out = {}
    rem = p
    progress = True
    while not rem.is_constant() and progress:
        progress = False
        for b in bases:
            q = rem.exact_div(b)
            if q is not None:
                rem = q
                out[b] = out.get(b, 0) + 1
                progress = True
                if rem.is_constant():
                    break
    if not rem.is_constant():
        # leftover factor becomes its own base
        cc, prim = rem.primitive()
        out[prim] = out.get(prim, 0) + 1
        return c * cc, out
    return c * rem.constant(), out


def _poly_product(items) -> Poly:
    out = Poly.const(1)
    for b, e in items:
        out = out * b.pow(e)
    return out


class RatFunc:
    """num / prod(base^e); bases primitive, non-constant, sorted by key."""

    __slots__ = ("num", "den", "_key")

    def __init__(self, num: Poly, den=()):
        self.num = num
        self.den = den
        self._key = None

    @classmethod
    def const(cls, c) -> "RatFunc":
        return cls(Poly.const(c))

    @classmethod
    def from_poly(cls, p: Poly) -> "RatFunc":
        return cls(p)

    @classmethod
    def build(cls, num: Poly, den_items) -> "RatFunc":
        """Canonicalise num / prod(b^e) for arbitrary (nonzero) polynomial bases."""
        if num.is_zero():
            return cls(Poly())
        raw = {}
        scale = Fraction(1)
        for b, e in den_items:
            if e == 0:
                continue
            c, fs = _base_factors(b)
            scale /= c ** e
            for f, k in fs:
                raw[f] = raw.get(f, 0) + k * e
        if not raw:
            return cls(num.scale(scale))
        bases = _refine(list(raw))
        den = {}
        for b, e in raw.items():
            c, dec = _decompose(b, bases)
            scale /= c ** e
            for f, k in dec.items():
                den[f] = den.get(f, 0) + k * e
        num = num.scale(scale)
        for b in list(den):
            e = den[b]
            while e > 0:
                q = num.exact_div(b)
                if q is None:
                    break
                num = q
                e -= 1
            if e > 0:
                den[b] = e
            elif e < 0:
                num = num * b.pow(-e)
                del den[b]
            else:
                del den[b]
        return cls(num, tuple(sorted(den.items(), key=lambda it: it[0].key())))

    # -- predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return not self.den and self.num.is_constant()

    def constant(self) -> Fraction:
        return self.num.constant()

    def is_poly(self) -> bool:
        return not self.den

    def symbols(self) -> set:
        out = self.num.symbols()
        for b, _ in self.den:
            out |= b.symbols()
        return out

    def key(self):
        k = self._key
        if k is None:
            k = (self.num.key(), tuple((b.key(), e) for b, e in self.den))
            self._key = k
        return k

    def __eq__(self, other):
        return isinstance(other, RatFunc) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"RatFunc({self.key()})"

    # -- arithmetic -------------------------------------------------------
    def __mul__(self, other: "RatFunc") -> "RatFunc":
        if self.is_zero() or other.is_zero():
            return RatFunc(Poly())
        if not self.den and not other.den:
            return RatFunc(self.num * other.num)
        return RatFunc.build(self.num * other.num, self.den + other.den)

    def scale(self, c) -> "RatFunc":
        c = Fraction(c)
        if not c:
            return RatFunc(Poly())
        return RatFunc(self.num.scale(c), self.den)

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.num, self.den)

    def __add__(self, other: "RatFunc") -> "RatFunc":
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.den == other.den:
            if not self.den:
                return RatFunc(self.num + other.num)
            return RatFunc.build(self.num + other.num, self.den)
        bases = _refine([b for b, _ in self.den] + [b for b, _ in other.den])

        def expo(den):
            c = Fraction(1)
            out = {}
            for b, e in den:
                cc, dec = _decompose(b, bases)
                c *= cc ** e
                for f, k in dec.items():
                    out[f] = out.get(f, 0) + k * e
            return c, out

        ca, ea = expo(self.den)
        cb, eb = expo(other.den)
        lcm = dict(ea)
        for b, e in eb.items():
            lcm[b] = max(lcm.get(b, 0), e)
        na = self.num.scale(1 / ca) * _poly_product((b, lcm[b] - ea.get(b, 0)) for b in lcm)
        nb = other.num.scale(1 / cb) * _poly_product((b, lcm[b] - eb.get(b, 0)) for b in lcm)
        return RatFunc.build(na + nb, lcm.items())

    def __sub__(self, other: "RatFunc") -> "RatFunc":
        return self + (-other)

    def inverse(self) -> "RatFunc":
        if self.is_zero():
            raise ZeroDivisionError("reciprocal of zero")
        c, factors = _base_factors(self.num)
        return RatFunc.build(_poly_product(self.den).scale(1 / c), factors)

    def pow(self, n: int) -> "RatFunc":
        if n < 0:
            return self.inverse().pow(-n)
        if n == 0:
            return RatFunc.const(1)
        if not self.den:
            return RatFunc(self.num.pow(n))
        return RatFunc(self.num.pow(n), tuple((b, e * n) for b, e in self.den))

    def diff(self, s: Symbol) -> "RatFunc":
        dn = self.num.diff(s)
        if not self.den:
            return RatFunc(dn)
        live = [(b, e) for b, e in self.den if s in b.symbols()]
        if not live:
            return RatFunc(dn, self.den)
        # d(N/D) = (N' S - N sum e b' S/b) / (D S),  S = prod of live bases
        S = _poly_product((b, 1) for b, _ in live)
        acc = dn * S
        for b, e in live:
            others = _poly_product((c, 1) for c, _ in live if c is not b)
            acc = acc - (self.num * b.diff(s) * others).scale(e)
        new_den = [(b, e + (1 if s in b.symbols() else 0)) for b, e in self.den]
        return RatFunc.build(acc, new_den)
