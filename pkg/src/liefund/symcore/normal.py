"""Canonical normal form for the rational-exponential class.

An expression is held as a finite sum of groups

    r(x) * prod(atom_i ** f_i) * exp(g(x))

keyed by the exponent ``g`` (canonical, exp-free, or ``None`` for no
exponential) and the radical key ``((atom, f), ...)`` with ``0 < f < 1``.
Atoms are primes (for constants like 3**(1/2)) or registered positive
polynomials (for (t - t0)**(3/2)).  ``r`` is a :class:`RatFunc`.

Within this fragment distinct exponents and distinct radical keys are
linearly independent over rational functions, so a normal form is zero
exactly when it has no groups.  That is the zero test.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .domain import positive_bases
from .errors import DomainAssumptionError, NotInClassError
from .expr import Const, Exp, Expression, Power, Product, Sum, Symbol
from .poly import Poly, RatFunc

_ONE_RF = RatFunc.const(1)


# -- atoms -------------------------------------------------------------------
# ("p", prime) or ("b", Poly, sign) meaning sign * Poly > 0


def _atom_key(atom):
    if atom[0] == "p":
        return (0, atom[1])
    return (1, atom[1].key(), atom[2])


def _rad_key(rad):
    return tuple((_atom_key(a), f) for a, f in rad)


def _atom_power(atom, n: int) -> RatFunc:
    if atom[0] == "p":
        return RatFunc.const(Fraction(atom[1]) ** n)
    _, poly, sign = atom
    return RatFunc(poly.scale(sign)).pow(n)


def _split_exponents(exps):
    """{atom_key: (atom, Fraction)} -> (sorted radical tuple, integer carry)."""
    rad = []
    carry = _ONE_RF
    for _, (atom, f) in sorted(exps.items()):
        n = math.floor(f)
        frac = f - n
        if n:
            carry = carry * _atom_power(atom, n)
        if frac:
            rad.append((atom, frac))
    return tuple(rad), carry


def _rad_mul(r1, r2):
    if not r1:
        return r2, _ONE_RF
    if not r2:
        return r1, _ONE_RF
    exps = {}
    for atom, f in r1 + r2:
        k = _atom_key(atom)
        prev = exps.get(k)
        exps[k] = (atom, f + (prev[1] if prev else 0))
    return _split_exponents(exps)


def _prime_factors(n: int) -> dict:
    out = {}
    p = 2
    while p * p <= n and p < 1_000_000:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _positive_decomposition(rf: RatFunc):
    """rf = c * prod(atom^k) with c > 0 and registered positive atoms."""
    registry = positive_bases()
    content, rem = rf.num.primitive()
    c = content
    atoms = {}
    for poly, sign in registry:
        while not rem.is_constant():
            q = rem.exact_div(poly)
            if q is None:
                break
            rem = q
            atom = ("b", poly, sign)
            k = _atom_key(atom)
            atoms[k] = (atom, atoms.get(k, (atom, 0))[1] + 1)
            c *= sign
    if not rem.is_constant():
        raise DomainAssumptionError(
            f"non-integer power of a base whose positivity is not registered: {_poly_text(rem)}"
        )
    c *= rem.constant()
    for base, e in rf.den:
        for poly, sign in registry:
            if poly == base:
                atom = ("b", poly, sign)
                k = _atom_key(atom)
                atoms[k] = (atom, atoms.get(k, (atom, 0))[1] - e)
                c /= Fraction(sign) ** e
                break
        else:
            raise DomainAssumptionError(
                f"non-integer power of a base whose positivity is not registered: {_poly_text(base)}"
            )
    if c <= 0:
        raise DomainAssumptionError("non-integer power of a negative constant")
    for p, k in _prime_factors(c.numerator).items():
        atom = ("p", p)
        atoms[_atom_key(atom)] = (atom, Fraction(k))
    for p, k in _prime_factors(c.denominator).items():
        atom = ("p", p)
        atoms[_atom_key(atom)] = (atom, Fraction(-k))
    return atoms


def _poly_text(p: Poly) -> str:
    from .printing import to_text

    return to_text(poly_to_expr(p))


# -- the normal form ------------------------------------------------------------


class Normal:
    __slots__ = ("groups", "_key", "_hash")

    def __init__(self, groups=None):
        # {(expkey, rad): RatFunc}; expkey is None or an exp-free Normal
        self.groups = groups if groups is not None else {}
        self._key = None
        self._hash = None

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls) -> "Normal":
        return cls()

    @classmethod
    def const(cls, c) -> "Normal":
        c = Fraction(c)
        return cls({(None, ()): RatFunc.const(c)}) if c else cls()

    @classmethod
    def one(cls) -> "Normal":
        return cls.const(1)

    @classmethod
    def symbol(cls, s: Symbol) -> "Normal":
        return cls({(None, ()): RatFunc(Poly.symbol(s))})

    @classmethod
    def from_ratfunc(cls, rf: RatFunc) -> "Normal":
        return cls({(None, ()): rf}) if not rf.is_zero() else cls()

    @classmethod
    def exp_of(cls, arg: "Normal") -> "Normal":
        if any(g is not None for g, _ in arg.groups):
            raise NotInClassError("exp of an expression containing exp is outside the supported class")
        if arg.is_zero():
            return cls.one()
        return cls({(arg, ()): _ONE_RF})

    # -- identity -------------------------------------------------------------
    def key(self):
        k = self._key
        if k is None:
            k = tuple(
                sorted(
                    ((() if g is None else (g.key(),)), _rad_key(r), rf.key())
                    for (g, r), rf in self.groups.items()
                )
            )
            self._key = k
        return k

    def __eq__(self, other):
        return isinstance(other, Normal) and self.key() == other.key()

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash(self.key())
            self._hash = h
        return h

    def __repr__(self):
        return f"Normal({self.to_expression()})"

    # -- predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.groups

    def is_constant(self) -> bool:
        if not self.groups:
            return True
        if len(self.groups) != 1:
            return False
        (g, r), rf = next(iter(self.groups.items()))
        return g is None and not r and rf.is_constant()

    def constant(self) -> Fraction:
        if not self.groups:
            return Fraction(0)
        if not self.is_constant():
            raise ValueError("not a rational constant")
        return next(iter(self.groups.values())).constant()

    def is_ratfunc(self) -> bool:
        return not self.groups or (len(self.groups) == 1 and (None, ()) in self.groups)

    def ratfunc(self) -> RatFunc:
        if not self.groups:
            return RatFunc(Poly())
        if not self.is_ratfunc():
            raise NotInClassError("expression has exponential or radical parts")
        return self.groups[(None, ())]

    def single_group(self):
        if len(self.groups) != 1:
            return None
        (g, r), rf = next(iter(self.groups.items()))
        return g, r, rf

    def symbols(self) -> set:
        out = set()
        for (g, r), rf in self.groups.items():
            out |= rf.symbols()
            if g is not None:
                out |= g.symbols()
            for atom, _ in r:
                if atom[0] == "b":
                    out |= atom[1].symbols()
        return out

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other: "Normal") -> "Normal":
        if not other.groups:
            return self
        if not self.groups:
            return other
        out = dict(self.groups)
        for k, rf in other.groups.items():
            prev = out.get(k)
            v = rf if prev is None else prev + rf
            if v.is_zero():
                out.pop(k, None)
            else:
                out[k] = v
        return Normal(out)

    def __neg__(self) -> "Normal":
        return Normal({k: -rf for k, rf in self.groups.items()})

    def __sub__(self, other: "Normal") -> "Normal":
        return self + (-other)

    def scale(self, c) -> "Normal":
        c = Fraction(c)
        if not c:
            return Normal()
        return Normal({k: rf.scale(c) for k, rf in self.groups.items()})

    def __mul__(self, other: "Normal") -> "Normal":
        if not self.groups or not other.groups:
            return Normal()
        out = {}
        for (g1, r1), c1 in self.groups.items():
            for (g2, r2), c2 in other.groups.items():
                if g1 is None:
                    g = g2
                elif g2 is None:
                    g = g1
                else:
                    g = g1 + g2
                    if g.is_zero():
                        g = None
                r, carry = _rad_mul(r1, r2)
                c = c1 * c2
                if carry is not _ONE_RF:
                    c = c * carry
                k = (g, r)
                prev = out.get(k)
                v = c if prev is None else prev + c
                if v.is_zero():
                    out.pop(k, None)
                else:
                    out[k] = v
        return Normal(out)

    def inverse(self) -> "Normal":
        if not self.groups:
            raise ZeroDivisionError("division by an expression that is identically zero")
        sg = self.single_group()
        if sg is None:
            raise NotInClassError(
                "reciprocal of a sum with distinct exponential/radical parts is outside the supported class"
            )
        g, r, rf = sg
        exps = {}
        for atom, f in r:
            exps[_atom_key(atom)] = (atom, -f)
        rad, carry = _split_exponents(exps)
        ng = None if g is None else -g
        return Normal({(ng, rad): rf.inverse() * carry})

    def __truediv__(self, other: "Normal") -> "Normal":
        return self * other.inverse()

    def pow(self, exponent) -> "Normal":
        r = Fraction(exponent)
        if r == 0:
            return Normal.one()
        if r.denominator == 1:
            n = r.numerator
            if n < 0:
                return self.inverse().pow(-n)
            sg = self.single_group()
            if sg is not None and sg[0] is None and not sg[1]:
                return Normal.from_ratfunc(sg[2].pow(n))
            result = Normal.one()
            base = self
            while n:
                if n & 1:
                    result = result * base
                n >>= 1
                if n:
                    base = base * base
            return result
        if not self.groups:
            if r > 0:
                return Normal()
            raise ZeroDivisionError("negative power of zero")
        sg = self.single_group()
        if sg is None:
            raise NotInClassError("non-integer power of a sum is outside the supported class")
        g, rad, rf = sg
        exps = {k: (atom, k_exp * r) for k, (atom, k_exp) in _positive_decomposition(rf).items()}
        for atom, f in rad:
            k = _atom_key(atom)
            prev = exps.get(k)
            exps[k] = (atom, f * r + (prev[1] if prev else 0))
        new_rad, carry = _split_exponents(exps)
        ng = None if g is None else g.scale(r)
        return Normal({(ng, new_rad): carry})

    def diff(self, s: Symbol) -> "Normal":
        out = Normal()
        for (g, rad), rf in self.groups.items():
            coeff = rf.diff(s)
            for atom, f in rad:
                if atom[0] == "b" and s in atom[1].symbols():
                    poly = atom[1]
                    coeff = coeff + rf * RatFunc.build(poly.diff(s).scale(f), [(poly, 1)])
            unit = Normal({(g, rad): _ONE_RF})
            part = Normal.from_ratfunc(coeff)
            if g is not None:
                part = part + Normal.from_ratfunc(rf) * g.diff(s)
            out = out + part * unit
        return out

    def to_expression(self) -> Expression:
        from .domain import positive_bases

        e = normal_to_expr(self)
        object.__setattr__(e, "_nf", (positive_bases(), self))
        return e


# -- tree -> normal --------------------------------------------------------------


def to_normal(e: Expression) -> Normal:
    if isinstance(e, Const):
        return Normal.const(e.value)
    if isinstance(e, Symbol):
        return Normal.symbol(e)
    if isinstance(e, Sum):
        acc = Normal()
        for t in e.terms:
            acc = acc + t.normal_form()
        return acc
    if isinstance(e, Product):
        acc = Normal.one()
        for f in e.factors:
            acc = acc * f.normal_form()
            if acc.is_zero():
                return acc
        return acc
    if isinstance(e, Power):
        return e.base.normal_form().pow(e.exponent)
    if isinstance(e, Exp):
        return Normal.exp_of(e.arg.normal_form())
    raise TypeError(f"unknown expression node {type(e).__name__}")


# -- normal -> tree ---------------------------------------------------------------


def _mono_order(m):
    return (-sum(e for _, e in m), tuple((s.name, -e) for s, e in m))


def _mono_factors(m):
    return [s if e == 1 else Power(s, e) for s, e in m]


def poly_to_expr(p: Poly) -> Expression:
    if p.is_zero():
        return Const(0)
    terms = []
    for m in sorted(p.terms, key=_mono_order):
        c = p.terms[m]
        fs = _mono_factors(m)
        if not fs:
            terms.append(Const(c))
        elif c == 1:
            terms.append(fs[0] if len(fs) == 1 else Product(fs))
        else:
            terms.append(Product([Const(c)] + fs))
    return terms[0] if len(terms) == 1 else Sum(terms)


def _atom_expr(atom) -> Expression:
    if atom[0] == "p":
        return Const(atom[1])
    poly_e = poly_to_expr(atom[1])
    return poly_e if atom[2] > 0 else Product((Const(-1), poly_e))


def _group_expr(g, rad, rf: RatFunc) -> Expression:
    extra = [Power(_atom_expr(a), f) for a, f in rad]
    if g is not None:
        extra.append(Exp(normal_to_expr(g)))
    extra += [Power(poly_to_expr(b), -e) for b, e in rf.den]
    num = rf.num
    if not extra:
        return poly_to_expr(num)
    if num.is_constant():
        c = num.constant()
        head = [] if c == 1 else [Const(c)]
    elif len(num.terms) == 1:
        (m, c), = num.terms.items()
        head = ([] if c == 1 else [Const(c)]) + _mono_factors(m)
    else:
        head = [poly_to_expr(num)]
    fs = head + extra
    return fs[0] if len(fs) == 1 else Product(fs)


def normal_to_expr(n: Normal) -> Expression:
    if not n.groups:
        return Const(0)
    items = sorted(
        n.groups.items(),
        key=lambda kv: (kv[0][0] is not None, () if kv[0][0] is None else kv[0][0].key(), _rad_key(kv[0][1])),
    )
    terms = []
    for (g, rad), rf in items:
        if g is None and not rad and not rf.den and len(rf.num.terms) > 1:
            t = poly_to_expr(rf.num)
            terms.extend(t.terms)
        else:
            terms.append(_group_expr(g, rad, rf))
    return terms[0] if len(terms) == 1 else Sum(terms)
