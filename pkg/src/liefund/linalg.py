"""Exact linear algebra over rational functions in the source parameters.

Matrix entries are :class:`~liefund.symcore.normal.Normal` values.  Pivots
are certified nonzero by the exact zero test; a pivot that is not a
rational constant is accepted generically and reported as a warning, since
it vanishes on some parameter subvariety.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

from .symcore import as_expr
from .symcore.normal import Normal
from .symcore.poly import Poly, RatFunc, _decompose, _poly_product, _refine

log = logging.getLogger(__name__)


def coefficient_rows(vectors, variables):
    """Linear relations among ``vectors`` as a matrix free of ``variables``.

    ``vectors`` is a list of columns, each a list of component Expressions.
    The returned matrix ``M`` (rows x len(vectors)) satisfies: a combination
    ``sum c_j v_j`` with coefficients free of ``variables`` vanishes
    identically iff ``M c = 0``.
    """
    if not vectors:
        return []
    variables = set(variables)
    ncols = len(vectors)
    rows = {}
    order = []
    for comp in range(len(vectors[0])):
        nfs = [as_expr(v[comp]).normal_form() for v in vectors]
        gkeys = []
        for nf in nfs:
            for gk in nf.groups:
                if gk not in gkeys:
                    gkeys.append(gk)
        for gk in gkeys:
            rfs = [nf.groups.get(gk) for nf in nfs]
            bases = _refine([b for rf in rfs if rf is not None for b, _ in rf.den])
            decomposed = []
            lcm = {}
            for rf in rfs:
                if rf is None:
                    decomposed.append(None)
                    continue
                c = Fraction(1)
                ex = {}
                for b, e in rf.den:
                    cc, dec = _decompose(b, bases)
                    c *= cc ** e
                    for f, k in dec.items():
                        ex[f] = ex.get(f, 0) + k * e
                decomposed.append((c, ex))
                for f, k in ex.items():
                    lcm[f] = max(lcm.get(f, 0), k)
            for j, rf in enumerate(rfs):
                if rf is None:
                    continue
                c, ex = decomposed[j]
                num = rf.num.scale(1 / c) * _poly_product((b, lcm[b] - ex.get(b, 0)) for b in lcm)
                for mono, coeff in num.terms.items():
                    var_part = tuple((s, e) for s, e in mono if s in variables)
                    par_part = tuple((s, e) for s, e in mono if s not in variables)
                    key = (comp, gk, var_part)
                    if key not in rows:
                        rows[key] = [Poly() for _ in range(ncols)]
                        order.append(key)
                    rows[key][j] = rows[key][j] + Poly({par_part: coeff})
    out = []
    for key in order:
        row = [Normal.from_ratfunc(RatFunc(p)) for p in rows[key]]
        if any(not x.is_zero() for x in row):
            out.append(row)
    return out


@dataclass
class Echelon:
    """Fraction-free Gauss-Jordan form.  Each pivot row has zeros in every
    other pivot column."""

    rows: list
    pivots: list  # (row, col)
    warnings: list = field(default_factory=list)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    @property
    def pivot_columns(self):
        return [c for _, c in self.pivots]


def _row_content(row):
    if not all(x.is_ratfunc() and x.ratfunc().is_poly() for x in row):
        return row
    coeffs = [c for x in row for c in x.ratfunc().num.terms.values()]
    if not coeffs:
        return row
    den = reduce(lambda a, b: a * b // math.gcd(a, b), (c.denominator for c in coeffs), 1)
    g = reduce(math.gcd, (abs(c.numerator * (den // c.denominator)) for c in coeffs), 0)
    content = Fraction(g, den)
    if content == 1 or content == 0:
        return row
    return [x.scale(1 / content) for x in row]


def echelon(matrix, allowed_columns=None) -> Echelon:
    m = [list(r) for r in matrix]
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    allowed = set(range(ncols)) if allowed_columns is None else set(allowed_columns)
    used_rows, pivots, warnings = set(), [], []
    pivot_cols = set()
    while True:
        cand = [
            (i, j)
            for i in range(nrows)
            if i not in used_rows
            for j in allowed
            if j not in pivot_cols and not m[i][j].is_zero()
        ]
        if not cand:
            break
        # Constant pivots first, then sparse columns; later columns win ties so
        # that trailing basis elements are eliminated and leading ones stay free.

        def colcount(j):
            return sum(1 for r in range(nrows) if r not in used_rows and not m[r][j].is_zero())

        i, j = min(cand, key=lambda ij: (0 if m[ij[0]][ij[1]].is_constant() else 1, colcount(ij[1]), -ij[1], ij[0]))
        p = m[i][j]
        if not p.is_constant():
            msg = f"pivot {p.to_expression()} assumed nonzero (generic source point); special stratum where it vanishes is not covered"
            warnings.append(msg)
            log.debug(msg)
        for r in range(nrows):
            if r == i or m[r][j].is_zero():
                continue
            a = m[r][j]
            if p.is_constant():
                f = a.scale(1 / p.constant())
                m[r] = [x - f * y for x, y in zip(m[r], m[i])]
            else:
                m[r] = _row_content([p * x - a * y for x, y in zip(m[r], m[i])])
        used_rows.add(i)
        pivot_cols.add(j)
        pivots.append((i, j))
    return Echelon(m, pivots, warnings)


def _clear_denominators(vec, lead=None):
    if not all(x.is_ratfunc() for x in vec):
        return vec
    rfs = [x.ratfunc() for x in vec]
    bases = _refine([b for rf in rfs for b, _ in rf.den])
    lcm = {}
    for rf in rfs:
        for b, e in rf.den:
            _, dec = _decompose(b, bases)
            for f, k in dec.items():
                lcm[f] = max(lcm.get(f, 0), k * e)
    if lcm:
        mult = Normal.from_ratfunc(RatFunc(_poly_product(lcm.items())))
        vec = [x * mult for x in vec]
    vec = _row_content(vec)
    order = [lead] if lead is not None else range(len(vec))
    for k in order:
        x = vec[k]
        if not x.is_zero():
            if x.is_ratfunc():
                content, _ = x.ratfunc().num.primitive()
                if content < 0:
                    vec = [-y for y in vec]
            break
    return vec


def nullspace(matrix, ncols=None):
    """Basis of the right kernel; denominators cleared, content removed."""
    if not matrix:
        n = ncols or 0
        return [[Normal.one() if i == j else Normal() for i in range(n)] for j in range(n)], Echelon([], [])
    ech = echelon(matrix)
    n = len(matrix[0])
    pcols = ech.pivot_columns
    basis = []
    for f in range(n):
        if f in pcols:
            continue
        v = [Normal() for _ in range(n)]
        v[f] = Normal.one()
        for i, j in ech.pivots:
            entry = ech.rows[i][f]
            if not entry.is_zero():
                v[j] = -(entry / ech.rows[i][j])
        basis.append(_clear_denominators(v, lead=f))
    return basis, ech


def rank(matrix) -> int:
    if not matrix:
        return 0
    return echelon(matrix).rank


def solve(matrix, rhs):
    """One solution x of M x = rhs (free variables set to 0), or None."""
    n = len(matrix[0]) if matrix else 0
    aug = [list(r) + [b] for r, b in zip(matrix, rhs)]
    if not aug:
        return [Normal() for _ in range(n)]
    ech = echelon(aug, allowed_columns=range(n))
    pivot_rows = {i for i, _ in ech.pivots}
    for i, row in enumerate(ech.rows):
        if i not in pivot_rows and not row[n].is_zero():
            return None
    x = [Normal() for _ in range(n)]
    for i, j in ech.pivots:
        x[j] = ech.rows[i][n] / ech.rows[i][j]
    return x
