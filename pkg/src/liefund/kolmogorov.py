"""Hand-built data for ``u_t - u_xx + x u_y = 0`` and its source-point algebra.

These objects are constructed directly from symcore nodes, independent of
the parser, so they double as reference values for parser tests.
"""

from __future__ import annotations

from fractions import Fraction

from .jet import LinearPDE, VectorField
from .symcore import Symbol, SymbolKind, exp, symbols

t, x, y = symbols("t x y")
t0, x0, y0 = symbols("t0 x0 y0", SymbolKind.PARAMETER)
C, C0, C1 = symbols("C C0 C1", SymbolKind.CONSTANT)
VARIABLES = (t, x, y)
SOURCE = (t0, x0, y0)
tau = t - t0


def positivity():
    """Expressions declared positive for the fractional powers used below."""
    return (tau,)


L0 = LinearPDE(VARIABLES, {(0,): 1, (1, 1): -1, (2,): x})


def _field(name, xt, xx, xy, alpha=0):
    return VectorField(VARIABLES, (xt, xx, xy), alpha, name)


X = {
    "X1": _field("X1", 0, 1, t),
    "X2": _field("X2", 2 * t, x, 3 * y, -2),
    "X3": _field("X3", t**2, t * x + 3 * y, 3 * t * y, -(2 * t + x**2)),
    "X4": _field("X4", 0, 3 * t**2, t**3, 3 * (y - t * x)),
    "X5": _field("X5", 0, 2 * t, t**2, -x),
    "X6": _field("X6", 1, 0, 0),
    "X7": _field("X7", 0, 0, 1),
    "X8": _field("X8", 0, 0, 0, 1),
}

# Multipliers lambda with X_p(Lu) = lambda Lu, one per field.
LAMBDA = {
    "X1": 0,
    "X2": -4,
    "X3": -(4 * t + x**2),
    "X4": 3 * (y - t * x),
    "X5": -x,
    "X6": 0,
    "X7": 0,
    "X8": 1,
}

Y = {
    "Y1": _field("Y1", 2 * tau, x - x0, -(x0 * tau - 3 * (y - y0)), -4),
    "Y2": _field(
        "Y2",
        t**2 - t0**2,
        (t * x + 3 * y) - (t0 * x0 + 3 * y0),
        3 * (y - y0) * t - t0 * x0 * tau,
        -(2 * (t + t0) + x**2 - x0**2),
    ),
    "Y3": _field(
        "Y3",
        0,
        3 * (t**2 - t0**2),
        t**3 - 3 * t0**2 * t + 2 * t0**3,
        -3 * (t * x - y - (t0 * x0 - y0)),
    ),
    "Y4": _field("Y4", 0, 2 * tau, tau**2, -(x - x0)),
}

# Y2 exactly as printed, with 2(t - t0) in the u-coefficient.
Y2_AS_PRINTED = _field(
    "Y2",
    t**2 - t0**2,
    (t * x + 3 * y) - (t0 * x0 + 3 * y0),
    3 * (y - y0) * t - t0 * x0 * tau,
    -(2 * tau + x**2 - x0**2),
)

a = symbols("a1 a2 a3 a4 a5 a6 a7 a8", SymbolKind.CONSTANT)
a1, a2, a3, a4, a5, a6, a7, a8 = a

# The four constraint rows in the order printed for the elimination.
CONSTRAINTS = (
    2 * a2 * t0 + a3 * t0**2 + a6,
    a1 + a2 * x0 + a3 * (t0 * x0 + 3 * y0) + 3 * a4 * t0**2 + 2 * a5 * t0,
    a1 * t0 + 3 * a2 * y0 + 3 * a3 * t0 * y0 + a4 * t0**3 + a5 * t0**2 + a7,
    2 * a2 + a3 * (2 * t0 - x0**2) + 3 * a4 * (y0 - t0 * x0) - a5 * x0 + a8,
)
CONSTRAINT_ROW4_AS_PRINTED = 2 * a2 - a3 * (2 * t0 - x0**2) + 3 * a4 * (y0 - t0 * x0) - a5 * x0 + a8

GENERAL_LAMBDA = -4 * a2 - a3 * (4 * t + x**2) + 3 * a4 * (y - t * x) - a5 * x + a8

u = Symbol("u", SymbolKind.PLACEHOLDER)
I1 = tau**2 * exp((x - x0) ** 2 / (4 * tau)) * u
I2 = (tau * (x + x0) - 2 * (y - y0)) / tau ** Fraction(3, 2)

ANSATZ_MULTIPLIER = exp(-((x - x0) ** 2) / (4 * tau)) / tau**2
OMEGA = I2
omega = Symbol("omega")
PROFILE = exp(Fraction(-3, 4) * omega**2)

_EXPONENT = -((x - x0) ** 2) / (4 * tau) - 3 / tau**3 * (y - y0 - tau * (x + x0) / 2) ** 2
CLASSICAL_SOLUTION = C / tau**2 * exp(_EXPONENT)
KERNEL = C1 / tau**2 * exp(_EXPONENT)
