"""Acceptance criteria 1-13, one check per criterion.

Run under pytest (a PASS/FAIL line per criterion is printed in the terminal
summary) or directly: ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import props  # noqa: E402
from liefund import kolmogorov as K  # noqa: E402
from liefund import numerics as N  # noqa: E402
from liefund.fundsol import build_constraints, residual_conditions, same_span, solve_constraints  # noqa: E402
from liefund.jet import VectorField, check_symmetry  # noqa: E402
from liefund.reduce import (  # noqa: E402
    OMEGA,
    Ansatz,
    StepFactor,
    check_invariant,
    substitute_ansatz,
    verify_solution,
    weak_factor_check,
)
from liefund.symcore import assume_positive, is_zero  # noqa: E402

SQRT3_OVER_2PI = math.sqrt(3) / (2 * math.pi)
RESULTS: dict = {}


def _timed(limit):
    def wrap(fn):
        def run():
            start = time.perf_counter()
            detail = fn()
            elapsed = time.perf_counter() - start
            assert elapsed < limit, f"took {elapsed:.2f} s, limit {limit} s"
            return f"{detail}; {elapsed:.2f} s" if detail else f"{elapsed:.2f} s"

        run.__doc__ = fn.__doc__
        return run

    return wrap


@_timed(1.0)
def criterion_1():
    """symmetry verification of X1..X8 and the general multiplier"""
    for name, X in K.X.items():
        lam = check_symmetry(X, K.L0)
        assert lam is not None, f"{name} is not a symmetry"
        assert is_zero(lam - K.LAMBDA[name]), name
    general = sum((X.scale(a) for X, a in zip(K.X.values(), K.a)), VectorField.zero(K.VARIABLES))
    lam = check_symmetry(general, K.L0)
    assert lam is not None and is_zero(lam - K.GENERAL_LAMBDA)
    return "8/8 fields, general lambda exact"


@_timed(2.0)
def criterion_2():
    """source-point algebra has dimension 4 and spans Y1..Y4"""
    lambdas = [check_symmetry(X, K.L0) for X in K.X.values()]
    sol = solve_constraints(build_constraints(list(K.X.values()), lambdas, K.SOURCE))
    assert sol.dimension == 4, sol.dimension
    assert same_span(sol.fields, list(K.Y.values()))
    for name, Y in K.Y.items():
        lam = check_symmetry(Y, K.L0)
        assert lam is not None, name
        assert all(is_zero(r) for r in residual_conditions(Y, lam, K.SOURCE)), name
    return "dimension 4, same span, conditions hold identically"


def criterion_3():
    """elimination system reproduced row by row"""
    lambdas = [K.LAMBDA[n] for n in K.X]
    rows = build_constraints(list(K.X.values()), lambdas, K.SOURCE).equations()
    a2, a3, a6 = K.a2, K.a3, K.a6
    assert is_zero(rows[0] - (2 * a2 * K.t0 + a3 * K.t0**2 + a6))
    remaining = list(K.CONSTRAINTS[1:])
    for row in rows[1:]:
        match = next((i for i, want in enumerate(remaining) if is_zero(row - want)), None)
        assert match is not None, f"unmatched row {row}"
        remaining.pop(match)
    return "4/4 rows (fourth row with +a3(2t0 - x0^2))"


def criterion_4():
    """reduction to phi'' + 3/2 omega phi' + 3/2 phi = 0 and the Gaussian profile"""
    with assume_positive(K.tau):
        ode = substitute_ansatz(K.L0, Ansatz(K.ANSATZ_MULTIPLIER, K.OMEGA))
    assert ode.equals(1, Fraction(3, 2) * OMEGA, Fraction(3, 2)), ode.to_text()
    assert ode.is_solution(K.PROFILE)
    return ode.to_text()


def criterion_5():
    """classical solution with free constant C"""
    with assume_positive(K.tau):
        assert verify_solution(K.L0, K.CLASSICAL_SOLUTION)
    return ""


def criterion_6():
    """I1, I2 invariant under Y1, Y4"""
    with assume_positive(K.tau):
        for Y in ("Y1", "Y4"):
            for invariant in (K.I1, K.I2):
                assert check_invariant(K.Y[Y], invariant)
    return "4/4 pairs"


def criterion_7():
    """weak factor C1 theta(t - t0) + C0 accepted, shifted jump rejected"""
    fields = [K.Y["Y1"], K.Y["Y4"]]
    assert weak_factor_check(fields, StepFactor.heaviside(K.C1, K.C0, K.t0))
    assert not weak_factor_check(fields, StepFactor.heaviside(K.C1, K.C0, K.t0 + 1))
    return ""


def criterion_8():
    """unit mass at four times; C1 = 1 gives 2 pi / sqrt 3"""
    worst = max(abs(N.normalization(N.KernelParams(), tau) - 1.0) for tau in (1e-3, 0.1, 1.0, 10.0))
    assert worst <= 1e-8, worst
    raw = N.normalization(N.KernelParams(C1=1.0), 1.0)
    assert abs(raw - 2 * math.pi / math.sqrt(3)) <= 1e-8, raw
    return f"max |mass - 1| = {worst:.1e}, C1 = 1 mass {raw:.7f}"


def criterion_9():
    """finite-difference residual and second-order convergence"""
    p = N.KernelParams()
    pts = N.sample_points(100, p)
    res = N.residual_fd(p, pts, 1e-4)
    assert res <= 1e-5, res
    _, _, ratio = N.fd_convergence(p, pts, 1e-2)
    assert 3.5 <= ratio <= 4.5, ratio
    return f"residual {res:.1e}, ratio {ratio:.4f}"


def criterion_10():
    """moments match the quadratic-form covariance at tau = 1"""
    m = N.moments(N.KernelParams(), 1.0)
    for got, want in ((m.var_x, 2.0), (m.cov_xy, 1.0), (m.var_y, 2.0 / 3.0)):
        assert abs(got - want) <= 1e-8 * abs(want), (got, want)
    return f"var_x {m.var_x:.12f}, cov_xy {m.cov_xy:.12f}, var_y {m.var_y:.12f}"


def _composition():
    test = np.column_stack([np.linspace(-1.0, 1.0, 10), np.linspace(-0.5, 0.8, 10)])
    return N.chapman_kolmogorov(N.KernelParams(), (0.0, 0.5, 1.0), test, N.QuadratureSpec(points=30))


def criterion_11():
    """Chapman-Kolmogorov on (0, 0.5, 1) and the numeric suite under 10 s"""
    err = _composition()
    assert err <= 1e-6, err
    start = time.perf_counter()
    for check in (criterion_8, criterion_9, criterion_10, _composition, criterion_12):
        check()
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0, elapsed
    return f"error {err:.1e}; numeric suite {elapsed:.2f} s"


def criterion_12():
    """kernel invariant under the flows of Y1 and Y4"""
    p = N.KernelParams()
    pts = N.sample_points(20, p, seed=1)
    worst = max(N.flow_invariance(K.Y[n], a, p, pts) for n in ("Y1", "Y4") for a in (-0.3, -0.2, 0.2, 0.3))
    assert worst <= 1e-9, worst
    return f"max error {worst:.1e}"


def criterion_13():
    """randomised property suites, 200 cases each"""
    for name, prop in props.ALL.items():
        try:
            prop()
        except Exception as exc:
            raise AssertionError(f"{name}: {exc}") from exc
    return f"{len(props.ALL)} suites x {props.CASES} cases"


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 14)}


def evaluate(number: int) -> tuple:
    fn = CRITERIA[number]
    try:
        detail = fn()
        ok = True
    except Exception as exc:  # report, never hide
        detail, ok = f"{type(exc).__name__}: {exc}", False
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {fn.__doc__.strip()}"
    if detail:
        line += f"  [{detail}]"
    RESULTS[number] = line
    return ok, line


@pytest.mark.parametrize("number", list(CRITERIA))
def test_criterion(number):
    ok, line = evaluate(number)
    print(line)
    assert ok, line


if __name__ == "__main__":
    failed = 0
    for n in CRITERIA:
        ok, line = evaluate(n)
        print(line, flush=True)
        failed += not ok
    sys.exit(1 if failed else 0)
