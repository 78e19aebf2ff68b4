"""Floating-point checks of the fundamental solution.

The kernel is a bivariate Gaussian in ``(x, y)`` for fixed ``tau = t - t0 > 0``::

    mean       = (x0, y0 + tau*x0)
    covariance = [[2 tau, tau^2], [tau^2, 2 tau^3 / 3]]
    precision  = [[2/tau, -3/tau^2], [-3/tau^2, 6/tau^3]],  det = 3 / tau^4

so its mass is ``C1 * 2 pi / sqrt(3)``.  Integrals against it use tensor
Gauss-Hermite rules in coordinates that whiten this Gaussian exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Union

import numpy as np
from numpy.polynomial.hermite import hermgauss
from scipy import integrate
from scipy.stats import qmc

from .jet import VectorField
from .symcore import compile_numeric, free_symbols

C1_DEFAULT = math.sqrt(3.0) / (2.0 * math.pi)


class NumericalError(ArithmeticError):
    pass


class SingularTimeError(NumericalError):
    pass


@dataclass(frozen=True)
class KernelParams:
    t0: float = 0.0
    x0: float = 0.0
    y0: float = 0.0
    C0: float = 0.0
    C1: float = C1_DEFAULT

    def source(self) -> dict:
        return {"t0": self.t0, "x0": self.x0, "y0": self.y0}


@dataclass(frozen=True)
class QuadratureSpec:
    rule: str = "gauss-hermite"
    points: int = 20
    tol: float = 1e-10

    def __post_init__(self):
        if self.rule not in ("gauss-hermite", "adaptive"):
            raise ValueError(f"unknown quadrature rule {self.rule!r}")
        if self.points < 2:
            raise ValueError("at least 2 points per axis are required")


def _exponent(p: KernelParams, tau, x, y):
    shift = y - p.y0 - tau * (x + p.x0) / 2.0
    return -((x - p.x0) ** 2) / (4.0 * tau) - 3.0 * shift**2 / tau**3


def kernel(p: KernelParams, t, x, y):
    """``(C1 theta(tau) + C0) / tau^2 * exp(...)``, vectorised over the arguments."""
    t, x, y = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (t, x, y)))
    tau = t - p.t0
    if np.any(tau == 0.0):
        raise SingularTimeError("the kernel is singular at t = t0")
    amp = np.where(tau > 0, p.C1, 0.0) + p.C0
    with np.errstate(over="ignore", invalid="ignore"):
        val = np.where(amp != 0.0, amp / tau**2 * np.exp(_exponent(p, tau, x, y)), 0.0)
    return val if val.ndim else float(val)


def covariance(tau: float) -> np.ndarray:
    return np.array([[2.0 * tau, tau**2], [tau**2, 2.0 * tau**3 / 3.0]])


def mean(p: KernelParams, tau: float) -> np.ndarray:
    return np.array([p.x0, p.y0 + tau * p.x0])


# ---------------------------------------------------------------- residuals

Target = Union[KernelParams, Callable]


def _as_function(target: Target):
    if isinstance(target, KernelParams):
        return lambda t, x, y: kernel(target, t, x, y)
    return target


def residual_fd(target: Target, points, h: float = 1e-4) -> float:
    """Max of ``|u_t - u_xx + x u_y|`` by second-order central differences."""
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    if isinstance(target, KernelParams) and np.any(pts[:, 0] - target.t0 < 10.0 * h):
        raise NumericalError("step too large: every point needs t - t0 >= 10 h")
    f = _as_function(target)
    t, x, y = pts.T
    u = np.asarray(f(t, x, y), dtype=float)
    u_t = (np.asarray(f(t + h, x, y)) - np.asarray(f(t - h, x, y))) / (2.0 * h)
    u_xx = (np.asarray(f(t, x + h, y)) - 2.0 * u + np.asarray(f(t, x - h, y))) / h**2
    u_y = (np.asarray(f(t, x, y + h)) - np.asarray(f(t, x, y - h))) / (2.0 * h)
    return float(np.max(np.abs(u_t - u_xx + x * u_y)))


def fd_convergence(target: Target, points, h: float = 1e-2):
    """``(error(h), error(h/2), ratio)``; a ratio near 4 means second order."""
    e1 = residual_fd(target, points, h)
    e2 = residual_fd(target, points, h / 2.0)
    return e1, e2, e1 / e2 if e2 > 0 else math.inf


def sample_points(n: int, p: KernelParams = KernelParams(), *, tau=(0.5, 2.0), x_halfwidth=2.0,
                  omega_halfwidth=2.0, seed: int = 0) -> np.ndarray:
    """Quasi-random ``(t, x, y)`` points around the kernel's bulk.

    ``y`` is placed within ``omega_halfwidth * tau^(3/2)`` of the ridge
    ``y0 + tau (x + x0) / 2``, where the kernel is not negligible.
    """
    u = qmc.Halton(d=3, scramble=True, seed=seed).random(n)
    tt = tau[0] + (tau[1] - tau[0]) * u[:, 0]
    xx = p.x0 + x_halfwidth * (2.0 * u[:, 1] - 1.0)
    yy = p.y0 + tt * (xx + p.x0) / 2.0 + omega_halfwidth * tt**1.5 * (2.0 * u[:, 2] - 1.0)
    return np.column_stack([p.t0 + tt, xx, yy])


# --------------------------------------------------------------- quadrature


def _whitening(tau: float) -> np.ndarray:
    """``A`` with ``(x, y) = mean + A z`` turning the exponent into ``-|z|^2``."""
    return math.sqrt(2.0) * np.linalg.cholesky(covariance(tau))


def _whitened_integral(h, A, q: QuadratureSpec) -> float:
    """``integral of h(z) exp(-|z|^2) dz`` times ``|det A|``.

    ``h`` already carries the factor ``exp(|z|^2)`` so that it stays O(1)
    where the Gaussian weight lives.
    """
    jac = abs(np.linalg.det(A))
    if q.rule == "gauss-hermite":
        nodes, weights = hermgauss(q.points)
        z1, z2 = np.meshgrid(nodes, nodes, indexing="ij")
        total = float(np.sum(np.outer(weights, weights) * h(z1, z2))) * jac
    else:
        total, _ = integrate.dblquad(
            lambda z2, z1: float(h(np.float64(z1), np.float64(z2))) * math.exp(-(z1**2) - z2**2),
            -np.inf, np.inf, -np.inf, np.inf, epsabs=q.tol, epsrel=q.tol,
        )
        total *= jac
    if not math.isfinite(total):
        raise NumericalError("non-finite quadrature result; try the adaptive rule")
    return total


def integrate_against(p: KernelParams, t: float, g=None, q: QuadratureSpec = QuadratureSpec()) -> float:
    """``integral of g(x, y) * kernel(t, x, y) dx dy`` over the plane."""
    tau = t - p.t0
    if tau <= 0:
        raise NumericalError("integrals are only defined for t > t0")
    A = _whitening(tau)
    m = mean(p, tau)
    amp = p.C1 + p.C0

    def h(z1, z2):
        x = m[0] + A[0, 0] * z1
        y = m[1] + A[1, 0] * z1 + A[1, 1] * z2
        # formed in log space so tiny tau does not underflow
        with np.errstate(over="ignore", invalid="ignore"):
            val = amp / tau**2 * np.exp(_exponent(p, tau, x, y) + z1**2 + z2**2)
        return val * (1.0 if g is None else g(x, y))

    return _whitened_integral(h, A, q)


def normalization(p: KernelParams, t: float, q: QuadratureSpec = QuadratureSpec()) -> float:
    return integrate_against(p, t, None, q)


@dataclass(frozen=True)
class Moments:
    mean_x: float
    mean_y: float
    var_x: float
    var_y: float
    cov_xy: float


def moments(p: KernelParams, t: float, q: QuadratureSpec = QuadratureSpec()) -> Moments:
    mass = normalization(p, t, q)
    mx = integrate_against(p, t, lambda x, y: x, q) / mass
    my = integrate_against(p, t, lambda x, y: y, q) / mass
    vx = integrate_against(p, t, lambda x, y: (x - mx) ** 2, q) / mass
    vy = integrate_against(p, t, lambda x, y: (y - my) ** 2, q) / mass
    cxy = integrate_against(p, t, lambda x, y: (x - mx) * (y - my), q) / mass
    return Moments(mx, my, vx, vy, cxy)


def concentration(p: KernelParams, t: float, radius: float, q: QuadratureSpec = QuadratureSpec(points=40)) -> float:
    """Mass inside the disc of ``radius`` around the source ``(x0, y0)``."""
    return integrate_against(
        p, t, lambda x, y: ((x - p.x0) ** 2 + (y - p.y0) ** 2 <= radius**2).astype(float), q
    )


def _source_quadratic(tau, x, y):
    """Precision and mean of the kernel to ``(x, y)`` viewed as a function of its source."""
    B = np.array([[1.0, 0.0], [tau / 2.0, 1.0]])
    D = np.diag([1.0 / (4.0 * tau), 3.0 / tau**3])
    P = 2.0 * B.T @ D @ B
    m = np.linalg.solve(B, [x, y - tau * x / 2.0])
    return P, m


def chapman_kolmogorov(p: KernelParams, times, points, q: QuadratureSpec = QuadratureSpec(points=30)) -> float:
    """Max over ``points`` of the composition defect through the middle time.

    ``p`` supplies the source and ``C1``; its ``t0`` is replaced by ``times[0]``.
    The intermediate integral is whitened against the product of the two
    Gaussians, so the rule sees a smooth integrand.
    """
    t1, t2, t3 = times
    if not t1 < t2 < t3:
        raise ValueError("times must be strictly increasing")
    first = replace(p, t0=t1, C0=0.0)
    tau1, tau2 = t2 - t1, t3 - t2
    P1 = np.linalg.inv(covariance(tau1))
    m1 = mean(first, tau1)
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    worst = 0.0
    for x, y in pts:
        P2, m2 = _source_quadratic(tau2, x, y)
        P = P1 + P2
        m = np.linalg.solve(P, P1 @ m1 + P2 @ m2)
        A = math.sqrt(2.0) * np.linalg.cholesky(np.linalg.inv(P))

        def h(z1, z2, x=x, y=y, m=m, A=A):
            xs = m[0] + A[0, 0] * z1
            ys = m[1] + A[1, 0] * z1 + A[1, 1] * z2
            shift = y - ys - tau2 * (x + xs) / 2.0
            log_second = -((x - xs) ** 2) / (4.0 * tau2) - 3.0 * shift**2 / tau2**3
            log_first = _exponent(first, tau1, xs, ys)
            return (p.C1**2 / (tau1 * tau2) ** 2) * np.exp(log_first + log_second + z1**2 + z2**2)

        composed = _whitened_integral(h, A, q)
        worst = max(worst, abs(composed - kernel(first, t3, x, y)))
    return worst


# -------------------------------------------------------------------- flows


def _compile_field(Y: VectorField, p: KernelParams):
    bound = p.source()
    consts = {}
    for s in set().union(*(free_symbols(c) for c in Y.components())):
        if s in Y.variables:
            continue
        if s.name not in bound:
            raise NumericalError(f"no numeric value for symbol {s.name!r}")
        consts[s] = bound[s.name]
    fns = [compile_numeric(c, Y.variables, consts) for c in Y.components()]

    def rhs(_a, state):
        t, x, y, u = state
        out = [float(f(t, x, y)) for f in fns]
        out[-1] *= u
        return out

    return rhs


def flow_invariance(Y: VectorField, a: float, p: KernelParams, points, rtol: float = 1e-12,
                    atol: float = 1e-14) -> float:
    """Max ``|u(a) - kernel(t(a), x(a), y(a))|`` along the Lie flow of ``Y``."""
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    if a == 0:
        return 0.0
    rhs = _compile_field(Y, p)

    def leaves_domain(_a, state):
        return state[0] - p.t0

    leaves_domain.terminal = True
    worst = 0.0
    for t, x, y in pts:
        u0 = kernel(p, t, x, y)
        sol = integrate.solve_ivp(rhs, (0.0, a), [t, x, y, u0], method="DOP853", rtol=rtol, atol=atol,
                                  events=leaves_domain)
        if sol.status == 1:
            raise NumericalError("the flow leaves the domain t > t0")
        if not sol.success:
            raise NumericalError(sol.message)
        tb, xb, yb, ub = sol.y[:, -1]
        worst = max(worst, abs(ub - kernel(p, tb, xb, yb)))
    return worst
