"""Command-line driver: ``liefund <command> problem.lft``."""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import fundsol, jet, numerics, reduce
from .parser import ParseError, ProblemError, _expand_range, bundled_problem_path, parse_problem
from .symcore import (
    Const,
    SymbolKind,
    SymcoreError,
    Symbol,
    eval_numeric,
    is_zero,
    normalize,
    to_text,
)

SCHEMA = 1


class UsageError(Exception):
    pass


@dataclass
class Check:
    name: str
    status: str  # "pass" | "fail" | "warning"
    detail: str = ""
    value: float = None
    tolerance: float = None


@dataclass
class Report:
    command: str
    inputs_digest: str
    checks: list = field(default_factory=list)
    symbolic: dict = field(default_factory=dict)
    numeric: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def add(self, name, ok, detail="", value=None, tolerance=None):
        status = ok if isinstance(ok, str) else ("pass" if ok else "fail")
        self.checks.append(Check(name, status, detail, value, tolerance))
        return ok

    @property
    def ok(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    def to_json(self) -> dict:
        out = asdict(self)
        out["schema"] = SCHEMA
        out["ok"] = self.ok
        return out

    def to_text(self) -> str:
        lines = [f"== {self.command} ({self.inputs_digest[:12]})"]
        for key, val in self.symbolic.items():
            if isinstance(val, list):
                lines.append(f"{key}:")
                lines.extend(f"  {v}" for v in val)
            elif isinstance(val, dict):
                lines.append(f"{key}:")
                lines.extend(f"  {k}: {v}" for k, v in val.items())
            else:
                lines.append(f"{key}: {val}")
        for c in self.checks:
            extra = ""
            if c.value is not None:
                extra = f" [{c.value:.3e}" + (f" vs tol {c.tolerance:.1e}]" if c.tolerance is not None else "]")
            tail = f" {c.detail}" if c.detail else ""
            lines.append(f"  {c.status.upper():7s} {c.name}{extra}{tail}")
        lines.append(f"  {'ok' if self.ok else 'FAILED'} in {self.wall_time:.2f} s")
        return "\n".join(lines)


def _load(path_text):
    path = Path(path_text)
    if not path.exists() and not path.is_absolute() and bundled_problem_path(path.name).exists():
        path = bundled_problem_path(path.name)
    if not path.exists():
        raise UsageError(f"no such file: {path_text}")
    text = path.read_text(encoding="utf-8")
    return parse_problem(path), hashlib.sha256(text.encode()).hexdigest()


def _all_fields(pf) -> dict:
    out = dict(pf.fields)
    out.update(pf.expects)
    return out


def _select(pf, names, default):
    pool = _all_fields(pf)
    if not names:
        return dict(default)
    chosen = {}
    for n in _expand_range(names, pool):
        if n not in pool:
            raise UsageError(f"unknown field {n!r}; known: {', '.join(pool)}")
        chosen[n] = pool[n]
    return chosen


# ----------------------------------------------------------------- commands


def cmd_verify_symmetry(pf, digest, names=()) -> Report:
    rep = Report("verify-symmetry", digest)
    fields = _select(pf, names, pf.fields)
    table = {}
    lambdas = {}
    with pf.positivity():
        for n, X in fields.items():
            res = jet.analyze_symmetry(X, pf.pde)
            if res.is_symmetry:
                lambdas[n] = res.multiplier
                table[n] = to_text(res.multiplier)
                rep.add(f"{n} is a symmetry", True, f"lambda = {table[n]}")
            else:
                table[n] = "remainder " + res.remainder.to_text(pf.variables, pf.decl.depvar)
                rep.add(f"{n} is a symmetry", False, table[n])
        if len(lambdas) == len(fields) and fields:
            coeffs = [Symbol(f"a{i + 1}", SymbolKind.CONSTANT) for i in range(len(fields))]
            general = fundsol.combine(list(fields.values()), coeffs)
            lam = jet.check_symmetry(general, pf.pde)
            expected = Const(0)
            for c, n in zip(coeffs, fields):
                expected = expected + c * lambdas[n]
            ok = lam is not None and is_zero(lam - expected)
            rep.symbolic["general lambda"] = to_text(lam) if lam is not None else "none"
            rep.add("lambda of the general element is the combination of the lambdas", ok)
    rep.symbolic["lambda"] = table
    return rep


def cmd_fundsol(pf, digest) -> Report:
    rep = Report("fundsol", digest)
    basis = list(pf.fields.values())
    if not basis:
        rep.add("fields declared", "warning", "no fields in the problem file; nothing to do")
        return rep
    with pf.positivity():
        lambdas = []
        for n, X in pf.fields.items():
            lam = jet.check_symmetry(X, pf.pde)
            if lam is None:
                rep.add(f"{n} is a symmetry", False, "constraints need symmetries")
                return rep
            lambdas.append(lam)
        system = fundsol.build_constraints(basis, lambdas, pf.source)
        sol = fundsol.solve_constraints(system)
        rep.symbolic["constraints"] = [f"{e} = 0    ({lab})" for e, lab in zip(system.equations(), system.row_labels)]
        rep.symbolic["relations"] = [f"{c.name} = {to_text(r)}" for c, r in sol.relations]
        rep.symbolic["basis"] = [f"{Y.name} = {Y.to_text(pf.decl.depvar)}" for Y in sol.fields]
        rep.numeric["dimension"] = sol.dimension
        for w in sol.warnings:
            rep.add("generic elimination", "warning", w)
        rep.add(f"dimension {sol.dimension}", True)
        for Y in sol.fields:
            ok = jet.check_symmetry(Y, pf.pde) is not None
            rep.add(f"{Y.name} is a symmetry", ok)
        if pf.expects:
            for n, Y in pf.expects.items():
                lam = jet.check_symmetry(Y, pf.pde)
                conds = fundsol.residual_conditions(Y, lam, pf.source) if lam is not None else None
                ok = conds is not None and all(is_zero(c) for c in conds)
                rep.add(f"expected {n} satisfies the source conditions", ok,
                        "" if ok else f"residuals {[to_text(c) for c in conds] if conds else 'not a symmetry'}")
            same = fundsol.same_span(sol.fields, list(pf.expects.values()))
            rep.add("computed basis spans the expected algebra", same)
    return rep


def cmd_reduce(pf, digest) -> Report:
    rep = Report("reduce", digest)
    pool = _all_fields(pf)
    u = pf.decl.depvar_symbol()
    with pf.positivity():
        for inv in pf.invariants:
            for n in inv.under:
                rep.add(f"{inv.name} invariant under {n}", reduce.check_invariant(pool[n], inv.expr, u))
        if pf.multiplier is None or pf.omega is None:
            raise UsageError("the problem file has no ansatz block")
        ans = reduce.Ansatz(pf.multiplier, pf.omega)
        try:
            ode = reduce.substitute_ansatz(pf.pde, ans)
        except reduce.ReductionError as exc:
            rep.add("reduction to an ODE", False, str(exc))
            return rep
        rep.symbolic["reduced ODE"] = ode.to_text()
        rep.add("reduction to an ODE", True)
        if pf.profile is not None:
            rep.symbolic["profile"] = to_text(normalize(pf.profile))
            res = ode.residual(pf.profile)
            rep.add("profile solves the reduced ODE", is_zero(res), "" if is_zero(res) else f"residual {to_text(res)}")
            assembled = ans.assemble(pf.profile)
            rep.add("assembled solution solves the PDE", reduce.verify_solution(pf.pde, assembled))
        for n, s in pf.solutions.items():
            ok = reduce.verify_solution(pf.pde, s)
            rep.add(f"solution {n} solves the PDE for t > t0", ok,
                    "" if ok else f"residual {to_text(pf.pde.apply(s))}")
    return rep


def _kernel_params(pf, c1=None) -> numerics.KernelParams:
    k = {key: float(v) for key, v in pf.kernel.items()}
    unknown = set(k) - {"t0", "x0", "y0", "C0", "C1"}
    if unknown:
        raise UsageError(f"unknown kernel entries {sorted(unknown)}")
    p = numerics.KernelParams(**k)
    if c1 is not None:
        p = numerics.KernelParams(p.t0, p.x0, p.y0, p.C0, c1)
    return p


def cmd_verify_kernel(pf, digest, *, tol=1e-8, points=100, nodes=30, times=None, c1=None, seed=0) -> Report:
    rep = Report("verify-kernel", digest)
    p = _kernel_params(pf, c1)
    rep.numeric["params"] = asdict(p)
    rng_pts = numerics.sample_points(points, p, seed=seed)

    res = numerics.residual_fd(p, rng_pts, 1e-4)
    rep.add("finite-difference residual (h = 1e-4)", res <= 1e-5, value=res, tolerance=1e-5)
    e1, e2, ratio = numerics.fd_convergence(p, rng_pts, 1e-2)
    rep.numeric["fd_errors"] = [e1, e2]
    rep.add("second-order convergence ratio in [3.5, 4.5]", 3.5 <= ratio <= 4.5, f"ratio {ratio:.4f}")

    q = numerics.QuadratureSpec(points=20)
    for tau in (1e-3, 0.1, 1.0, 10.0):
        mass = numerics.normalization(p, p.t0 + tau, q)
        rep.numeric[f"mass(tau={tau:g})"] = mass
        rep.add(f"unit mass at tau = {tau:g}", abs(mass - 1.0) <= tol, f"mass {mass:.10f}",
                value=abs(mass - 1.0), tolerance=tol)

    m = numerics.moments(p, p.t0 + 1.0, q)
    rep.numeric["moments(tau=1)"] = asdict(m)
    for name, got, want in (("var_x", m.var_x, 2.0), ("cov_xy", m.cov_xy, 1.0), ("var_y", m.var_y, 2.0 / 3.0),
                            ("mean_x", m.mean_x, p.x0), ("mean_y", m.mean_y, p.y0 + p.x0)):
        err = abs(got - want) / max(1.0, abs(want))
        rep.add(f"{name} at tau = 1", err <= tol, value=err, tolerance=tol)

    near = numerics.concentration(p, p.t0 + 1e-4, 0.1)
    rep.add("mass concentrates at the source (tau = 1e-4, r = 0.1)", abs(near - 1.0) <= 1e-6, value=abs(near - 1.0),
            tolerance=1e-6)

    times = times or (p.t0, p.t0 + 0.5, p.t0 + 1.0)
    ck_pts = numerics.sample_points(10, numerics.KernelParams(times[0], p.x0, p.y0), tau=(times[2] - times[0],) * 2,
                                    seed=seed + 1)[:, 1:]
    ck = numerics.chapman_kolmogorov(p, times, ck_pts, numerics.QuadratureSpec(points=nodes))
    rep.add(f"Chapman-Kolmogorov through t = {times[1]:g}", ck <= 1e-6, value=ck, tolerance=1e-6)

    pool = _all_fields(pf)
    flow_pts = numerics.sample_points(20, p, seed=seed + 2)
    for n in pf.flows:
        if n not in pool:
            raise UsageError(f"flow field {n!r} is not declared")
        for a in (0.2, -0.2, 0.3, -0.3):
            err = numerics.flow_invariance(pool[n], a, p, flow_pts)
            rep.add(f"kernel invariant under the flow of {n}, a = {a:+g}", err <= 1e-9, value=err, tolerance=1e-9)

    if "kernel" in pf.solutions:
        expr = pf.solutions["kernel"]
        binding = {"pi": math.pi, **p.source(), "C0": p.C0, "C1": p.C1}
        worst = 0.0
        for t, x, y in flow_pts[:5]:
            b = {**binding, "t": t, "x": x, "y": y}
            sym = eval_numeric(expr, b)
            worst = max(worst, abs(sym - numerics.kernel(numerics.KernelParams(p.t0, p.x0, p.y0, 0.0), t, x, y)))
        rep.add("declared kernel expression matches the evaluator", worst <= 1e-12, value=worst, tolerance=1e-12)
    return rep


def cmd_commutators(pf, digest, names=()) -> Report:
    rep = Report("commutators", digest)
    fields = _select(pf, names, pf.fields)
    basis = list(fields.values())
    names = list(fields)
    others = {n: X for n, X in _all_fields(pf).items() if n not in fields}
    with pf.positivity():
        try:
            table = jet.structure_constants(basis, candidates=others)
        except jet.ClosureError as exc:
            rep.add("closure", False, str(exc))
            return rep
    lines = []
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            terms = []
            for k, c in enumerate(table[i][j]):
                if isinstance(c, Fraction):
                    if c == 0:
                        continue
                    coef = "" if c == 1 else "-" if c == -1 else f"{c}*"
                else:
                    coef = f"({to_text(c)})*"
                terms.append(f"{coef}{names[k]}")
            if terms:
                lines.append(f"[{names[i]}, {names[j]}] = " + " + ".join(terms).replace("+ -", "- "))
    rep.symbolic["brackets"] = lines
    rep.add("closure", True, f"{len(basis)} fields")
    return rep


COMMANDS = ("verify-symmetry", "fundsol", "reduce", "verify-kernel", "commutators")


def _times(text):
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("times must be comma-separated numbers") from None
    if len(vals) != 3:
        raise argparse.ArgumentTypeError("exactly three times are required")
    if not vals[0] < vals[1] < vals[2]:
        raise argparse.ArgumentTypeError("times must be strictly increasing")
    return vals


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="liefund", description="Symmetry and fundamental-solution checks for linear PDEs.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable report")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("verify-symmetry", "commutators"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("file")
        sp.add_argument("fields", nargs="*", help="field names or ranges such as X1..X8")
    for name in ("fundsol", "reduce"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("file")
    kernel_opts = argparse.ArgumentParser(add_help=False)
    kernel_opts.add_argument("--tol", type=float, default=1e-8, help="tolerance for mass and moments")
    kernel_opts.add_argument("--points", type=int, default=100, help="residual sample points")
    kernel_opts.add_argument("--nodes", type=int, default=30, help="quadrature nodes per axis for composition")
    kernel_opts.add_argument("--times", type=_times, default=None, help="t1,t2,t3 for composition")
    kernel_opts.add_argument("--c1", type=float, default=None, help="override the kernel constant")
    kernel_opts.add_argument("--seed", type=int, default=0, help="seed for quasi-random points")
    sp = sub.add_parser("verify-kernel", parents=[common, kernel_opts])
    sp.add_argument("file")
    sp = sub.add_parser("run", parents=[common, kernel_opts], help="run every task listed in the file")
    sp.add_argument("file")
    return ap


def _dispatch(cmd, pf, digest, args) -> Report:
    start = time.perf_counter()
    if cmd == "verify-symmetry":
        rep = cmd_verify_symmetry(pf, digest, getattr(args, "fields", ()))
    elif cmd == "fundsol":
        rep = cmd_fundsol(pf, digest)
    elif cmd == "reduce":
        rep = cmd_reduce(pf, digest)
    elif cmd == "verify-kernel":
        rep = cmd_verify_kernel(pf, digest, tol=args.tol, points=args.points, nodes=args.nodes, times=args.times,
                                c1=args.c1, seed=args.seed)
    elif cmd == "commutators":
        rep = cmd_commutators(pf, digest, getattr(args, "fields", ()))
    else:
        raise UsageError(f"unknown task {cmd!r}")
    rep.wall_time = time.perf_counter() - start
    return rep


def _default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, Fraction):
        return str(o)
    return str(o)


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        pf, digest = _load(args.file)
        if pf.pde is None:
            raise UsageError("the problem file declares no PDE")
        cmds = [t for t in pf.tasks] if args.command == "run" else [args.command]
        reports = [_dispatch(c, pf, digest, args) for c in cmds]
    except (UsageError, ProblemError, ParseError) as exc:
        print(f"liefund: error: {exc}", file=sys.stderr)
        return 2
    except (SymcoreError, numerics.NumericalError) as exc:
        print(f"liefund: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    ok = all(r.ok for r in reports)
    if args.json:
        if args.command == "run":
            payload = {"schema": SCHEMA, "command": "run", "ok": ok, "reports": [r.to_json() for r in reports]}
        else:
            payload = reports[0].to_json()
        print(json.dumps(payload, indent=2, default=_default, ensure_ascii=False))
    else:
        print("\n\n".join(r.to_text() for r in reports))
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
