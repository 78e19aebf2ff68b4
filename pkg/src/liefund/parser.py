"""Text input: expressions, vector fields, PDEs and ``.lft`` problem files.

Expression grammar::

    expr     := term (('+' | '-') term)*
    term     := factor (('*' | '/') factor)*
    factor   := atom ['^' exponent] | '-' factor
    atom     := number | symbol | '(' expr ')' | 'exp' '(' expr ')'
    exponent := integer | '(' ['-'] integer ['/' integer] ')'

Numbers are exact: ``0.25`` is the rational ``1/4``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .jet import JetError, LinearPDE, VectorField
from .symcore import (
    Const,
    DomainAssumptionError,
    Expression,
    Power,
    Symbol,
    SymbolKind,
    SymcoreError,
    assume_positive,
    diff_any,
    exp,
    free_symbols,
    is_zero,
    normalize,
)
from .symcore.expr import walk


class ParseError(ValueError):
    def __init__(self, message, line=1, col=1):
        self.message = message
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {message}")


class UndeclaredSymbolError(ParseError):
    pass


class ExponentError(ParseError):
    pass


class PositivityError(ParseError):
    """A fractional power whose base is not declared positive."""


class DuplicateDeclarationError(ParseError):
    pass


class ProblemError(ValueError):
    """All errors found in one problem file."""

    def __init__(self, errors, source="<problem>"):
        self.errors = list(errors)
        lines = [f"{source}:{e.line}:{e.col}: {e.message}" for e in self.errors]
        super().__init__("\n".join(lines))


@dataclass
class Declarations:
    variables: list = field(default_factory=list)
    depvar: str = "u"
    params: list = field(default_factory=list)
    constants: list = field(default_factory=list)
    positive: list = field(default_factory=list)

    @classmethod
    def of(cls, variables="", params="", constants="", depvar="u", positive=()):
        def syms(names, kind):
            if isinstance(names, str):
                names = names.replace(",", " ").split()
            return [n if isinstance(n, Symbol) else Symbol(n, kind) for n in names]

        return cls(
            syms(variables, SymbolKind.INDEPENDENT),
            depvar,
            syms(params, SymbolKind.PARAMETER),
            syms(constants, SymbolKind.CONSTANT),
            list(positive),
        )

    def table(self) -> dict:
        out = {}
        for s in self.variables + self.params + self.constants:
            out[s.name] = s
        return out

    def depvar_symbol(self) -> Symbol:
        return Symbol(self.depvar, SymbolKind.PLACEHOLDER)


# ---------------------------------------------------------------- tokenizer

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+|\n)
  | (?P<number>\d+\.\d*|\.\d+|\d+)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<partial>∂_?(?=[A-Za-z_]))
  | (?P<op>[-+*/^(),;=])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str, line: int = 1, col: int = 1) -> list:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        tok = m.group()
        if kind == "partial":
            nm = _TOKEN.match(text, m.end())
            name = nm.group() if nm and nm.lastgroup == "name" else ""
            out.append(Token("name", "D" + name, line, col))
            span = m.end() + len(name) - pos
            col += span
            pos += span
            continue
        if kind == "ws":
            if tok == "\n":
                line, col = line + 1, 1
            else:
                col += len(tok)
        else:
            out.append(Token(kind, tok, line, col))
            col += len(tok)
        pos = m.end()
    out.append(Token("end", "", line, col))
    return out


def _number(text: str) -> Fraction:
    if "." in text:
        whole, frac = text.split(".")
        whole = whole or "0"
        return Fraction(int(whole + frac) if frac else int(whole), 10 ** len(frac))
    return Fraction(int(text))


class _Parser:
    def __init__(self, tokens, names: dict):
        self.tokens = tokens
        self.pos = 0
        self.names = names

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def expect(self, text, what=None):
        t = self.tok
        if t.text != text or t.kind == "end":
            raise ParseError(f"expected {what or repr(text)}, found {t.text or 'end of input'!r}", t.line, t.col)
        return self.advance()

    def parse_all(self) -> Expression:
        e = self.expr()
        t = self.tok
        if t.kind != "end":
            raise ParseError(f"unexpected {t.text!r}", t.line, t.col)
        return e

    def expr(self) -> Expression:
        e = self.term()
        while self.tok.text in ("+", "-") and self.tok.kind == "op":
            op = self.advance().text
            rhs = self.term()
            e = e + rhs if op == "+" else e - rhs
        return e

    def term(self) -> Expression:
        e = self.factor()
        while self.tok.text in ("*", "/") and self.tok.kind == "op":
            op = self.advance().text
            rhs = self.factor()
            e = e * rhs if op == "*" else e / rhs
        return e

    def factor(self) -> Expression:
        if self.tok.kind == "op" and self.tok.text == "-":
            self.advance()
            return -self.factor()
        if self.tok.kind == "op" and self.tok.text == "+":
            self.advance()
            return self.factor()
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.advance()
            return Power(base, self.exponent())
        return base

    def exponent(self) -> Fraction:
        t = self.tok
        if t.kind == "number":
            self.advance()
            if "." in t.text:
                raise ExponentError("exponent must be an integer or a rational literal", t.line, t.col)
            return Fraction(int(t.text))
        if t.text != "(":
            raise ExponentError("exponent must be an integer or '(p/q)'", t.line, t.col)
        self.advance()
        sign = 1
        if self.tok.text == "-":
            self.advance()
            sign = -1
        num = self.tok
        if num.kind != "number" or "." in num.text:
            raise ExponentError("exponent must be an integer or a rational literal", num.line, num.col)
        self.advance()
        value = Fraction(int(num.text))
        if self.tok.text == "/":
            self.advance()
            den = self.tok
            if den.kind != "number" or "." in den.text:
                raise ExponentError("exponent denominator must be an integer", den.line, den.col)
            if int(den.text) == 0:
                raise ExponentError("zero exponent denominator", den.line, den.col)
            self.advance()
            value /= int(den.text)
        self.expect(")", "')' closing the exponent")
        return sign * value

    def atom(self) -> Expression:
        t = self.tok
        if t.kind == "number":
            self.advance()
            return Const(_number(t.text))
        if t.kind == "name":
            self.advance()
            if t.text == "exp" and self.tok.text == "(":
                self.advance()
                arg = self.expr()
                self.expect(")", "')' closing exp(")
                return exp(arg)
            sym = self.names.get(t.text)
            if sym is None:
                raise UndeclaredSymbolError(f"undeclared symbol {t.text!r}", t.line, t.col)
            return sym
        if t.text == "(":
            self.advance()
            e = self.expr()
            self.expect(")", "')'")
            return e
        raise ParseError(f"unexpected {t.text or 'end of input'!r}", t.line, t.col)


def _check_positivity(e: Expression, decl: Declarations, line=1, col=1):
    if not any(isinstance(n, Power) and n.exponent.denominator != 1 for n in walk(e)):
        return
    try:
        with assume_positive(*decl.positive):
            e.normal_form()
    except DomainAssumptionError as exc:
        raise PositivityError(f"{exc}; declare the base in 'positive:'", line, col) from None


def _parse(text, names, decl, line=1, col=1) -> Expression:
    e = _Parser(tokenize(text, line, col), names).parse_all()
    _check_positivity(e, decl, line, col)
    return e


def parse_expression(text: str, decl: Optional[Declarations] = None, *, allow_depvar=False,
                     extra=(), line=1, col=1) -> Expression:
    """Parse ``text`` against the declared symbols.

    ``allow_depvar`` admits the dependent variable as a placeholder symbol;
    ``extra`` adds further symbols (for instance a similarity variable).
    """
    decl = decl or Declarations()
    names = decl.table()
    for s in extra:
        names[s.name] = s
    if allow_depvar:
        names[decl.depvar] = decl.depvar_symbol()
    return _parse(text, names, decl, line, col)


# ------------------------------------------------------------ vector fields


def _linear_parts(e: Expression, markers: dict, what: str, line, col):
    """Split ``e = sum coeff_k * marker_k`` and check nothing is left over."""
    parts = {}
    rest = e
    for key, m in markers.items():
        c = diff_any(e, m)
        if any(s in markers.values() for s in free_symbols(c)):
            raise ParseError(f"{what} is not linear in {m.name}", line, col)
        parts[key] = c
        rest = rest - c * m
    if not is_zero(rest):
        raise ParseError(f"{what} has terms without a derivative operator: {normalize(rest)}", line, col)
    return parts


def parse_vector_field(text: str, decl: Declarations, name=None, line=1, col=1) -> VectorField:
    """Either ``xi_t = ...; xi_x = ...; alpha = ...`` or ``2*t*Dt + x*Dx - 2*u*Du``."""
    if "=" in text:
        return _parse_component_form(text, decl, name, line, col)
    u = decl.depvar_symbol()
    markers = {v.name: Symbol("D" + v.name, SymbolKind.PLACEHOLDER) for v in decl.variables}
    markers[decl.depvar] = Symbol("D" + decl.depvar, SymbolKind.PLACEHOLDER)
    names = decl.table()
    names[decl.depvar] = u
    for m in markers.values():
        names[m.name] = m
    e = _parse(text, names, decl, line, col)
    try:
        parts = _linear_parts(e, markers, "vector field", line, col)
    except SymcoreError as exc:
        raise ParseError(str(exc), line, col) from None
    xi = []
    for v in decl.variables:
        c = parts[v.name]
        if u in free_symbols(normalize(c)):
            raise ParseError(f"coefficient of D{v.name} depends on {decl.depvar}", line, col)
        xi.append(normalize(c))
    cu = normalize(parts[decl.depvar])
    alpha = normalize(diff_any(cu, u))
    if u in free_symbols(alpha) or not is_zero(cu - alpha * u):
        raise ParseError(
            f"coefficient of D{decl.depvar} must be alpha*{decl.depvar} with alpha free of {decl.depvar}",
            line, col,
        )
    return VectorField(decl.variables, xi, alpha, name)


def _parse_component_form(text, decl, name, line, col) -> VectorField:
    comps = {}
    for part in text.split(";"):
        if not part.strip():
            continue
        if "=" not in part:
            raise ParseError(f"expected 'name = expression', got {part.strip()!r}", line, col)
        key, rhs = part.split("=", 1)
        key = key.strip()
        valid = {f"xi_{v.name}" for v in decl.variables} | {"alpha"}
        if key not in valid:
            raise ParseError(f"unknown component {key!r}; expected one of {sorted(valid)}", line, col)
        if key in comps:
            raise DuplicateDeclarationError(f"component {key!r} given twice", line, col)
        comps[key] = parse_expression(rhs, decl, line=line, col=col)
    xi = [comps.get(f"xi_{v.name}", Const(0)) for v in decl.variables]
    return VectorField(decl.variables, xi, comps.get("alpha", Const(0)), name)


# --------------------------------------------------------------------- PDEs


def _jet_index(suffix: str, decl: Declarations):
    """Split a derivative suffix like ``xx`` into variable positions."""
    names = sorted(((v.name, i) for i, v in enumerate(decl.variables)), key=lambda p: -len(p[0]))
    idx = []
    rest = suffix
    while rest:
        for nm, i in names:
            if rest.startswith(nm):
                idx.append(i)
                rest = rest[len(nm):]
                break
        else:
            return None
    return tuple(sorted(idx))


def parse_pde(text: str, decl: Declarations, line=1, col=1) -> LinearPDE:
    """``u_t - u_xx + x*u_y = 0``; the right-hand side is moved to the left."""
    if "=" in text:
        lhs, rhs = text.split("=", 1)
    else:
        lhs, rhs = text, "0"
    toks = tokenize(lhs, line, col)
    rhs_toks = tokenize(rhs, line, col + len(lhs) + 1)
    names = decl.table()
    jets = {}
    for t in toks + rhs_toks:
        if t.kind != "name" or t.text in jets:
            continue
        if t.text == decl.depvar:
            idx = ()
        elif t.text.startswith(decl.depvar + "_"):
            idx = _jet_index(t.text[len(decl.depvar) + 1:], decl)
            if idx is None:
                raise ParseError(f"bad derivative {t.text!r}", t.line, t.col)
        else:
            continue
        if len(idx) > 2:
            raise ParseError(f"{t.text}: order {len(idx)} derivative; order <= 2 supported", t.line, t.col)
        jets[t.text] = Symbol(t.text, SymbolKind.PLACEHOLDER)
    if not jets:
        raise ParseError("PDE does not involve the dependent variable", line, col)
    names.update(jets)
    e = _Parser(toks, names).parse_all() - _Parser(rhs_toks, names).parse_all()
    try:
        parts = _linear_parts(e, jets, "PDE", line, col)
    except SymcoreError as exc:
        raise ParseError(str(exc), line, col) from None
    terms = {}
    for nm, c in parts.items():
        idx = () if nm == decl.depvar else _jet_index(nm[len(decl.depvar) + 1:], decl)
        c = normalize(c)
        terms[idx] = normalize(terms[idx] + c) if idx in terms else c
    terms = {k: v for k, v in terms.items() if not is_zero(v)}
    if not terms:
        raise ParseError("PDE is identically zero", line, col)
    try:
        return LinearPDE(decl.variables, terms, decl.depvar)
    except JetError as exc:
        raise ParseError(str(exc), line, col) from None


# ------------------------------------------------------------ problem files


@dataclass
class Invariant:
    name: str
    under: list
    expr: Expression


@dataclass
class ProblemFile:
    decl: Declarations
    pde: Optional[LinearPDE] = None
    fields: dict = field(default_factory=dict)
    expects: dict = field(default_factory=dict)
    invariants: list = field(default_factory=list)
    multiplier: Optional[Expression] = None
    omega: Optional[Expression] = None
    profile: Optional[Expression] = None
    solutions: dict = field(default_factory=dict)
    kernel: dict = field(default_factory=dict)
    flows: list = field(default_factory=list)
    tasks: list = field(default_factory=list)
    path: Optional[str] = None

    @property
    def variables(self):
        return self.decl.variables

    @property
    def source(self):
        return tuple(self.decl.params)

    def positivity(self):
        return assume_positive(*self.decl.positive)


OMEGA = Symbol("omega")

_DECL_KEYS = ("vars", "depvar", "params", "constants", "positive")
_BODY_KEYS = ("pde", "ansatz", "profile", "kernel", "flows", "task")
_NAMED_KEYS = ("field", "expect", "solution", "invariant")
_HEADER = re.compile(r"^(?P<key>[A-Za-z_]+)(?:\s+(?P<arg>[^:]*?))?\s*:(?P<rest>.*)$")


@dataclass
class _Entry:
    key: str
    arg: str
    text: str
    line: int
    col: int


def _split_entries(text: str, errors: list):
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        if body[0] in " \t" and entries:
            entries[-1].text += "\n" + body
            continue
        m = _HEADER.match(body)
        if not m:
            errors.append(ParseError(f"expected 'section: ...', got {body.strip()!r}", lineno, 1))
            continue
        key = m.group("key")
        arg = (m.group("arg") or "").strip()
        if key not in _DECL_KEYS + _BODY_KEYS + _NAMED_KEYS:
            errors.append(ParseError(f"unknown section {key!r}", lineno, 1))
            continue
        if key in _NAMED_KEYS and not arg:
            errors.append(ParseError(f"'{key}' needs a name", lineno, 1))
            continue
        entries.append(_Entry(key, arg, m.group("rest"), lineno, m.start("rest") + 1))
    return entries


def _names(text: str):
    return [n for n in re.split(r"[,\s]+", text.strip()) if n]


def _expand_range(names, available):
    """``X1..X8`` -> ``X1, ..., X8``; plain names pass through."""
    out = []
    for n in names:
        m = re.fullmatch(r"([A-Za-z_]+)(\d+)\.\.([A-Za-z_]*)(\d+)", n)
        if m and (not m.group(3) or m.group(3) == m.group(1)):
            out.extend(f"{m.group(1)}{k}" for k in range(int(m.group(2)), int(m.group(4)) + 1))
        else:
            out.append(n)
    return out


def parse_problem_text(text: str, source: str = "<problem>") -> ProblemFile:
    errors = []
    entries = _split_entries(text, errors)
    decl = Declarations()
    seen_names = {}

    def declare(sym, e):
        if sym.name in seen_names or sym.name == "exp":
            errors.append(DuplicateDeclarationError(f"{sym.name!r} declared twice", e.line, e.col))
            return False
        seen_names[sym.name] = e
        return True

    singles = {}
    for e in entries:
        if e.key in _DECL_KEYS or e.key in ("pde", "ansatz", "profile", "kernel"):
            if e.key in singles and e.key not in ("vars", "params", "constants", "positive"):
                errors.append(DuplicateDeclarationError(f"section {e.key!r} given twice", e.line, 1))
                continue
            singles[e.key] = e
        if e.key == "vars":
            for n in _names(e.text):
                s = Symbol(n, SymbolKind.INDEPENDENT)
                if declare(s, e):
                    decl.variables.append(s)
        elif e.key == "depvar":
            names = _names(e.text)
            if len(names) != 1:
                errors.append(ParseError("exactly one dependent variable is supported", e.line, e.col))
            else:
                decl.depvar = names[0]
        elif e.key == "params":
            for n in _names(e.text):
                s = Symbol(n, SymbolKind.PARAMETER)
                if declare(s, e):
                    decl.params.append(s)
        elif e.key == "constants":
            for n in _names(e.text):
                s = Symbol(n, SymbolKind.CONSTANT)
                if declare(s, e):
                    decl.constants.append(s)
    if decl.depvar in seen_names:
        errors.append(DuplicateDeclarationError(f"{decl.depvar!r} is both a symbol and the dependent variable", 1, 1))

    pf = ProblemFile(decl, path=source)

    def guarded(e, fn):
        try:
            return fn()
        except ParseError as exc:
            errors.append(exc)
        except (SymcoreError, JetError) as exc:
            errors.append(ParseError(str(exc), e.line, e.col))
        return None

    for e in entries:
        if e.key == "positive":
            for part in e.text.split(","):
                if part.strip():
                    p = guarded(e, lambda: parse_expression(part, decl, line=e.line, col=e.col))
                    if p is not None:
                        ok = guarded(e, lambda: assume_positive(p))
                        if ok is not None:
                            decl.positive.append(p)
    for e in entries:
        if e.key == "pde":
            pf.pde = guarded(e, lambda: parse_pde(e.text, decl, e.line, e.col))
        elif e.key in ("field", "expect"):
            target = pf.fields if e.key == "field" else pf.expects
            if e.arg in target:
                errors.append(DuplicateDeclarationError(f"{e.key} {e.arg!r} declared twice", e.line, 1))
                continue
            X = guarded(e, lambda: parse_vector_field(e.text, decl, e.arg, e.line, e.col))
            if X is not None:
                target[e.arg] = X
        elif e.key == "solution":
            s = guarded(e, lambda: parse_expression(e.text, decl, line=e.line, col=e.col))
            if s is not None:
                if e.arg in pf.solutions:
                    errors.append(DuplicateDeclarationError(f"solution {e.arg!r} declared twice", e.line, 1))
                pf.solutions[e.arg] = s
        elif e.key == "invariant":
            m = re.fullmatch(r"(\S+)\s+under\s+(.+)", e.arg)
            if not m:
                errors.append(ParseError("expected 'invariant NAME under F1, F2: expression'", e.line, 1))
                continue
            s = guarded(e, lambda: parse_expression(e.text, decl, allow_depvar=True, line=e.line, col=e.col))
            if s is not None:
                pf.invariants.append(Invariant(m.group(1), _names(m.group(2)), s))
        elif e.key == "ansatz":
            for part in e.text.split(";"):
                if not part.strip():
                    continue
                key, _, rhs = part.partition("=")
                key = key.strip()
                if key not in ("multiplier", "omega") or not rhs.strip():
                    errors.append(ParseError("ansatz expects 'multiplier = ...; omega = ...'", e.line, e.col))
                    continue
                val = guarded(e, lambda: parse_expression(rhs, decl, line=e.line, col=e.col))
                setattr(pf, key, val)
        elif e.key == "profile":
            pf.profile = guarded(e, lambda: parse_expression(e.text, decl, extra=(OMEGA,), line=e.line, col=e.col))
        elif e.key == "kernel":
            for part in e.text.split(","):
                if not part.strip():
                    continue
                key, _, rhs = part.partition("=")
                val = guarded(e, lambda: normalize(parse_expression(rhs, decl, line=e.line, col=e.col)))
                if val is None:
                    continue
                nf = val.normal_form()
                if not nf.is_constant():
                    errors.append(ParseError(f"kernel value for {key.strip()!r} must be a number", e.line, e.col))
                    continue
                pf.kernel[key.strip()] = nf.constant()
        elif e.key == "flows":
            pf.flows.extend(_names(e.text))
        elif e.key == "task":
            pf.tasks.extend(_names(e.text))

    if not any(e.key == "pde" for e in entries):
        errors.append(ParseError("no PDE declared", 1, 1))
    if not decl.variables and entries:
        errors.append(ParseError("no independent variables declared ('vars:')", 1, 1))
    for inv in pf.invariants:
        for n in inv.under:
            if n not in pf.fields and n not in pf.expects:
                errors.append(ParseError(f"invariant {inv.name!r} refers to unknown field {n!r}", 1, 1))
    if errors:
        errors.sort(key=lambda err: (err.line, err.col))
        raise ProblemError(errors, source)
    return pf


def parse_problem(path) -> ProblemFile:
    path = Path(path)
    return parse_problem_text(path.read_text(encoding="utf-8"), str(path))


def bundled_problem_path(name: str = "kolmogorov.lft") -> Path:
    return Path(__file__).parent / "data" / name
