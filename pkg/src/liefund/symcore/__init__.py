"""Exact expression engine for sums of q(x) * radicals * exp(g(x))."""

from .domain import assume_positive, positive_bases
from .errors import (
    DomainAssumptionError,
    EvaluationError,
    NotInClassError,
    ResourceLimitError,
    SymcoreError,
)
from .expr import (
    Const,
    Exp,
    Expression,
    Power,
    Product,
    Sum,
    Symbol,
    SymbolKind,
    as_expr,
    exp,
    free_symbols,
    symbols,
)
from .ops import (
    compile_numeric,
    diff_any,
    differentiate,
    equal,
    eval_numeric,
    is_zero,
    normalize,
    substitute,
    substitute_raw,
)
from .printing import to_text

__all__ = [
    "Const", "DomainAssumptionError", "EvaluationError", "Exp", "Expression",
    "NotInClassError", "Power", "Product", "ResourceLimitError", "Sum", "Symbol",
    "SymbolKind", "SymcoreError", "as_expr", "assume_positive", "compile_numeric",
    "diff_any", "differentiate", "equal", "eval_numeric", "exp", "free_symbols",
    "is_zero", "normalize", "positive_bases", "substitute", "substitute_raw",
    "symbols", "to_text",
]
