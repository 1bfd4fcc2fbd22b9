"""Expression trees for general (non-polynomial) drifts.

The drift language covers exactly: rational constants, variables, the four
arithmetic operators, binary min/max, and unary absolute value.  Subtraction
and division are kept as primitive nodes rather than rewritten, so emitted
solver scripts mirror the source text.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

from .errors import DivisionByZero
from .poly import Polynomial, as_fraction

_BIN_OPS = ("add", "sub", "mul", "div", "min", "max")


@dataclass(frozen=True)
class Const:
    value: Fraction


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Bin:
    op: str
    lhs: "DriftExpr"
    rhs: "DriftExpr"

    def __post_init__(self):
        if self.op not in _BIN_OPS:
            raise ValueError(f"unknown operator {self.op!r}")


@dataclass(frozen=True)
class Abs:
    arg: "DriftExpr"


DriftExpr = Union[Const, Var, Bin, Abs]


def const(value) -> Const:
    return Const(as_fraction(value))


def var(index: int) -> Var:
    return Var(index)


def drift_eval(expr: DriftExpr, values) -> Fraction:
    """Exact evaluation over rationals; min/max/abs are set-theoretic.

    Raises :class:`DivisionByZero` naming the subexpression whose denominator
    evaluates to zero.  ``values`` is a sequence or mapping over variable
    indices.
    """
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Var):
        return values[expr.index]
    if isinstance(expr, Abs):
        return abs(drift_eval(expr.arg, values))
    a = drift_eval(expr.lhs, values)
    b = drift_eval(expr.rhs, values)
    op = expr.op
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        if b == 0:
            raise DivisionByZero(format_expr(expr))
        return a / b
    if op == "min":
        return min(a, b)
    return max(a, b)


def expr_variables(expr: DriftExpr) -> frozenset:
    if isinstance(expr, Const):
        return frozenset()
    if isinstance(expr, Var):
        return frozenset((expr.index,))
    if isinstance(expr, Abs):
        return expr_variables(expr.arg)
    return expr_variables(expr.lhs) | expr_variables(expr.rhs)


def rename_vars(expr: DriftExpr, mapping: Mapping[int, int]) -> DriftExpr:
    """Replace variable indices per ``mapping`` (identity when absent)."""
    return substitute_exprs(expr, {v: Var(w) for v, w in mapping.items()})


def substitute_exprs(expr: DriftExpr, sigma: Mapping[int, DriftExpr]) -> DriftExpr:
    if isinstance(expr, Const):
        return expr
    if isinstance(expr, Var):
        return sigma.get(expr.index, expr)
    if isinstance(expr, Abs):
        return Abs(substitute_exprs(expr.arg, sigma))
    return Bin(expr.op,
               substitute_exprs(expr.lhs, sigma),
               substitute_exprs(expr.rhs, sigma))


def denominators(expr: DriftExpr) -> list:
    """All syntactic denominators, outermost first (duplicates removed)."""
    found: list = []

    def walk(e):
        if isinstance(e, Abs):
            walk(e.arg)
        elif isinstance(e, Bin):
            if e.op == "div" and e.rhs not in found:
                found.append(e.rhs)
            walk(e.lhs)
            walk(e.rhs)

    walk(expr)
    return found


def to_polynomial(expr: DriftExpr) -> Polynomial | None:
    """Lower to a polynomial when possible, else None.

    Division is accepted only by a subexpression that lowers to a nonzero
    constant; min/max/abs never lower.
    """
    if isinstance(expr, Const):
        return Polynomial.constant(expr.value)
    if isinstance(expr, Var):
        return Polynomial.variable(expr.index)
    if isinstance(expr, Abs):
        return None
    if expr.op in ("min", "max"):
        return None
    lhs = to_polynomial(expr.lhs)
    if lhs is None:
        return None
    rhs = to_polynomial(expr.rhs)
    if rhs is None:
        return None
    if expr.op == "add":
        return lhs + rhs
    if expr.op == "sub":
        return lhs - rhs
    if expr.op == "mul":
        return lhs * rhs
    # division: divisor must be a nonzero constant
    if rhs.degree() > 0 or rhs.is_zero():
        return None
    return lhs.scale(1 / rhs.terms[0].coeff)


def poly_to_expr(p: Polynomial) -> DriftExpr:
    """Embed a polynomial into the expression language (sum of products)."""
    if p.is_zero():
        return Const(Fraction(0))
    total = None
    for m in p.terms:
        factors: list = []
        if m.coeff != 1 or not m.exps:
            factors.append(Const(m.coeff))
        for v, e in m.exps:
            factors.extend(Var(v) for _ in range(e))
        term = factors[0]
        for f in factors[1:]:
            term = Bin("mul", term, f)
        total = term if total is None else Bin("add", total, term)
    return total


_PRECEDENCE = {"add": 1, "sub": 1, "mul": 2, "div": 2}


def format_expr(expr: DriftExpr, names=None) -> str:
    """Render in model-grammar syntax."""

    def name_of(i):
        return names[i] if names is not None else f"x{i}"

    def go(e, parent_prec):
        if isinstance(e, Const):
            v = e.value
            s = str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
            if v < 0 and parent_prec > 0:
                return f"({s})"
            return s
        if isinstance(e, Var):
            return name_of(e.index)
        if isinstance(e, Abs):
            return f"abs({go(e.arg, 0)})"
        if e.op in ("min", "max"):
            return f"{e.op}({go(e.lhs, 0)}, {go(e.rhs, 0)})"
        prec = _PRECEDENCE[e.op]
        sym = {"add": "+", "sub": "-", "mul": "*", "div": "/"}[e.op]
        left = go(e.lhs, prec)
        # right operand of - and / needs parens at equal precedence
        right = go(e.rhs, prec + (1 if e.op in ("sub", "div") else 0))
        out = f"{left} {sym} {right}"
        if prec < parent_prec:
            return f"({out})"
        return out

    return go(expr, 0)
