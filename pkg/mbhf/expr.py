"""Symbolic rational expressions for kernel bases, prefactor bases and series arguments.

Atoms are symbols (integration-free variables such as x, y, z, or parameter
names such as a, b') and exact rationals. Equality between expressions is
decided probabilistically by exact evaluation at random rational points.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, FrozenSet, Mapping, Tuple, Union

import numpy as np
from lark import Lark, Transformer
from lark.exceptions import LarkError, VisitError

from .config.constants import (
    DEFAULT_EQUALITY_SAMPLES, DEFAULT_EQUALITY_SEED, SAMPLE_MAX, MAX_POLE_REDRAWS,
)
from .errors import ExprSyntaxError, MissingBinding, PoleAtPoint, NonLinearExpression

logger = logging.getLogger(__name__)

Scalar = Union[int, float, complex, Fraction]


class Expr:
    """Base class of expression nodes. Supports Python arithmetic operators."""

    __slots__ = ()
    precedence = 0

    def __add__(self, other): return Add(self, as_expr(other))
    def __radd__(self, other): return Add(as_expr(other), self)
    def __sub__(self, other): return Sub(self, as_expr(other))
    def __rsub__(self, other): return Sub(as_expr(other), self)
    def __mul__(self, other): return Mul(self, as_expr(other))
    def __rmul__(self, other): return Mul(as_expr(other), self)
    def __truediv__(self, other): return Div(self, as_expr(other))
    def __rtruediv__(self, other): return Div(as_expr(other), self)
    def __neg__(self): return Neg(self)

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            raise TypeError("expressions only take integer powers")
        return IntPow(self, exponent)

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Sym(Expr):
    """Variable or parameter atom."""
    name: str
    precedence = 5


@dataclass(frozen=True)
class Num(Expr):
    """Exact rational atom."""
    value: Fraction
    precedence = 5

    def __post_init__(self):
        object.__setattr__(self, 'value', Fraction(self.value))


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr
    precedence = 3


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr
    precedence = 1


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr
    precedence = 1


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr
    precedence = 2


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr
    precedence = 2


@dataclass(frozen=True)
class IntPow(Expr):
    base: Expr
    exponent: int
    precedence = 4


Atom = Union[Sym, Num]
ZERO = Num(Fraction(0))
ONE = Num(Fraction(1))


def as_expr(value) -> Expr:
    """Coerce ints, Fractions and expression text to an Expr."""
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, Fraction)):
        return Num(Fraction(value))
    if isinstance(value, str):
        return parse_expr(value)
    raise TypeError(f"cannot convert {value!r} to an expression")


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------

_GRAMMAR = r"""
    ?start: sum

    ?sum: product
        | sum "+" product       -> add
        | sum "-" product       -> sub

    ?product: unary
        | product "*" unary     -> mul
        | product "/" unary     -> div

    ?unary: power
        | "-" unary             -> neg
        | "+" unary

    ?power: atom
        | atom "^" exponent     -> pow

    ?exponent: NUMBER           -> pos_exp
        | "-" NUMBER            -> neg_exp
        | "(" "-" NUMBER ")"    -> neg_exp
        | "(" NUMBER ")"        -> pos_exp

    ?atom: NUMBER               -> number
        | NAME                  -> symbol
        | "(" sum ")"

    NAME: /[A-Za-z][A-Za-z0-9']*/
    NUMBER: /[0-9]+(\.[0-9]+)?/

    %import common.WS
    %ignore WS
"""


class _ToExpr(Transformer):
    """Builds Expr nodes from the parse tree."""

    def add(self, items): return Add(items[0], items[1])
    def sub(self, items): return Sub(items[0], items[1])
    def mul(self, items): return Mul(items[0], items[1])
    def div(self, items): return Div(items[0], items[1])
    def neg(self, items): return Neg(items[0])
    def pow(self, items): return IntPow(items[0], items[1])
    def number(self, items): return Num(Fraction(str(items[0])))
    def symbol(self, items): return Sym(str(items[0]))

    def pos_exp(self, items):
        return _integer_exponent(items[0])

    def neg_exp(self, items):
        return -_integer_exponent(items[0])


def _integer_exponent(token) -> int:
    text = str(token)
    if '.' in text:
        raise ExprSyntaxError(f"'^' takes integer literals only, got {text}", token.start_pos)
    return int(text)


_PARSER = Lark(_GRAMMAR, parser='lalr', transformer=_ToExpr())


def parse_expr(text: str) -> Expr:
    """
    Parse the infix text format.

    Args:
        text: expression such as "(x-y)/y" or "-z/(z-1)"; the Unicode minus is accepted

    Returns:
        The parsed expression
    """
    normalized = text.replace('−', '-')
    try:
        return _PARSER.parse(normalized)
    except VisitError as e:
        if isinstance(e.orig_exc, ExprSyntaxError):
            raise e.orig_exc
        raise ExprSyntaxError(f"invalid expression {text!r}: {e.orig_exc}")
    except ExprSyntaxError:
        raise
    except LarkError as e:
        position = getattr(e, 'pos_in_stream', None)
        raise ExprSyntaxError(f"invalid expression {text!r} at position {position}", position)


def _format_number(value: Fraction) -> str:
    if value.denominator == 1:
        text = str(value.numerator)
    else:
        text = f"{value.numerator}/{value.denominator}"
    if value < 0 or value.denominator != 1:
        return f"({text})"
    return text


def _wrap(e: Expr, minimum: int) -> str:
    text = to_text(e)
    return f"({text})" if e.precedence < minimum else text


def to_text(e: Expr) -> str:
    """Print an expression in the text format; parse_expr reads it back."""
    if isinstance(e, Sym):
        return e.name
    if isinstance(e, Num):
        return _format_number(e.value)
    if isinstance(e, Neg):
        return f"-{_wrap(e.operand, 3)}"
    if isinstance(e, (Add, Sub)):
        op = '+' if isinstance(e, Add) else '-'
        return f"{_wrap(e.left, 1)} {op} {_wrap(e.right, 2)}"
    if isinstance(e, (Mul, Div)):
        op = '*' if isinstance(e, Mul) else '/'
        return f"{_wrap(e.left, 2)}{op}{_wrap(e.right, 3)}"
    if isinstance(e, IntPow):
        exponent = str(e.exponent) if e.exponent >= 0 else f"({e.exponent})"
        return f"{_wrap(e.base, 5)}^{exponent}"
    raise TypeError(f"unknown expression node {e!r}")


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def _evaluate(e: Expr, env: Mapping[str, object], lift: Callable):
    if isinstance(e, Num):
        return lift(e.value)
    if isinstance(e, Sym):
        try:
            return env[e.name]
        except KeyError:
            raise MissingBinding(f"no value bound to '{e.name}'")
    if isinstance(e, Neg):
        return -_evaluate(e.operand, env, lift)
    if isinstance(e, IntPow):
        return _evaluate(e.base, env, lift) ** e.exponent
    left = _evaluate(e.left, env, lift)
    right = _evaluate(e.right, env, lift)
    if isinstance(e, Add):
        return left + right
    if isinstance(e, Sub):
        return left - right
    if isinstance(e, Mul):
        return left * right
    return left / right


def eval_expr(e: Expr, assignment: Mapping[str, Scalar]) -> complex:
    """
    Evaluate an expression in complex double precision.

    Args:
        e: expression
        assignment: value for every symbol of ``e``

    Returns:
        The complex value

    Raises:
        MissingBinding: a symbol has no value
        PoleAtPoint: a denominator vanishes at the point
    """
    env = {name: complex(value) for name, value in assignment.items()}
    try:
        return complex(_evaluate(e, env, lambda v: complex(float(v))))
    except ZeroDivisionError:
        raise PoleAtPoint(f"{to_text(e)} has a pole at {dict(assignment)}")


def eval_exact(e: Expr, assignment: Mapping[str, Fraction]) -> Fraction:
    """Evaluate with exact rational arithmetic; ZeroDivisionError marks a pole."""
    return _evaluate(e, assignment, lambda v: v)


def symbols(e: Expr) -> FrozenSet[str]:
    """Names of all symbol atoms of an expression."""
    if isinstance(e, Sym):
        return frozenset([e.name])
    if isinstance(e, Num):
        return frozenset()
    if isinstance(e, Neg):
        return symbols(e.operand)
    if isinstance(e, IntPow):
        return symbols(e.base)
    return symbols(e.left) | symbols(e.right)


def substitute(e: Expr, mapping: Mapping[str, Expr]) -> Expr:
    """Replace symbols by expressions, simultaneously."""
    if isinstance(e, Sym):
        return mapping.get(e.name, e)
    if isinstance(e, Num):
        return e
    if isinstance(e, Neg):
        return Neg(substitute(e.operand, mapping))
    if isinstance(e, IntPow):
        return IntPow(substitute(e.base, mapping), e.exponent)
    return type(e)(substitute(e.left, mapping), substitute(e.right, mapping))


# ---------------------------------------------------------------------------
# Probabilistic equality
# ---------------------------------------------------------------------------

_equality_defaults = {'samples': DEFAULT_EQUALITY_SAMPLES, 'seed': DEFAULT_EQUALITY_SEED}


def configure_equality(samples: int = DEFAULT_EQUALITY_SAMPLES, seed: int = DEFAULT_EQUALITY_SEED) -> None:
    """Set the sample count and seed used by expr_equal."""
    _equality_defaults['samples'] = samples
    _equality_defaults['seed'] = seed
    _equal_cached.cache_clear()


def expr_equal(e1: Expr, e2: Expr, samples: int = None, seed: int = None) -> bool:
    """
    Decide whether two expressions agree as rational functions.

    Both sides are evaluated exactly at ``samples`` random points whose
    coordinates are drawn from {p/q : 1 <= p, q <= 97}; points hitting a pole
    of either side are redrawn. Equal inputs are never reported unequal.

    Raises:
        PoleAtPoint: every redrawn point hit a pole of one side
    """
    if e1 == e2:
        return True
    return _equal_cached(
        e1, e2,
        _equality_defaults['samples'] if samples is None else samples,
        _equality_defaults['seed'] if seed is None else seed,
    )


@lru_cache(maxsize=65536)
def _equal_cached(e1: Expr, e2: Expr, samples: int, seed: int) -> bool:
    names = sorted(symbols(e1) | symbols(e2))
    rng = np.random.default_rng(seed)
    agreed = 0
    redraws = 0
    while agreed < samples:
        draws = rng.integers(1, SAMPLE_MAX + 1, size=(len(names), 2))
        env = {name: Fraction(int(p), int(q)) for name, (p, q) in zip(names, draws)}
        try:
            v1 = eval_exact(e1, env)
            v2 = eval_exact(e2, env)
        except ZeroDivisionError:
            redraws += 1
            if redraws > MAX_POLE_REDRAWS:
                raise PoleAtPoint(f"no pole-free sample for {to_text(e1)} vs {to_text(e2)} "
                                  f"after {MAX_POLE_REDRAWS} redraws")
            logger.debug(f"sample {env} hits a pole, redrawing")
            continue
        if v1 != v2:
            return False
        agreed += 1
    return True


# ---------------------------------------------------------------------------
# Simplification
# ---------------------------------------------------------------------------

def _is_num(e: Expr, value=None) -> bool:
    return isinstance(e, Num) and (value is None or e.value == value)


def simplify_basic(e: Expr) -> Expr:
    """
    Constant folding, double-negation elimination and removal of unit factors.

    The result is equal to the input as a rational function.
    """
    if isinstance(e, (Sym, Num)):
        return e

    if isinstance(e, Neg):
        inner = simplify_basic(e.operand)
        if isinstance(inner, Neg):
            return inner.operand
        if isinstance(inner, Num):
            return Num(-inner.value)
        if isinstance(inner, Sub):
            return Sub(inner.right, inner.left)
        return Neg(inner)

    if isinstance(e, IntPow):
        base = simplify_basic(e.base)
        if e.exponent == 0:
            return ONE
        if e.exponent == 1:
            return base
        if isinstance(base, Num) and (base.value != 0 or e.exponent > 0):
            return Num(base.value ** e.exponent)
        if isinstance(base, IntPow):
            return IntPow(base.base, base.exponent * e.exponent)
        return IntPow(base, e.exponent)

    left = simplify_basic(e.left)
    right = simplify_basic(e.right)

    if isinstance(e, Add):
        if _is_num(left) and _is_num(right):
            return Num(left.value + right.value)
        if _is_num(left, 0):
            return right
        if _is_num(right, 0):
            return left
        if isinstance(right, Neg):
            return Sub(left, right.operand)
        if _is_num(right) and right.value < 0:
            return Sub(left, Num(-right.value))
        if isinstance(left, Neg):
            return Sub(right, left.operand)
        return Add(left, right)

    if isinstance(e, Sub):
        if _is_num(left) and _is_num(right):
            return Num(left.value - right.value)
        if _is_num(right, 0):
            return left
        if _is_num(left, 0):
            return simplify_basic(Neg(right))
        if isinstance(right, Neg):
            return Add(left, right.operand)
        if _is_num(right) and right.value < 0:
            return Add(left, Num(-right.value))
        if left == right:
            return ZERO
        return Sub(left, right)

    if isinstance(e, Mul):
        if _is_num(left) and _is_num(right):
            return Num(left.value * right.value)
        if _is_num(left, 0) or _is_num(right, 0):
            return ZERO
        if _is_num(left, 1):
            return right
        if _is_num(right, 1):
            return left
        if _is_num(left, -1):
            return simplify_basic(Neg(right))
        if _is_num(right, -1):
            return simplify_basic(Neg(left))
        if isinstance(left, Neg) and isinstance(right, Neg):
            return Mul(left.operand, right.operand)
        if isinstance(left, Neg):
            return Neg(Mul(left.operand, right))
        if isinstance(right, Neg):
            return Neg(Mul(left, right.operand))
        return Mul(left, right)

    # Div
    if _is_num(right, 0):
        return Div(left, right)
    if _is_num(left) and _is_num(right):
        return Num(left.value / right.value)
    if _is_num(right, 1):
        return left
    if _is_num(right, -1):
        return simplify_basic(Neg(left))
    if _is_num(left, 0):
        return ZERO
    if isinstance(left, Neg) and isinstance(right, Neg):
        return Div(left.operand, right.operand)
    if left == right:
        return ONE
    return Div(left, right)


# ---------------------------------------------------------------------------
# Linear combinations
# ---------------------------------------------------------------------------

def linear_coefficients(e: Expr) -> Tuple[Dict[str, Fraction], Fraction]:
    """
    Split a linear expression into symbol coefficients and a constant.

    Raises:
        NonLinearExpression: the expression is not linear in its symbols
    """
    if isinstance(e, Num):
        return {}, e.value
    if isinstance(e, Sym):
        return {e.name: Fraction(1)}, Fraction(0)
    if isinstance(e, Neg):
        coeffs, const = linear_coefficients(e.operand)
        return {k: -v for k, v in coeffs.items()}, -const
    if isinstance(e, IntPow):
        coeffs, const = linear_coefficients(e.base)
        if e.exponent == 1:
            return coeffs, const
        if coeffs:
            raise NonLinearExpression(f"{to_text(e)} is not linear")
        if const == 0 and e.exponent < 0:
            raise PoleAtPoint("zero raised to a negative power")
        return {}, const ** e.exponent
    lc, lk = linear_coefficients(e.left)
    rc, rk = linear_coefficients(e.right)
    if isinstance(e, (Add, Sub)):
        sign = 1 if isinstance(e, Add) else -1
        merged = dict(lc)
        for name, value in rc.items():
            merged[name] = merged.get(name, Fraction(0)) + sign * value
        return {k: v for k, v in merged.items() if v != 0}, lk + sign * rk
    if isinstance(e, Mul):
        if lc and rc:
            raise NonLinearExpression(f"{to_text(e)} is not linear")
        if lc:
            lc, lk, rc, rk = rc, rk, lc, lk
        return {k: lk * v for k, v in rc.items() if lk * v != 0}, lk * rk
    # Div
    if rc:
        raise NonLinearExpression(f"{to_text(e)} divides by a symbol")
    if rk == 0:
        raise PoleAtPoint("division by zero")
    return {k: v / rk for k, v in lc.items()}, lk / rk
