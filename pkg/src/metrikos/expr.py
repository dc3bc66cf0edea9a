"""Closed arithmetic expression language for control functions, B-actions
and analytic distance formulas.

Grammar, lowest to highest precedence::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?            # right-associative
    atom   := NUMBER | NAME '(' expr (',' expr)? ')' | NAME | '(' expr ')'

Unary minus binds looser than ``^``, so ``-2^2`` is ``-4`` and ``2^3^2`` is
``512``. Functions: ``ln exp abs sqrt`` (one argument), ``min max`` (two).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

import numpy as np

from metrikos.core import MetrikosError, fmt_num

UNARY_FUNCS = ("ln", "exp", "abs", "sqrt")
BINARY_FUNCS = ("min", "max")
_INFIX = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "^"}
_INFIX_OPS = {v: k for k, v in _INFIX.items()}

F_PRESETS = {"ln": "ln(t)", "ln_plus_t": "ln(t)+t", "neg_inv": "-1/t"}
THETA_PRESETS = {"sum": "s+t", "sum_product": "s+t+s*t", "max": "max(s,t)"}


class ParseError(MetrikosError, ValueError):
    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} at offset {offset}")


class DomainError(MetrikosError, ArithmeticError):
    """Evaluation left the real domain (ln of a nonpositive value, 1/0, ...)."""

    def __init__(self, message: str, node: "Expr", bindings: Mapping[str, float]):
        self.node = node
        self.bindings = dict(bindings)
        shown = ", ".join(f"{k}={fmt_num(v)}" for k, v in sorted(self.bindings.items()))
        super().__init__(f"{message} in {pretty_print(node)} at {shown or 'no bindings'}")


@dataclass(frozen=True)
class Constant:
    value: float


@dataclass(frozen=True)
class Variable:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str  # neg | ln | exp | abs | sqrt
    child: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str  # add | sub | mul | div | pow | min | max
    left: "Expr"
    right: "Expr"


Expr = Union[Constant, Variable, Unary, Binary]


def variables(expr: Expr) -> frozenset[str]:
    if isinstance(expr, Variable):
        return frozenset([expr.name])
    if isinstance(expr, Unary):
        return variables(expr.child)
    if isinstance(expr, Binary):
        return variables(expr.left) | variables(expr.right)
    return frozenset()


# -- parsing ---------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", _byte_offset(text, pos))
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), _byte_offset(text, pos)))
        pos = m.end()
    tokens.append(("end", "", _byte_offset(text, len(text))))
    return tokens


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


class _Parser:
    def __init__(self, text: str, allowed: frozenset[str]):
        self.tokens = _tokenize(text)
        self.i = 0
        self.allowed = allowed

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str) -> None:
        kind, text, off = self.take()
        if text != value or kind != "op":
            found = "end of input" if kind == "end" else repr(text)
            raise ParseError(f"expected {value!r}, found {found}", off)

    def parse(self) -> Expr:
        e = self.expr()
        kind, text, off = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {text!r}", off)
        return e

    def expr(self) -> Expr:
        left = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = _INFIX_OPS[self.take()[1]]
            left = Binary(op, left, self.term())
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = _INFIX_OPS[self.take()[1]]
            left = Binary(op, left, self.unary())
        return left

    def unary(self) -> Expr:
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return Unary("neg", self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            return Binary("pow", base, self.unary())
        return base

    def atom(self) -> Expr:
        kind, text, off = self.take()
        if kind == "num":
            return Constant(float(text))
        if kind == "name":
            if self.peek()[:2] == ("op", "("):
                return self.call(text, off)
            if text in UNARY_FUNCS or text in BINARY_FUNCS:
                raise ParseError(f"function {text} needs arguments", off)
            if text not in self.allowed:
                raise ParseError(f"unknown variable {text}", off)
            return Variable(text)
        if (kind, text) == ("op", "("):
            e = self.expr()
            self.expect(")")
            return e
        found = "end of input" if kind == "end" else repr(text)
        raise ParseError(f"unexpected {found}", off)

    def call(self, name: str, off: int) -> Expr:
        if name not in UNARY_FUNCS and name not in BINARY_FUNCS:
            raise ParseError(f"unknown function {name}", off)
        self.expect("(")
        first = self.expr()
        if name in BINARY_FUNCS:
            self.expect(",")
            second = self.expr()
            self.expect(")")
            return Binary(name, first, second)
        self.expect(")")
        return Unary(name, first)


def parse(text: str, allowed_vars: Iterable[str] = ()) -> Expr:
    """Parse ``text`` into an AST; names outside ``allowed_vars`` are errors."""
    if not text or not text.strip():
        raise ParseError("empty expression", 0)
    allowed = frozenset(allowed_vars)
    clash = allowed & set(UNARY_FUNCS + BINARY_FUNCS)
    if clash:
        raise ValueError(f"variable names clash with functions: {sorted(clash)}")
    return _Parser(text, allowed).parse()


def pretty_print(expr: Expr) -> str:
    """Fully parenthesised canonical text; ``parse`` inverts it."""
    if isinstance(expr, Constant):
        return fmt_num(expr.value) if expr.value >= 0 else f"(-{fmt_num(-expr.value)})"
    if isinstance(expr, Variable):
        return expr.name
    if isinstance(expr, Unary):
        if expr.op == "neg":
            return f"(-{pretty_print(expr.child)})"
        return f"{expr.op}({pretty_print(expr.child)})"
    if expr.op in BINARY_FUNCS:
        return f"{expr.op}({pretty_print(expr.left)},{pretty_print(expr.right)})"
    return f"({pretty_print(expr.left)}{_INFIX[expr.op]}{pretty_print(expr.right)})"


# -- scalar evaluation -----------------------------------------------------


def _pow(base: float, exp: float, node: Expr, bindings) -> float:
    if base == 0.0 and exp < 0:
        raise DomainError("zero raised to a negative power", node, bindings)
    if base < 0 and not float(exp).is_integer():
        raise DomainError("negative base with non-integer exponent", node, bindings)
    try:
        return math.pow(base, exp)
    except OverflowError:
        raise DomainError("overflow", node, bindings) from None


def _eval(e: Expr, b: Mapping[str, float]) -> float:
    if isinstance(e, Constant):
        return e.value
    if isinstance(e, Variable):
        try:
            return float(b[e.name])
        except KeyError:
            raise DomainError(f"unbound variable {e.name}", e, b) from None
    if isinstance(e, Unary):
        x = _eval(e.child, b)
        op = e.op
        if op == "neg":
            return -x
        if op == "abs":
            return abs(x)
        if op == "ln":
            if x <= 0:
                raise DomainError("logarithm of a nonpositive value", e, b)
            return math.log(x)
        if op == "sqrt":
            if x < 0:
                raise DomainError("square root of a negative value", e, b)
            return math.sqrt(x)
        if op == "exp":
            try:
                return math.exp(x)
            except OverflowError:
                raise DomainError("overflow", e, b) from None
        raise ValueError(f"bad unary op {op}")
    x = _eval(e.left, b)
    y = _eval(e.right, b)
    op = e.op
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        if y == 0:
            raise DomainError("division by zero", e, b)
        return x / y
    if op == "pow":
        return _pow(x, y, e, b)
    if op == "min":
        return min(x, y)
    if op == "max":
        return max(x, y)
    raise ValueError(f"bad binary op {op}")


def evaluate(expr: Expr, bindings: Mapping[str, float]) -> float:
    """Evaluate over the reals; leaving the domain raises :class:`DomainError`."""
    value = _eval(expr, bindings)
    if not math.isfinite(value):
        raise DomainError("non-finite result", expr, bindings)
    return value


# -- vectorised evaluation -------------------------------------------------


def _first_bad(mask: np.ndarray, node: Expr, bindings: Mapping[str, np.ndarray], message: str):
    if not np.any(mask):
        return
    idx = np.unravel_index(int(np.argmax(mask)), mask.shape)
    shape = mask.shape
    point = {k: float(np.broadcast_to(v, shape)[idx]) for k, v in bindings.items()}
    raise DomainError(message, node, point)


def _veval(e: Expr, b: Mapping[str, np.ndarray], shape) -> np.ndarray:
    if isinstance(e, Constant):
        return np.full(shape, e.value)
    if isinstance(e, Variable):
        if e.name not in b:
            raise DomainError(f"unbound variable {e.name}", e, {})
        return np.broadcast_to(b[e.name], shape).astype(np.float64)
    if isinstance(e, Unary):
        x = _veval(e.child, b, shape)
        op = e.op
        if op == "neg":
            return -x
        if op == "abs":
            return np.abs(x)
        if op == "ln":
            _first_bad(x <= 0, e, b, "logarithm of a nonpositive value")
            return np.log(x)
        if op == "sqrt":
            _first_bad(x < 0, e, b, "square root of a negative value")
            return np.sqrt(x)
        out = np.exp(x)
        _first_bad(~np.isfinite(out), e, b, "overflow")
        return out
    x = _veval(e.left, b, shape)
    y = _veval(e.right, b, shape)
    op = e.op
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        _first_bad(y == 0, e, b, "division by zero")
        return x / y
    if op == "pow":
        _first_bad((x == 0) & (y < 0), e, b, "zero raised to a negative power")
        _first_bad((x < 0) & (y != np.round(y)), e, b, "negative base with non-integer exponent")
        out = np.power(x, y)
        _first_bad(~np.isfinite(out), e, b, "overflow")
        return out
    if op == "min":
        return np.minimum(x, y)
    return np.maximum(x, y)


def evaluate_array(expr: Expr, bindings: Mapping[str, np.ndarray | float]) -> np.ndarray:
    """Broadcasting evaluation; raises on the first offending element."""
    arrays = {k: np.asarray(v, dtype=np.float64) for k, v in bindings.items()}
    shape = np.broadcast_shapes(*(a.shape for a in arrays.values())) if arrays else ()
    with np.errstate(all="ignore"):
        out = _veval(expr, arrays, shape)
    _first_bad(~np.isfinite(out), expr, arrays, "non-finite result")
    return out


# -- typed function wrappers -----------------------------------------------


@dataclass(frozen=True)
class ScalarFn:
    """One-variable function such as a control function ``f(t)``."""

    expr: Expr
    variable: str = "t"
    source: str = field(default="", compare=False)

    def __post_init__(self):
        extra = variables(self.expr) - {self.variable}
        if extra:
            raise ValueError(f"expression uses undeclared variables {sorted(extra)}")
        if not self.source:
            object.__setattr__(self, "source", pretty_print(self.expr))

    @classmethod
    def parse(cls, text: str, variable: str = "t") -> "ScalarFn":
        return cls(parse(text, {variable}), variable, text)

    def __call__(self, t: float) -> float:
        return evaluate(self.expr, {self.variable: t})

    def vec(self, t) -> np.ndarray:
        return evaluate_array(self.expr, {self.variable: t})


@dataclass(frozen=True)
class BinaryFn:
    """Two-variable function: a B-action ``theta(s, t)`` or a distance ``D(x, y)``."""

    expr: Expr
    variables: tuple[str, str] = ("s", "t")
    source: str = field(default="", compare=False)

    def __post_init__(self):
        if len(self.variables) != 2 or self.variables[0] == self.variables[1]:
            raise ValueError(f"need two distinct variable names, got {self.variables}")
        extra = variables(self.expr) - set(self.variables)
        if extra:
            raise ValueError(f"expression uses undeclared variables {sorted(extra)}")
        if not self.source:
            object.__setattr__(self, "source", pretty_print(self.expr))

    @classmethod
    def parse(cls, text: str, variables: tuple[str, str] = ("s", "t")) -> "BinaryFn":
        return cls(parse(text, set(variables)), tuple(variables), text)

    def __call__(self, a: float, b: float) -> float:
        u, v = self.variables
        return evaluate(self.expr, {u: a, v: b})

    def vec(self, a, b) -> np.ndarray:
        u, v = self.variables
        return evaluate_array(self.expr, {u: a, v: b})


def f_preset(name: str) -> ScalarFn:
    return ScalarFn.parse(F_PRESETS[name])


def theta_preset(name: str) -> BinaryFn:
    return BinaryFn.parse(THETA_PRESETS[name])
