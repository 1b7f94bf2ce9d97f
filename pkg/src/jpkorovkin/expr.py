"""Tiny expression language for user functions ``f(x, y)``.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := base ('^' unsigned-integer)?
    base   := number | 'x' | 'y' | 'pi' | ('sin' | 'cos') '(' expr ')' | '(' expr ')'
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .periodic import TWO_PI, Fn2D


class ParseError(ValueError):
    """Syntax error; ``offset`` is the UTF-8 byte offset of the offending token."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte {offset}")
        self.offset = offset


class UnknownIdentifier(ParseError):
    pass


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Pi:
    pass


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


Expr = Union[Num, Var, Pi, Call, BinOp, Pow]

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
""", re.VERBOSE)

_FUNCS = {"sin": np.sin, "cos": np.cos}


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", _byte(text, pos))
        if m.lastgroup != "ws":
            tokens.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


def _byte(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message: str, tok, cls=ParseError):
        return cls(message, _byte(self.text, tok[2]))

    def expect(self, value: str):
        tok = self.take()
        if tok[1] != value or tok[0] == "end":
            raise self.error(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok)

    def parse(self) -> Expr:
        e = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise self.error(f"unexpected {tok[1]!r}", tok)
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            e = BinOp(op, e, self.term())
        return e

    def term(self) -> Expr:
        e = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            e = BinOp(op, e, self.factor())
        return e

    def factor(self) -> Expr:
        e = self.base()
        if self.peek()[1] == "^":
            self.take()
            tok = self.take()
            if tok[0] != "num" or not tok[1].isdigit():
                raise self.error("exponent must be an unsigned integer", tok)
            e = Pow(e, int(tok[1]))
        return e

    def base(self) -> Expr:
        tok = self.take()
        kind, text = tok[0], tok[1]
        if kind == "num":
            value = float(text)
            if not math.isfinite(value):
                raise self.error(f"number {text!r} overflows", tok)
            return Num(value)
        if kind == "ident":
            if text in ("x", "y"):
                return Var(text)
            if text == "pi":
                return Pi()
            if text in _FUNCS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(text, arg)
            raise self.error(f"unknown identifier {text!r}", tok, UnknownIdentifier)
        if text == "(":
            e = self.expr()
            self.expect(")")
            return e
        raise self.error(f"unexpected {text or 'end of input'!r}", tok)


def parse(text: str) -> Expr:
    return _Parser(text).parse()


def _atomic(e: Expr) -> bool:
    return isinstance(e, (Num, Var, Pi, Call))


def to_text(e: Expr) -> str:
    """Print ``e`` so that ``parse(to_text(e)) == e``."""
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Pi):
        return "pi"
    if isinstance(e, Call):
        return f"{e.fn}({to_text(e.arg)})"
    if isinstance(e, Pow):
        base = to_text(e.base)
        return f"{base}^{e.exponent}" if _atomic(e.base) else f"({base})^{e.exponent}"
    if isinstance(e, BinOp):
        return f"({to_text(e.left)} {e.op} {to_text(e.right)})"
    raise TypeError(f"not an expression node: {e!r}")


def evaluate(e: Expr, x, y):
    """Evaluate on broadcastable arrays; division by zero raises ``ZeroDivisionError``."""
    if isinstance(e, Num):
        return np.full(np.broadcast(x, y).shape, e.value)
    if isinstance(e, Var):
        v = x if e.name == "x" else y
        return np.broadcast_to(np.asarray(v, dtype=float), np.broadcast(x, y).shape)
    if isinstance(e, Pi):
        return np.full(np.broadcast(x, y).shape, math.pi)
    if isinstance(e, Call):
        return _FUNCS[e.fn](evaluate(e.arg, x, y))
    if isinstance(e, Pow):
        return evaluate(e.base, x, y) ** e.exponent
    if isinstance(e, BinOp):
        a, b = evaluate(e.left, x, y), evaluate(e.right, x, y)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if np.any(b == 0):
            raise ZeroDivisionError("division by zero in expression")
        return a / b
    raise TypeError(f"not an expression node: {e!r}")


def to_function(e: Expr, name: str | None = None) -> Fn2D:
    return Fn2D(lambda x, y: evaluate(e, np.asarray(x, float), np.asarray(y, float)),
                name or to_text(e))


@dataclass(frozen=True)
class GateResult:
    passed: bool
    worst: float
    worst_point: tuple[float, float]


def periodicity_gate(e: Expr, samples: int = 256, atol: float = 1e-9) -> GateResult:
    """Compare ``e`` at ``(x, y)`` with ``(x + 2pi, y)`` and ``(x, y + 2pi)``.

    Passes exactly when the largest mismatch over the sample is at most ``atol``.
    """
    side = max(2, math.isqrt(max(samples, 4)))
    t = -math.pi + TWO_PI * (np.arange(side) + 0.37) / side
    X, Y = np.meshgrid(t, t, indexing="ij")
    base = evaluate(e, X, Y)
    gaps = np.maximum(np.abs(evaluate(e, X + TWO_PI, Y) - base),
                      np.abs(evaluate(e, X, Y + TWO_PI) - base))
    gaps = np.where(np.isnan(gaps), np.inf, gaps)
    k = np.unravel_index(int(np.argmax(gaps)), gaps.shape)
    worst = float(gaps[k])
    return GateResult(worst <= atol, worst, (float(X[k]), float(Y[k])))
