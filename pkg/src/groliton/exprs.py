"""A tiny closed-form expression language for metric components.

Grammar (recursive descent; all binary operators left-associative)::

    expr    := term  (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' exponent)*
    exponent:= '-' exponent | atom
    atom    := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'

Precedence is ``^`` > unary minus > ``*``/``/`` > ``+``/``-``.  Recognised
names are the coordinates ``x y z t r``, the constant ``pi``, and the
elementary-function set of :mod:`groliton.jets`.  There is no implicit
multiplication, and unknown names are rejected at parse time.  Syntax errors
carry the byte offset of the offending token.

Expression trees are immutable; :func:`pretty_print` emits a minimally
parenthesised form whose re-parse reproduces the tree.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Union

from . import jets
from .jets import Jet

VARIABLES = ("x", "y", "z", "t", "r")
CONSTANTS = {"pi": math.pi}
FUNCTIONS = jets.ELEMENTARY


class ExprSyntaxError(ValueError):
    """Parse failure; ``offset`` is the byte position in the source string."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class ExprEvalError(ValueError):
    """Evaluation failure (unbound variable, non-constant exponent, ...)."""


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Expr"


Expr = Union[Num, Var, Neg, BinOp, Call]

# ---------------------------------------------------------------------------
# Tokenizer
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(source: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            stripped = source[pos:].lstrip()
            if not stripped:
                break
            raise ExprSyntaxError(
                f"unexpected character {stripped[0]!r}",
                len(source) - len(stripped))
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(source)))
    return tokens


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


class _Parser:
    def __init__(self, source: str):
        self.tokens = _tokenize(source)
        self.pos = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.pos]

    def advance(self) -> tuple[str, str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op: str) -> None:
        kind, text, offset = self.peek()
        if kind != "op" or text != op:
            raise ExprSyntaxError(f"expected {op!r}", offset)
        self.advance()

    def parse(self) -> Expr:
        e = self.expr()
        kind, text, offset = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected {text!r}", offset)
        return e

    def expr(self) -> Expr:
        e = self.term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.advance()
                e = BinOp(text, e, self.term())
            else:
                return e

    def term(self) -> Expr:
        e = self.unary()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.advance()
                e = BinOp(text, e, self.unary())
            else:
                return e

    def unary(self) -> Expr:
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        e = self.atom()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text == "^":
                self.advance()
                e = BinOp("^", e, self.exponent())
            else:
                return e

    def exponent(self) -> Expr:
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.advance()
            return Neg(self.exponent())
        return self.atom()

    def atom(self) -> Expr:
        kind, text, offset = self.advance()
        if kind == "number":
            return Num(float(text))
        if kind == "name":
            nkind, ntext, _ = self.peek()
            if nkind == "op" and ntext == "(":
                if text not in FUNCTIONS:
                    raise ExprSyntaxError(f"unknown function {text!r}", offset)
                self.advance()
                arg = self.expr()
                self.expect_op(")")
                return Call(text, arg)
            if text in CONSTANTS:
                return Num(CONSTANTS[text])
            if text not in VARIABLES:
                raise ExprSyntaxError(f"unknown name {text!r}", offset)
            return Var(text)
        if kind == "op" and text == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        raise ExprSyntaxError(
            f"expected a value, got {text!r}" if text else "unexpected end of input",
            offset)


def parse(source: str) -> Expr:
    """Parse a source string into an immutable expression tree."""
    return _Parser(source).parse()


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

Value = Union[Jet, float]


def _pow(base: Value, exponent: Value) -> Value:
    if isinstance(exponent, Jet):
        if any(exponent.coeffs[1:]):
            raise ExprEvalError("exponent must be a constant expression")
        exponent = exponent.value
    if isinstance(base, Jet):
        return jets.jet_pow(base, exponent)
    if base < 0.0 and exponent != int(exponent):
        raise jets.JetDomainError(
            f"x**{exponent:g}: non-integer real power needs a positive base")
    return float(base) ** exponent


_BINOPS = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": lambda a, b: a / b,
    "^": _pow,
}


def evaluate(e: Expr, bindings: Mapping[str, Value]) -> Value:
    """Evaluate a tree with variables bound to jets (or plain floats)."""
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        try:
            return bindings[e.name]
        except KeyError:
            raise ExprEvalError(f"unbound variable {e.name!r}") from None
    if isinstance(e, Neg):
        return -evaluate(e.arg, bindings)
    if isinstance(e, BinOp):
        return _BINOPS[e.op](evaluate(e.left, bindings),
                             evaluate(e.right, bindings))
    if isinstance(e, Call):
        return FUNCTIONS[e.fn](evaluate(e.arg, bindings))
    raise TypeError(f"not an expression node: {e!r}")


def variables_of(e: Expr) -> frozenset[str]:
    """The set of coordinate names appearing in the tree."""
    if isinstance(e, Var):
        return frozenset((e.name,))
    if isinstance(e, Neg):
        return variables_of(e.arg)
    if isinstance(e, BinOp):
        return variables_of(e.left) | variables_of(e.right)
    if isinstance(e, Call):
        return variables_of(e.arg)
    return frozenset()


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

_PREC_ADD, _PREC_MUL, _PREC_NEG, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        if e.op in "+-":
            return _PREC_ADD
        if e.op in "*/":
            return _PREC_MUL
        return _PREC_POW
    if isinstance(e, Neg):
        return _PREC_NEG
    return _PREC_ATOM


def _num_str(v: float) -> str:
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def pretty_print(e: Expr) -> str:
    """Minimally parenthesised source whose re-parse reproduces the tree."""
    if isinstance(e, Num):
        if e.value < 0.0 or math.copysign(1.0, e.value) < 0.0:
            return f"({_num_str(e.value)})"
        return _num_str(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Call):
        return f"{e.fn}({pretty_print(e.arg)})"
    if isinstance(e, Neg):
        inner = pretty_print(e.arg)
        if _prec(e.arg) < _PREC_NEG:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(e, BinOp):
        if e.op == "^":
            left = pretty_print(e.left)
            # the base of a power must read back as an atom or another power
            if _prec(e.left) < _PREC_POW:
                left = f"({left})"
            right = pretty_print(e.right)
            # the exponent may only be an atom or a (chain of) unary minus
            if _prec(e.right) not in (_PREC_NEG, _PREC_ATOM):
                right = f"({right})"
            return f"{left}^{right}"
        prec = _prec(e)
        left = pretty_print(e.left)
        if _prec(e.left) < prec:
            left = f"({left})"
        right = pretty_print(e.right)
        # left-associative: a - (b - c) keeps parentheses at equal precedence
        if _prec(e.right) <= prec:
            right = f"({right})"
        return f"{left} {e.op} {right}"
    raise TypeError(f"not an expression node: {e!r}")
