"""Expression syntax: tokenizer, recursive-descent parser, AST and conversion.

Grammar::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := base ('^' integer)?
    base   := number | identifier | '(' expr ')' | '-' factor

Identifiers match ``[a-zA-Z][a-zA-Z0-9_]*``; numbers are arbitrary-precision
integers (a ratio ``n/m`` is just a division of two numbers). Exponents may
carry a leading minus sign. Unary minus takes a whole factor, so ``-p^2`` is
``-(p^2)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

from ..errors import DivisionByZero, ParseError, UndeclaredIdentifier
from .poly import RationalFunction, space

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<id>[A-Za-z][A-Za-z0-9_]*)|(?P<op>\*\*|[-+*/^()]))")


@dataclass(frozen=True)
class Const:
    value: Fraction


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: int


@dataclass(frozen=True)
class Neg:
    operand: "Node"


Node = Union[Const, Var, BinOp, Pow, Neg]


def _tokenize(text):
    pos = 0
    out = []
    n = len(text)
    while pos < n:
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[bad]!r}", bad, text)
        start = m.start(m.lastgroup)
        kind = m.lastgroup
        val = m.group(kind)
        if val == "**":
            val = "^"
        out.append((kind, val, start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text, declared):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.declared = declared

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, val):
        kind, v, pos = self.take()
        if v != val:
            what = "end of input" if kind == "end" else repr(v)
            raise ParseError(f"expected {val!r}, found {what}", pos, self.text)

    def parse(self):
        node = self.expr()
        kind, v, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {v!r}", pos, self.text)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.factor())
        return node

    def factor(self):
        node = self.base()
        if self.peek()[1] == "^":
            self.take()
            sign = 1
            if self.peek()[1] == "-":
                self.take()
                sign = -1
            kind, v, pos = self.take()
            if kind != "num":
                raise ParseError("exponent must be an integer", pos, self.text)
            node = Pow(node, sign * int(v))
        return node

    def base(self):
        kind, v, pos = self.take()
        if kind == "num":
            return Const(Fraction(int(v)))
        if kind == "id":
            if self.declared is not None and v not in self.declared:
                raise UndeclaredIdentifier(v, pos, self.text)
            return Var(v)
        if v == "(":
            node = self.expr()
            self.expect(")")
            return node
        if v == "-":
            # binds looser than '^': -p^2 is -(p^2)
            return Neg(self.factor())
        what = "end of input" if kind == "end" else repr(v)
        raise ParseError(f"unexpected {what}", pos, self.text)


def parse(text: str, variables: Iterable[str] | None = None) -> Node:
    """Parse ``text``; every identifier must belong to ``variables`` when given."""
    declared = None if variables is None else frozenset(variables)
    return _Parser(text, declared).parse()


def identifiers(node: Node) -> set:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, BinOp):
        return identifiers(node.left) | identifiers(node.right)
    if isinstance(node, Pow):
        return identifiers(node.base)
    if isinstance(node, Neg):
        return identifiers(node.operand)
    return set()


def evaluate(node: Node, env: Mapping[str, Fraction]) -> Fraction:
    """Exact evaluation at a rational point."""
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        return Fraction(env[node.name])
    if isinstance(node, Neg):
        return -evaluate(node.operand, env)
    if isinstance(node, Pow):
        b = evaluate(node.base, env)
        if node.exponent < 0 and b == 0:
            raise DivisionByZero("zero raised to a negative power")
        return b**node.exponent
    a = evaluate(node.left, env)
    b = evaluate(node.right, env)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if b == 0:
        raise DivisionByZero("division by zero during evaluation")
    return a / b


def to_rational(node: Node, names: Iterable[str] = ()) -> RationalFunction:
    """Canonical rational function of an AST; ``names`` pre-declares the space."""
    sp = space(set(names) | identifiers(node))
    return _convert(node, sp)


def _convert(node, sp):
    if isinstance(node, Const):
        return RationalFunction.constant(node.value, sp)
    if isinstance(node, Var):
        return RationalFunction.variable(node.name, sp)
    if isinstance(node, Neg):
        return -_convert(node.operand, sp)
    if isinstance(node, Pow):
        b = _convert(node.base, sp)
        if node.exponent < 0 and b.is_zero():
            raise DivisionByZero("zero raised to a negative power")
        return b**node.exponent
    a = _convert(node.left, sp)
    b = _convert(node.right, sp)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if b.is_zero():
        raise DivisionByZero("literal division by the zero polynomial")
    return a / b


def rational(text: str, variables: Iterable[str] | None = None) -> RationalFunction:
    """Shorthand for ``to_rational(parse(text, variables))``."""
    return to_rational(parse(text, variables), variables or ())


def to_text(node: Node) -> str:
    """Fully parenthesised rendering of an AST (mainly for debugging)."""
    if isinstance(node, Const):
        v = node.value
        return str(v.numerator) if v.denominator == 1 else f"({v.numerator}/{v.denominator})"
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return f"-({to_text(node.operand)})"
    if isinstance(node, Pow):
        return f"({to_text(node.base)})^{node.exponent}"
    return f"({to_text(node.left)} {node.op} {to_text(node.right)})"
