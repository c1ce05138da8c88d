"""Tiny arithmetic expression grammar for coefficient fields in configs.

Supported: numbers, the coordinate symbol ``x`` (or ``r``), parentheses,
unary minus, binary ``+ - * /`` and right-associative ``^``, and the
functions ``sin``, ``cos``, ``exp``, ``abs``.  Parsed once into a closure
that evaluates on numpy arrays; no use of ``eval``.
"""

from __future__ import annotations

import re
from typing import Callable

import numpy as np

_TOKEN = re.compile(r"\s*(?:(\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?|([A-Za-z]+)|(\*\*|[()+\-*/^]))")

_FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "abs": np.abs,
}


class ExpressionError(ValueError):
    """Raised for syntax errors or unknown symbols in an expression."""


def _tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            raise ExpressionError(f"bad character in expression at {text[pos:]!r}")
        if m.group(1) is not None:
            tokens.append(m.group(0).strip())
        elif m.group(2) is not None:
            tokens.append(m.group(2))
        else:
            tokens.append("^" if m.group(3) == "**" else m.group(3))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ExpressionError("unexpected end of expression")
        self.pos += 1
        return tok

    def expect(self, tok: str) -> None:
        got = self.take()
        if got != tok:
            raise ExpressionError(f"expected {tok!r}, got {got!r}")

    # sum := product (('+'|'-') product)*
    def parse_sum(self):
        node = self.parse_product()
        while self.peek() in ("+", "-"):
            op = self.take()
            rhs = self.parse_product()
            node = (op, node, rhs)
        return node

    # product := unary (('*'|'/') unary)*
    def parse_product(self):
        node = self.parse_unary()
        while self.peek() in ("*", "/"):
            op = self.take()
            rhs = self.parse_unary()
            node = (op, node, rhs)
        return node

    # unary := ('-'|'+') unary | power; -x^2 means -(x^2)
    def parse_unary(self):
        if self.peek() == "-":
            self.take()
            return ("neg", self.parse_unary())
        if self.peek() == "+":
            self.take()
            return self.parse_unary()
        return self.parse_power()

    # power := atom ('^' unary)?   (right associative, exponent may be signed)
    def parse_power(self):
        base = self.parse_atom()
        if self.peek() == "^":
            self.take()
            expo = self.parse_unary()
            return ("^", base, expo)
        return base

    def parse_atom(self):
        tok = self.take()
        if tok == "(":
            node = self.parse_sum()
            self.expect(")")
            return node
        if tok in _FUNCTIONS:
            self.expect("(")
            arg = self.parse_sum()
            self.expect(")")
            return (tok, arg)
        if tok in ("x", "r"):
            return ("var",)
        try:
            return ("num", float(tok))
        except ValueError:
            raise ExpressionError(f"unknown symbol {tok!r}") from None


def _evaluate(node, x: np.ndarray):
    kind = node[0]
    if kind == "num":
        return node[1]
    if kind == "var":
        return x
    if kind == "neg":
        return -_evaluate(node[1], x)
    if kind in _FUNCTIONS:
        return _FUNCTIONS[kind](_evaluate(node[1], x))
    a = _evaluate(node[1], x)
    b = _evaluate(node[2], x)
    if kind == "+":
        return a + b
    if kind == "-":
        return a - b
    if kind == "*":
        return a * b
    if kind == "/":
        return a / b
    if kind == "^":
        return a ** b
    raise ExpressionError(f"unhandled node {kind!r}")


def compile_expression(text: str) -> Callable[[np.ndarray], np.ndarray]:
    """Parse ``text`` and return a vectorized evaluator of the coordinate."""
    parser = _Parser(_tokenize(text))
    tree = parser.parse_sum()
    if parser.peek() is not None:
        raise ExpressionError(f"trailing tokens starting at {parser.peek()!r}")

    def evaluate(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = _evaluate(tree, x)
        return np.broadcast_to(np.asarray(out, dtype=float), x.shape).copy()

    return evaluate
