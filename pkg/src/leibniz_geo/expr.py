"""Recursive-descent parser for the scalar expression grammar.

Grammar (the normative description lives in docs/format.md):

    expr   :=  term (('+' | '-') term)*
    term   :=  factor (('*' | '/') factor)*
    factor :=  '-' factor | power
    power  :=  atom ('^' INT)?          -- nonnegative integer exponents only
    atom   :=  INT | NAME | '(' expr ')'

The parser produces a small tuple AST; ``parse_expr`` lowers it to a
``ScalarField`` over the declared coordinates.  The AST is exposed so that an
independent tree evaluator can cross-check ``eval_at``.
"""

from __future__ import annotations

import re

from .errors import ExprSyntaxError, UnknownVariable
from .scalar import ScalarField

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|([-+*/^()]))")


def tokenize(text):
    """Yield (kind, value, position) triples; kind in {'int', 'name', 'op'}."""
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            at = len(text) - len(stripped)
            if not stripped:
                break
            raise ExprSyntaxError(f"unexpected character {stripped[0]!r}", at)
        if m.group(1) is not None:
            tokens.append(("int", int(m.group(1)), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), m.start(2)))
        else:
            tokens.append(("op", m.group(3), m.start(3)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = tokenize(text)
        self.index = 0

    def peek(self):
        if self.index < len(self.tokens):
            return self.tokens[self.index]
        return ("end", None, len(self.text))

    def advance(self):
        token = self.peek()
        self.index += 1
        return token

    def expect_op(self, op):
        kind, value, pos = self.peek()
        if kind != "op" or value != op:
            raise ExprSyntaxError(f"expected {op!r}", pos)
        self.advance()

    def parse(self):
        node = self.expr()
        kind, value, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected trailing input {value!r}", pos)
        return node

    def expr(self):
        node = self.term()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.advance()
                rhs = self.term()
                node = ("add" if value == "+" else "sub", node, rhs)
            else:
                return node

    def term(self):
        node = self.factor()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "*/":
                self.advance()
                rhs = self.factor()
                node = ("mul" if value == "*" else "div", node, rhs)
            else:
                return node

    def factor(self):
        kind, value, _ = self.peek()
        if kind == "op" and value == "-":
            self.advance()
            return ("neg", self.factor())
        return self.power()

    def power(self):
        node = self.atom()
        kind, value, _ = self.peek()
        if kind == "op" and value == "^":
            self.advance()
            kind, exponent, pos = self.peek()
            if kind != "int":
                raise ExprSyntaxError("exponent must be a nonnegative integer", pos)
            self.advance()
            node = ("pow", node, exponent)
        return node

    def atom(self):
        kind, value, pos = self.advance()
        if kind == "int":
            return ("int", value)
        if kind == "name":
            return ("var", value)
        if kind == "op" and value == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ExprSyntaxError(f"expected a number, name or '('", pos)


def parse_ast(text):
    """Parse expression text to the raw tuple AST."""
    return _Parser(text).parse()


def ast_to_field(node, coords):
    """Lower an AST to a ScalarField over the given coordinates."""
    op = node[0]
    if op == "int":
        return ScalarField.constant(node[1], coords)
    if op == "var":
        if node[1] not in coords:
            raise UnknownVariable(node[1])
        return ScalarField.coordinate(coords.index(node[1]) + 1, tuple(coords))
    if op == "neg":
        return -ast_to_field(node[1], coords)
    if op == "pow":
        return ast_to_field(node[1], coords) ** node[2]
    lhs = ast_to_field(node[1], coords)
    rhs = ast_to_field(node[2], coords)
    if op == "add":
        return lhs + rhs
    if op == "sub":
        return lhs - rhs
    if op == "mul":
        return lhs * rhs
    if op == "div":
        return lhs / rhs
    raise AssertionError(f"unreachable AST node {op!r}")


def parse_expr(text, coords):
    """Parse expression text to a ScalarField over the given coordinates."""
    coords = tuple(coords)
    if isinstance(coords, str):
        raise TypeError("coords must be a sequence of names")
    return ast_to_field(parse_ast(text), list(coords))
