"""Tokenizer and recursive-descent parser for ODE and invariant text.

The parser produces a small syntax tree of tuples that the ODE model and the
expression module evaluate in their own domains:

* ``("num", q)``           rational literal
* ``("var", name)``        ``x``, ``y``, ``y'``, ``y''`` or a parameter
* ``("neg", a)``
* ``("add"|"sub"|"mul"|"div"|"pow", a, b)``
* ``("call", fname, [args])``  ``ln``, ``arctan``, ``arcsin``, ``sqrt``, ``Int``
"""

from __future__ import annotations

import re

from .polyring import QQ

VARIABLES = ("x", "y", "y'", "y''")
FUNCTIONS = ("ln", "log", "arctan", "arcsin", "sqrt", "Int")


class ParseError(SyntaxError):
    """Malformed input text; ``pos`` is the 0-based character offset."""

    def __init__(self, msg, text="", pos=0):
        super().__init__(f"{msg} at position {pos}")
        self.msg = msg
        self.text = text
        self.pos = pos


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*'*)|(?P<op>[-+*/^(),=]))"
)


def tokenize(text):
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        start = m.start(m.lastgroup)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text, names):
        self.text = text
        self.names = set(names)
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, value):
        kind, v, pos = self.take()
        if v != value:
            found = "end of input" if kind == "end" else repr(v)
            raise ParseError(f"expected {value!r}, found {found}", self.text, pos)

    def error(self, msg):
        raise ParseError(msg, self.text, self.peek()[2])

    def parse_equation(self):
        lhs = self.parse_sum()
        rhs = None
        if self.peek()[1] == "=":
            self.take()
            rhs = self.parse_sum()
        if self.peek()[0] != "end":
            self.error(f"unexpected token {self.peek()[1]!r}")
        return lhs, rhs

    def parse_expression(self):
        e = self.parse_sum()
        if self.peek()[0] != "end":
            self.error(f"unexpected token {self.peek()[1]!r}")
        return e

    def parse_sum(self):
        node = self.parse_product()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.parse_product()
            node = ("add" if op == "+" else "sub", node, rhs)
        return node

    def parse_product(self):
        node = self.parse_unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            rhs = self.parse_unary()
            node = ("mul" if op == "*" else "div", node, rhs)
        return node

    def parse_unary(self):
        if self.peek()[1] in ("-", "+"):
            op = self.take()[1]
            inner = self.parse_unary()
            return ("neg", inner) if op == "-" else inner
        return self.parse_power()

    def parse_power(self):
        base = self.parse_atom()
        if self.peek()[1] == "^":
            self.take()
            # right associative; the exponent may carry a sign
            exp = self.parse_unary_power()
            return ("pow", base, exp)
        return base

    def parse_unary_power(self):
        if self.peek()[1] in ("-", "+"):
            op = self.take()[1]
            inner = self.parse_unary_power()
            return ("neg", inner) if op == "-" else inner
        return self.parse_power()

    def parse_atom(self):
        kind, v, pos = self.take()
        if kind == "num":
            return ("num", QQ(int(v)))
        if kind == "name":
            if v in FUNCTIONS:
                if self.peek()[1] != "(":
                    raise ParseError(f"function {v} needs an argument list", self.text, pos)
                self.take()
                args = [self.parse_sum()]
                while self.peek()[1] == ",":
                    self.take()
                    if v == "Int" and self.peek()[0] == "name":
                        k2, v2, p2 = self.take()
                        args.append(("var", v2))
                    else:
                        args.append(self.parse_sum())
                self.expect(")")
                return ("call", "ln" if v == "log" else v, args)
            if v in VARIABLES or v in self.names:
                return ("var", v)
            raise ParseError(f"unknown identifier {v!r}", self.text, pos)
        if v == "(":
            node = self.parse_sum()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(v)
        raise ParseError(f"unexpected {found}", self.text, pos)


def parse_equation(text, names=()):
    """Parse ``LHS [= RHS]``; returns (lhs_tree, rhs_tree or None)."""
    return _Parser(text, names).parse_equation()


def parse_expression(text, names=()):
    return _Parser(text, names).parse_expression()


def contains(tree, pred):
    if pred(tree):
        return True
    for child in tree[1:]:
        if isinstance(child, tuple) and contains(child, pred):
            return True
        if isinstance(child, list) and any(contains(c, pred) for c in child):
            return True
    return False
