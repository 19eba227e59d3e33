"""Recursive-descent parser for the arithmetic expression grammar.

Grammar (scalar literals and rational-map expressions share it):

    expr   := ('+'|'-')? term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := base ('^' ('-')? integer)?
    base   := identifier | integer | '(' expr ')'

The caller supplies a semantics object with from_int / atom / add / sub /
mul / div / neg / pow, so the same grammar evaluates to plain scalars or to
rational-map fractions depending on context.
"""

import re

from .errors import ParseError

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|([-+*/^()]))")


def tokenize(text):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character at position {pos}: {text[pos:]!r}")
        if m.group(1) is not None:
            out.append(("int", int(m.group(1))))
        elif m.group(2) is not None:
            out.append(("name", m.group(2)))
        else:
            out.append(("op", m.group(3)))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, tokens, sem):
        self.tokens = tokens
        self.pos = 0
        self.sem = sem

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def expect_op(self, op):
        kind, val = self.take()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}, got {val!r}")

    def parse_expr(self):
        kind, val = self.peek()
        negate = False
        if kind == "op" and val in "+-":
            self.take()
            negate = val == "-"
        acc = self.parse_term()
        if negate:
            acc = self.sem.neg(acc)
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.parse_term()
                acc = self.sem.add(acc, rhs) if val == "+" else self.sem.sub(acc, rhs)
            else:
                return acc

    def parse_term(self):
        acc = self.parse_factor()
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "*/":
                self.take()
                rhs = self.parse_factor()
                acc = self.sem.mul(acc, rhs) if val == "*" else self.sem.div(acc, rhs)
            else:
                return acc

    def parse_factor(self):
        base = self.parse_base()
        kind, val = self.peek()
        if kind == "op" and val == "^":
            self.take()
            sign = 1
            kind, val = self.peek()
            if kind == "op" and val == "-":
                self.take()
                sign = -1
            kind, val = self.take()
            if kind != "int":
                raise ParseError("exponent must be an integer")
            return self.sem.pow(base, sign * val)
        return base

    def parse_base(self):
        kind, val = self.take()
        if kind == "int":
            return self.sem.from_int(val)
        if kind == "name":
            return self.sem.atom(val)
        if kind == "op" and val == "(":
            inner = self.parse_expr()
            self.expect_op(")")
            return inner
        raise ParseError(f"unexpected token {val!r}")


def parse(text, sem):
    tokens = tokenize(text)
    if not tokens:
        raise ParseError("empty expression")
    parser = _Parser(tokens, sem)
    result = parser.parse_expr()
    if parser.pos != len(tokens):
        raise ParseError(f"trailing input at token {parser.pos}")
    return result
