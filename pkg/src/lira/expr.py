"""Tokenizer and recursive-descent parser for the expression grammar.

The parser produces a small tuple AST which is evaluated by whichever
context needs it (commutative polynomials, or elements of a twisted
enveloping algebra where ``*`` does not commute)::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := atom ('^' ['+'|'-'] int)?
    atom   := rational | var | generator | '(' expr ')'
    rational := int ('/' posint)?
    generator := 'e' posint
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import LiraSyntaxError

GENERATOR_RE = re.compile(r"e([1-9][0-9]*)\Z")
_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


def tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            break
        if m.group(1) is not None:
            tokens.append(("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise LiraSyntaxError(f"unexpected character {ch!r}", col=m.start(3) + 1)
            tokens.append((ch, ch, m.start(3)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None):
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            want = "end of expression" if kind == "end" else repr(kind)
            got = "end of expression" if tok[0] == "end" else repr(tok[1])
            raise LiraSyntaxError(f"expected {want}, found {got}", col=tok[2] + 1)
        self.i += 1
        return tok

    def expr(self):
        tok = self.peek()
        if tok[0] in ("+", "-"):
            self.take()
            node = self.term()
            if tok[0] == "-":
                node = ("neg", node)
        else:
            node = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            rhs = self.term()
            node = ("add" if op == "+" else "sub", node, rhs)
        return node

    def term(self):
        node = self.factor()
        while self.peek()[0] == "*":
            self.take()
            node = ("mul", node, self.factor())
        return node

    def factor(self):
        base = self.atom()
        if self.peek()[0] == "^":
            caret = self.take()
            sign = 1
            if self.peek()[0] in ("+", "-"):
                sign = -1 if self.take()[0] == "-" else 1
            tok = self.peek()
            if tok[0] != "int":
                raise LiraSyntaxError("exponent must be an integer", col=tok[2] + 1)
            self.take()
            return ("pow", base, sign * int(tok[1]), caret[2] + 1)
        return base

    def atom(self):
        tok = self.peek()
        kind = tok[0]
        if kind == "int":
            self.take()
            num = int(tok[1])
            if self.peek()[0] == "/":
                self.take()
                den = self.peek()
                if den[0] != "int":
                    raise LiraSyntaxError("denominator must be a positive integer", col=den[2] + 1)
                self.take()
                if int(den[1]) == 0:
                    raise LiraSyntaxError("zero denominator", col=den[2] + 1)
                return ("num", Fraction(num, int(den[1])), tok[2] + 1)
            return ("num", Fraction(num), tok[2] + 1)
        if kind == "name":
            self.take()
            m = GENERATOR_RE.match(tok[1])
            if m:
                return ("gen", int(m.group(1)), tok[2] + 1)
            return ("var", tok[1], tok[2] + 1)
        if kind == "(":
            self.take()
            node = self.expr()
            self.take(")")
            return node
        got = "end of expression" if kind == "end" else repr(tok[1])
        raise LiraSyntaxError(f"unexpected {got}", col=tok[2] + 1)


def parse_expr(text: str):
    """Parse ``text`` into a tuple AST; raises LiraSyntaxError."""
    p = _Parser(text)
    node = p.expr()
    p.take("end")
    return node


def evaluate(node, ctx):
    """Fold an AST with a context providing num/var/gen/add/sub/mul/neg/pow."""
    kind = node[0]
    if kind == "num":
        return ctx.num(node[1])
    if kind == "var":
        return ctx.var(node[1], node[2])
    if kind == "gen":
        return ctx.gen(node[1], node[2])
    if kind == "neg":
        return ctx.neg(evaluate(node[1], ctx))
    if kind == "add":
        return ctx.add(evaluate(node[1], ctx), evaluate(node[2], ctx))
    if kind == "sub":
        return ctx.sub(evaluate(node[1], ctx), evaluate(node[2], ctx))
    if kind == "mul":
        return ctx.mul(evaluate(node[1], ctx), evaluate(node[2], ctx))
    if kind == "pow":
        return ctx.pow(node[1], evaluate(node[1], ctx), node[2], node[3])
    raise AssertionError(kind)
