"""Tokenizer and recursive-descent parser for polynomial expressions.

Grammar (``^`` binds tighter than unary minus, juxtaposition multiplies)::

    expr   := term (('+' | '-') term)*
    term   := unary (['*'] unary)*
    unary  := ('-' | '+') unary | power
    power  := atom ('^' INT)?
    atom   := INT | NAME | '(' expr ')'
"""

import re
from typing import NamedTuple

from .errors import ScriptError

_TOKEN_RE = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9']*)|(?P<op>[-+*^(),=]))")


class Token(NamedTuple):
    kind: str  # 'int', 'name', 'op', 'end'
    text: str
    column: int  # 1-based


def tokenize(text, line=None, offset=0):
    """Split ``text`` into tokens; ``offset`` is added to reported columns."""
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos:].strip() == "":
            pos = n
            break
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            col = pos + 1 + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ScriptError(f"unexpected character {text[col - 1]!r}", line, col + offset)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append(Token(kind, m.group(kind), start + 1 + offset))
        pos = m.end()
    tokens.append(Token("end", "", n + 1 + offset))
    return tokens


class ExprParser:
    """Parse one or more comma-separated polynomials from a token list."""

    def __init__(self, ctx, tokens, line=None):
        self.ctx = ctx
        self.tokens = tokens
        self.i = 0
        self.line = line

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, msg, tok):
        raise ScriptError(msg, self.line, tok.column)

    def parse_list(self):
        polys = [self.parse_expr()]
        while self.peek().text == ",":
            comma = self.advance()
            if self.peek().kind == "end":
                self.error("expected polynomial after ','", comma)
            polys.append(self.parse_expr())
        tok = self.peek()
        if tok.kind != "end":
            self.error(f"unexpected token {tok.text!r}", tok)
        return polys

    def parse_single(self):
        f = self.parse_expr()
        tok = self.peek()
        if tok.kind != "end":
            self.error(f"unexpected token {tok.text!r}", tok)
        return f

    def parse_expr(self):
        f = self.parse_term()
        while self.peek().text in ("+", "-"):
            op = self.advance()
            if self.peek().kind == "end" or self.peek().text in (",", ")"):
                self.error(f"expected operand after {op.text!r}", op)
            g = self.parse_term()
            f = f + g if op.text == "+" else f - g
        return f

    def _starts_operand(self, tok):
        return tok.kind in ("int", "name") or tok.text == "("

    def parse_term(self):
        f = self.parse_unary()
        while True:
            tok = self.peek()
            if tok.text == "*":
                self.advance()
                if not (self._starts_operand(self.peek()) or self.peek().text in ("-", "+")):
                    self.error("expected operand after '*'", tok)
                f = f * self.parse_unary()
            elif self._starts_operand(tok):
                f = f * self.parse_unary()
            else:
                return f

    def parse_unary(self):
        tok = self.peek()
        if tok.text in ("-", "+"):
            self.advance()
            if not (self._starts_operand(self.peek()) or self.peek().text in ("-", "+")):
                self.error(f"expected operand after {tok.text!r}", tok)
            f = self.parse_unary()
            return -f if tok.text == "-" else f
        return self.parse_power()

    def parse_power(self):
        base = self.parse_atom()
        if self.peek().text == "^":
            caret = self.advance()
            tok = self.peek()
            if tok.kind != "int":
                self.error("exponent must be a non-negative integer", tok if tok.kind != "end" else caret)
            self.advance()
            return base ** int(tok.text)
        return base

    def parse_atom(self):
        tok = self.advance()
        if tok.kind == "int":
            return self.ctx.constant(int(tok.text))
        if tok.kind == "name":
            try:
                return self.ctx.var(tok.text)
            except KeyError:
                self.error(f"unknown variable {tok.text!r}", tok)
        if tok.text == "(":
            f = self.parse_expr()
            close = self.advance()
            if close.text != ")":
                self.error("expected ')'", close)
            return f
        if tok.kind == "end":
            self.error("unexpected end of input", tok)
        self.error(f"unexpected token {tok.text!r}", tok)


def parse_poly(ctx, text, line=None, offset=0):
    return ExprParser(ctx, tokenize(text, line, offset), line).parse_single()


def parse_poly_list(ctx, text, line=None, offset=0):
    return ExprParser(ctx, tokenize(text, line, offset), line).parse_list()
