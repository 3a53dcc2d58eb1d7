"""Parsing of monomials, noncommutative polynomials and tensor expressions.

Grammar (whitespace separates tokens and may stand for multiplication)::

    expr    := sign? term (sign term)*
    term    := coeff ('*'? body)? | body
    body    := mono | mono '|' mono          (the bar form only in tensor mode)
    mono    := '1' | factor ('*'? factor)*
    factor  := NAME ('^' INT)?
    coeff   := INT ('/' INT)?
"""
from __future__ import annotations

import re
from fractions import Fraction

from .errors import ParseError

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_']*)|(?P<op>[-+*/^|]))")


def _tokenize(text: str, line: int):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos:pos + 1]!r}", line, pos + 1)
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), start + 1))
        pos = m.end()
    out.append(("end", "", len(text) + 1))
    return out


class _Parser:
    def __init__(self, text, line, lookups, tensor):
        self.toks = _tokenize(text, line)
        self.i = 0
        self.line = line
        self.lookups = lookups
        self.tensor = tensor

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.line, tok[2])

    def expect_op(self, op):
        tok = self.take()
        if tok[0] != "op" or tok[1] != op:
            self.fail(f"expected {op!r}", tok)

    def coeff(self):
        tok = self.take()
        val = Fraction(int(tok[1]))
        nxt = self.peek()
        if nxt[0] == "op" and nxt[1] == "/":
            self.take()
            den = self.take()
            if den[0] != "num":
                self.fail("expected denominator", den)
            if int(den[1]) == 0:
                self.fail("zero denominator", den)
            val /= int(den[1])
            return val, True
        return val, False

    def mono(self, side):
        names = self.lookups[side]
        tok = self.peek()
        if tok[0] == "num":
            if tok[1] != "1":
                self.fail("only 1 may stand for the empty monomial")
            self.take()
            return ()
        word = []
        while True:
            tok = self.peek()
            if tok[0] != "name":
                break
            self.take()
            if tok[1] not in names:
                self.fail(f"unknown generator {tok[1]!r}", tok)
            g = names[tok[1]]
            exp = 1
            nxt = self.peek()
            if nxt[0] == "op" and nxt[1] == "^":
                self.take()
                e = self.take()
                if e[0] != "num":
                    self.fail("expected exponent", e)
                exp = int(e[1])
            word.extend([g] * exp)
            nxt = self.peek()
            if nxt[0] == "op" and nxt[1] == "*" and self.toks[self.i + 1][0] == "name":
                self.take()
        if not word:
            self.fail("expected a monomial")
        return tuple(word)

    def body(self):
        left = self.mono(0)
        if not self.tensor:
            return left
        self.expect_op("|")
        return (left, self.mono(1))

    def unit_body(self):
        if not self.tensor:
            return ()
        self.expect_op("|")
        return ((), self.mono(1))

    def term(self):
        tok = self.peek()
        if tok[0] == "num":
            start = self.i
            val, frac = self.coeff()
            nxt = self.peek()
            if nxt[0] == "op" and nxt[1] == "*":
                self.take()
                return val, self.body()
            if nxt[0] == "name":
                return val, self.body()
            if nxt[0] == "op" and nxt[1] == "|" and self.tensor:
                if frac or val != 1:
                    self.fail("coefficient needs a monomial")
                return Fraction(1), self.unit_body()
            if self.tensor:
                self.i = start
                self.fail("tensor term needs the form a|b")
            return val, ()
        if tok[0] == "name":
            return Fraction(1), self.body()
        self.fail("expected a term")

    def expr(self):
        terms: dict = {}
        sign = 1
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.take()
            sign = -1 if tok[1] == "-" else 1
        if self.peek()[0] == "num" and self.peek()[1] == "0" and self.toks[self.i + 1][0] == "end":
            self.take()
            return terms
        while True:
            c, key = self.term()
            terms[key] = terms.get(key, 0) + sign * c
            tok = self.peek()
            if tok[0] == "end":
                break
            if tok[0] == "op" and tok[1] in "+-":
                self.take()
                sign = -1 if tok[1] == "-" else 1
                continue
            self.fail("expected + or -")
        return {k: v for k, v in terms.items() if v}


def parse_poly(text: str, names, line: int = 0) -> dict:
    """Parse into ``{word: Fraction}``; ``names`` maps generator name to index."""
    return _Parser(text, line, (dict(names), {}), tensor=False).expr()


def parse_tensor(text: str, left_names, right_names, line: int = 0) -> dict:
    """Parse ``sum c * u|v`` into ``{(u, v): Fraction}``."""
    return _Parser(text, line, (dict(left_names), dict(right_names)), tensor=True).expr()


def parse_tensor_key(text: str, left_names, right_names, line: int = 0):
    """Parse a bare basis tensor ``u|v`` (no coefficient)."""
    p = _Parser(text, line, (dict(left_names), dict(right_names)), tensor=True)
    key = p.body()
    if p.peek()[0] != "end":
        p.fail("unexpected input after basis tensor")
    return key


def format_word(word, names) -> str:
    if not word:
        return "1"
    out = []
    i = 0
    while i < len(word):
        j = i
        while j < len(word) and word[j] == word[i]:
            j += 1
        e = j - i
        out.append(names[word[i]] if e == 1 else f"{names[word[i]]}^{e}")
        i = j
    return "*".join(out)


def format_terms(items, fmt_key, field) -> str:
    """Render ``[(key, coeff)]`` as ``c*key + ...`` with explicit signs."""
    if not items:
        return "0"
    parts = []
    for key, c in items:
        s = field.fmt(c) if field.p == 0 else str(field.signed(c))
        neg = s.startswith("-")
        mag = s[1:] if neg else s
        body = fmt_key(key)
        text = body if mag == "1" else f"{mag}*{body}"
        if not parts:
            parts.append(("-" if neg else "") + text)
        else:
            parts.append((" - " if neg else " + ") + text)
    return "".join(parts)
