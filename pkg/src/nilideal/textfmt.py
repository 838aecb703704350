"""Text format for polynomials.

Grammar (whitespace is insignificant)::

    expr    := term (('+' | '-') term)*
    term    := unary ('*' unary)*
    unary   := '-' unary | atom
    atom    := INT ['/' INT] | 'x' INT | '(' expr ')' | '[' expr (',' expr)* ']'

``[e1, ..., ek]`` is the left-normed commutator.  Rational literals are only
accepted over ``Q``.  Juxtaposition is not a product: ``*`` is mandatory.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import List, Tuple

from .freealg import QQ, ZZ, Poly, Ring, left_normed, word_key


class ParseError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


_TOKEN = re.compile(r"\s*(?:(x\d+)|(\d+)|([-+*/\[\](),]))")


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unknown token {text[bad]!r}", bad)
        start = m.start(m.lastindex)
        if m.group(1):
            toks.append(("var", m.group(1), start))
        elif m.group(2):
            toks.append(("int", m.group(2), start))
        else:
            toks.append(("op", m.group(3), start))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, ring):
        self.toks = _tokenize(text)
        self.i = 0
        self.ring = ring

    def peek(self):
        return self.toks[self.i]

    def take(self, value=None):
        tok = self.toks[self.i]
        if value is not None and tok[1] != value:
            raise ParseError(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok[2])
        self.i += 1
        return tok

    def expr(self):
        acc = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            acc = ("add" if op == "+" else "sub", acc, self.term())
        return acc

    def term(self):
        acc = self.unary()
        while self.peek()[:2] == ("op", "*"):
            self.take()
            acc = ("mul", acc, self.unary())
        return acc

    def unary(self):
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return ("neg", self.unary())
        return self.atom()

    def atom(self):
        kind, val, pos = self.peek()
        if kind == "int":
            self.take()
            num = int(val)
            if self.peek()[:2] == ("op", "/"):
                if self.ring is not None and self.ring != QQ:
                    raise ParseError("rational literal outside Q", self.peek()[2])
                self.take()
                k2, v2, p2 = self.take()
                if k2 != "int":
                    raise ParseError("expected denominator", p2)
                if int(v2) == 0:
                    raise ParseError("zero denominator", p2)
                return ("num", Fraction(num, int(v2)))
            return ("num", num)
        if kind == "var":
            self.take()
            k = int(val[1:])
            if k < 1:
                raise ParseError("variable index must be >= 1", pos)
            return ("var", k)
        if (kind, val) == ("op", "("):
            self.take()
            e = self.expr()
            self.take(")")
            return e
        if (kind, val) == ("op", "["):
            self.take()
            args = [self.expr()]
            while self.peek()[:2] == ("op", ","):
                self.take()
                args.append(self.expr())
            self.take("]")
            return ("br", tuple(args))
        raise ParseError(f"unexpected {val or 'end of input'!r}", pos)


def parse_expr(text: str, ring: Ring = None):
    """Parse into an expression tree of nested tuples (``var``, ``num``, ``add``, ...)."""
    p = _Parser(text, ring)
    tree = p.expr()
    kind, val, pos = p.peek()
    if kind != "end":
        raise ParseError(f"unexpected {val!r}", pos)
    return tree


def evaluate(tree, assignment, ring: Ring = ZZ) -> Poly:
    """Evaluate a tree; ``assignment`` maps a variable index to a Poly (or None for x_k itself)."""
    tag = tree[0]
    if tag == "var":
        k = tree[1]
        if assignment is None:
            return Poly.var(k, ring)
        return assignment[k]
    if tag == "num":
        return Poly.const(tree[1], ring)
    if tag == "neg":
        return -evaluate(tree[1], assignment, ring)
    if tag == "br":
        return left_normed([evaluate(a, assignment, ring) for a in tree[1]])
    a = evaluate(tree[1], assignment, ring)
    b = evaluate(tree[2], assignment, ring)
    if tag == "add":
        return a + b
    if tag == "sub":
        return a - b
    return a * b


def tree_vars(tree) -> set:
    if tree[0] == "var":
        return {tree[1]}
    if tree[0] == "num":
        return set()
    if tree[0] == "br":
        return set().union(*(tree_vars(a) for a in tree[1]))
    return set().union(*(tree_vars(a) for a in tree[1:]))


def parse_poly(text: str, ring: Ring = ZZ) -> Poly:
    return evaluate(parse_expr(text, ring), None, ring)


def format_word(w) -> str:
    return "*".join(f"x{k}" for k in w)


def _coeff_text(c, ring: Ring) -> str:
    if isinstance(c, Fraction) and c.denominator != 1:
        return f"{c.numerator}/{c.denominator}"
    return str(int(c))


def format_poly(p: Poly) -> str:
    """Canonical text: terms in degree-then-lex order, coefficient before word."""
    if not p.terms:
        return "0"
    parts = []
    for w, c in sorted(p.terms.items(), key=lambda t: word_key(t[0])):
        neg = (c < 0) if p.ring.tag != "F" else False
        mag = -c if neg else c
        if not w:
            body = _coeff_text(mag, p.ring)
        elif mag == 1:
            body = format_word(w)
        else:
            body = f"{_coeff_text(mag, p.ring)}*{format_word(w)}"
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append(("- " if neg else "+ ") + body)
    return " ".join(parts)
