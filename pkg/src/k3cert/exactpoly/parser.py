"""Text format for polynomials over Q(i).

Grammar (whitespace is insignificant)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*      # divisors must be constants
    unary  := ("+" | "-") unary | power
    power  := atom ("^" INTEGER)?
    atom   := INTEGER | INTEGER "i" | "i" | IDENT | "(" expr ")"

``i`` is the imaginary unit and cannot be used as a variable name. Juxtaposition
(``2x`` or ``x y``) is rejected.
"""

from __future__ import annotations

import re
from typing import Sequence

from .gaussrat import ONE, GaussRat
from .multipoly import MultiPoly, default_names

__all__ = ["ParseError", "parse_poly", "parse_gaussrat", "render_poly"]


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.message = message
        self.position = position


_TOKEN = re.compile(
    r"\s*(?:(?P<imag>\d+i)(?![A-Za-z0-9_])|(?P<num>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str, names: Sequence[str]):
        self.tokens = _tokenize(text)
        self.k = 0
        self.names = {name: j for j, name in enumerate(names)}
        self.nvars = len(names)

    def peek(self):
        return self.tokens[self.k]

    def take(self):
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.take()
        if val != value:
            raise ParseError(f"expected {value!r}, found {val or 'end of input'!r}", pos)

    def parse(self) -> MultiPoly:
        if self.peek()[0] == "end":
            raise ParseError("empty expression", 0)
        p = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {val!r}", pos)
        return p

    def expr(self) -> MultiPoly:
        p = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> MultiPoly:
        p = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            op, pos = self.take()[1], self.peek()[2]
            q = self.unary()
            if op == "*":
                p = p * q
            else:
                if not q.is_constant():
                    raise ParseError("division by a non-constant", pos)
                c = q.constant_term()
                if not c:
                    raise ParseError("division by zero", pos)
                p = p.scale(c.inverse())
        self._no_juxtaposition()
        return p

    def _no_juxtaposition(self):
        kind, val, pos = self.peek()
        if kind in ("num", "imag", "ident") or (kind == "op" and val == "("):
            raise ParseError("implicit multiplication is not allowed", pos)

    def unary(self) -> MultiPoly:
        kind, val, _ = self.peek()
        if kind == "op" and val in ("+", "-"):
            self.take()
            p = self.unary()
            return -p if val == "-" else p
        return self.power()

    def power(self) -> MultiPoly:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            kind, val, pos = self.take()
            if kind != "num":
                raise ParseError("exponent must be a non-negative integer", pos)
            base = base ** int(val)
        return base

    def atom(self) -> MultiPoly:
        kind, val, pos = self.take()
        n = self.nvars
        if kind == "num":
            return MultiPoly.constant(n, int(val))
        if kind == "imag":
            return MultiPoly.constant(n, GaussRat(0, int(val[:-1])))
        if kind == "ident":
            if val == "i":
                return MultiPoly.constant(n, GaussRat(0, 1))
            if val not in self.names:
                raise ParseError(f"unknown variable {val!r}", pos)
            return MultiPoly.var(n, self.names[val])
        if kind == "op" and val == "(":
            p = self.expr()
            self.expect(")")
            return p
        raise ParseError(f"unexpected {val or 'end of input'!r}", pos)


def parse_poly(text: str, var_names: Sequence[str]) -> MultiPoly:
    """Parse ``text`` into an expanded polynomial over the listed variables."""
    names = list(var_names)
    if "i" in names:
        raise ValueError("'i' is the imaginary unit and cannot be a variable name")
    if len(set(names)) != len(names):
        raise ValueError("duplicate variable names")
    return _Parser(text, names).parse()


def parse_gaussrat(text: str) -> GaussRat:
    p = parse_poly(text, [])
    return p.constant_term()


def _monomial(exp, names) -> str:
    parts = []
    for name, a in zip(names, exp):
        if a == 1:
            parts.append(name)
        elif a > 1:
            parts.append(f"{name}^{a}")
    return "*".join(parts)


def render_poly(p: MultiPoly, names: Sequence[str] | None = None) -> str:
    """Canonical text: graded-lex descending terms, ``a/b+c/d*i`` coefficients."""
    if names is None:
        names = default_names(p.nvars)
    if p.is_zero():
        return "0"
    order = sorted(p.terms, key=lambda e: (sum(e), e), reverse=True)
    out = []
    for e in order:
        c = p.terms[e]
        mon = _monomial(e, names)
        if c.is_real() or c.re == 0:
            part = c.re if c.is_real() else c.im
            negative = part < 0
            mag = GaussRat(abs(part)) if c.is_real() else GaussRat(0, abs(part))
            if mon and mag == ONE:
                body = mon
            else:
                body = mag.format(star=True) + ("*" + mon if mon else "")
        else:
            negative = False
            body = "(" + c.format(star=True) + ")" + ("*" + mon if mon else "")
        if not out:
            out.append(("-" if negative else "") + body)
        else:
            out.append(("-" if negative else "+") + body)
    return "".join(out)
