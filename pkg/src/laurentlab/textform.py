"""Canonical text form for Laurent polynomials, and the expression parser.

Printing rules (the canonical form; parse/print round-trips are bit-exact):

- terms appear in increasing canonical order, joined with `` + `` / `` - ``
  (the minus join is used when the term's integer coefficient is negative);
- a monomial prints its variables in increasing order, ``^e`` only for
  ``e != 1`` (negative exponents as ``^-2``);
- plain integer coefficients print bare (``2*f[0]``, ``-f[0]``, ``3``);
  coefficients involving parameters print parenthesized and are glued with
  ``*``: ``(2*a)*f[0,1]^-1*f[2,0]^3 + 1``;
- inside a coefficient the parameter terms also appear in increasing order.

The parser accepts a superset: arbitrary whitespace, parenthesized
subexpressions, unary minus, integer literals, parameter names, ``Y<k>``
placeholder variables, ``f[c1,...,ck]`` point variables, ``*``, ``/``, and
``^`` with integer (possibly negative) exponents.  Division is exact
division by a single-term divisor (signed monomials, integer constants, or
scalar multiples of monomials); dividing by a sum is a syntax-level error,
which is what keeps all parsed right-hand sides inside the Laurent ring.
"""

from __future__ import annotations

import functools
import re

from .poly import (
    Coeff,
    LaurentPoly,
    Monomial,
    VarId,
    _coeff_exact_div,
    _pm_cmp,
    mono_cmp,
    mono_inv,
    mono_mul,
)


# ---------------------------------------------------------------------------
# Printing


def format_coeff(c: Coeff, standalone: bool = False) -> str:
    """Render a coefficient polynomial (no enclosing parentheses; term
    position adds them when parameters are present)."""
    if c.is_zero():
        return "0"
    parts = []
    for pm, n in sorted(c.terms.items(), key=lambda it: _PMK(it[0])):
        if not pm:
            s = str(n)
        else:
            body = "*".join(name if e == 1 else "%s^%d" % (name, e) for name, e in pm)
            if n == 1:
                s = body
            elif n == -1:
                s = "-" + body
            else:
                s = "%d*%s" % (n, body)
        parts.append(s)
    out = parts[0]
    for s in parts[1:]:
        out += (" - " + s[1:]) if s.startswith("-") else (" + " + s)
    return out


class _PMK:
    __slots__ = ("pm",)

    def __init__(self, pm):
        self.pm = pm

    def __lt__(self, other):
        return _pm_cmp(self.pm, other.pm) < 0


def format_monomial(m: Monomial) -> str:
    return "*".join(v.text if e == 1 else "%s^%d" % (v.text, e) for v, e in m)


def _format_term(m: Monomial, c: Coeff) -> str:
    """One rendered term; may start with '-' only for integer coefficients."""
    if not m:
        if c.is_int():
            return str(c.as_int())
        return "(" + format_coeff(c, standalone=True) + ")"
    ms = format_monomial(m)
    if c.is_int():
        n = c.as_int()
        if n == 1:
            return ms
        if n == -1:
            return "-" + ms
        return "%d*%s" % (n, ms)
    return "(" + format_coeff(c, standalone=True) + ")*" + ms


def format_poly(p: LaurentPoly) -> str:
    if p.is_zero():
        return "0"
    terms = sorted(p.terms.items(), key=functools.cmp_to_key(lambda a, b: mono_cmp(a[0], b[0])))
    parts = [_format_term(m, c) for m, c in terms]
    out = parts[0]
    for s in parts[1:]:
        out += (" - " + s[1:]) if s.startswith("-") else (" + " + s)
    return out


# ---------------------------------------------------------------------------
# Parsing


class ParseError(ValueError):
    """Syntax or semantic error in an expression, with source position."""

    def __init__(self, message: str, pos: int):
        self.pos = pos
        super().__init__("%s (at position %d)" % (message, pos))


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[\^*/+\-()\[\],=]))"
)

_PLACEHOLDER_RE = re.compile(r"^Y(\d+)$")


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.tokens = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None:
                if text[pos:].strip() == "":
                    break
                raise ParseError("unexpected character %r" % text[pos:].strip()[0], pos)
            if m.group("int") is not None:
                self.tokens.append(("int", int(m.group("int")), m.start(1)))
            elif m.group("name") is not None:
                self.tokens.append(("name", m.group("name"), m.start(2)))
            else:
                self.tokens.append(("op", m.group("op"), m.start(3)))
            pos = m.end()
        self.tokens.append(("eof", None, len(text)))
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        t = self.tokens[self.i]
        self.i += 1
        return t


class ExprParser:
    """Recursive-descent parser producing :class:`LaurentPoly` values.

    ``on_ref`` maps a coordinate tuple (from ``f[...]``) to a VarId; the
    default binds point variables directly.  Parameter names seen are
    collected into ``params_seen``.
    """

    def __init__(self, text: str, on_ref=None):
        self.toks = _Tokens(text)
        self.on_ref = on_ref or (lambda coords, pos: VarId.point(coords))
        self.params_seen: set = set()

    def parse(self) -> LaurentPoly:
        p = self.parse_expr()
        kind, val, pos = self.toks.peek()
        if kind != "eof":
            raise ParseError("unexpected trailing input %r" % (val,), pos)
        return p

    def parse_expr(self) -> LaurentPoly:
        p = self.parse_term()
        while True:
            kind, val, _ = self.toks.peek()
            if kind == "op" and val in "+-":
                self.toks.next()
                q = self.parse_term()
                p = p + q if val == "+" else p - q
            else:
                return p

    def parse_term(self) -> LaurentPoly:
        p = self.parse_unary()
        while True:
            kind, val, pos = self.toks.peek()
            if kind == "op" and val == "*":
                self.toks.next()
                p = p * self.parse_unary()
            elif kind == "op" and val == "/":
                self.toks.next()
                q = self.parse_unary()
                p = self._divide(p, q, pos)
            else:
                return p

    def _divide(self, p: LaurentPoly, q: LaurentPoly, pos: int) -> LaurentPoly:
        if q.is_zero():
            raise ParseError("division by zero", pos)
        if not q.is_monomial():
            raise ParseError("division is only allowed by single-term divisors", pos)
        ((m, c),) = q.terms.items()
        inv = mono_inv(m)
        out = {}
        for mm, cc in p.terms.items():
            d = _coeff_exact_div(cc, c)
            if d is None:
                raise ParseError("inexact coefficient division", pos)
            out[mono_mul(mm, inv)] = d
        return LaurentPoly(out)

    def parse_unary(self) -> LaurentPoly:
        kind, val, _ = self.toks.peek()
        if kind == "op" and val == "-":
            self.toks.next()
            return -self.parse_unary()
        return self.parse_power()

    def parse_power(self) -> LaurentPoly:
        base = self.parse_atom()
        kind, val, pos = self.toks.peek()
        if kind == "op" and val == "^":
            self.toks.next()
            e = self._parse_int_exponent()
            if e >= 0:
                return base ** e
            if not base.is_unit():
                raise ParseError("negative exponent on a non-monomial", pos)
            return base.invert() ** (-e)
        return base

    def _parse_int_exponent(self) -> int:
        kind, val, pos = self.toks.next()
        sign = 1
        if kind == "op" and val == "-":
            sign = -1
            kind, val, pos = self.toks.next()
        if kind != "int":
            raise ParseError("expected an integer exponent", pos)
        return sign * val

    def parse_atom(self) -> LaurentPoly:
        kind, val, pos = self.toks.next()
        if kind == "int":
            return LaurentPoly.const(val)
        if kind == "name":
            if val == "f":
                k2, v2, p2 = self.toks.peek()
                if k2 == "op" and v2 == "[":
                    coords = self._parse_coords()
                    return LaurentPoly.var(self.on_ref(coords, pos))
                raise ParseError("the variable symbol f needs [coords]", pos)
            m = _PLACEHOLDER_RE.match(val)
            if m:
                return LaurentPoly.var(VarId.placeholder(int(m.group(1))))
            self.params_seen.add(val)
            return LaurentPoly.param(val)
        if kind == "op" and val == "(":
            p = self.parse_expr()
            k2, v2, p2 = self.toks.next()
            if not (k2 == "op" and v2 == ")"):
                raise ParseError("expected ')'", p2)
            return p
        raise ParseError("unexpected token %r" % (val,), pos)

    def _parse_coords(self) -> tuple:
        k, v, pos = self.toks.next()
        if not (k == "op" and v == "["):
            raise ParseError("expected '['", pos)
        coords = []
        while True:
            k, v, pos = self.toks.next()
            sign = 1
            if k == "op" and v == "-":
                sign = -1
                k, v, pos = self.toks.next()
            if k != "int":
                raise ParseError("expected an integer coordinate", pos)
            coords.append(sign * v)
            k, v, pos = self.toks.next()
            if k == "op" and v == "]":
                return tuple(coords)
            if not (k == "op" and v == ","):
                raise ParseError("expected ',' or ']'", pos)


def parse_poly(text: str, on_ref=None) -> LaurentPoly:
    return ExprParser(text, on_ref=on_ref).parse()
