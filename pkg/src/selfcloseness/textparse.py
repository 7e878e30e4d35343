"""Tokenizer and expression grammars shared by the spec-file parser and model builders.

Two expression languages are read here:

* bracket expressions for attaching maps, e.g. ``[a,[a,[a,b]]] + 3/2*[b,[a,b]]``;
* graded-commutative polynomials, e.g. ``x^4 - y^2`` or ``2*x*u``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .dgl import Br, Combo, Expr, Name


class ParseError(ValueError):
    """Syntax or declaration error with a source position."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message = message
        self.line = line
        self.col = col
        super().__init__(f"line {line}, column {col}: {message}" if line else message)


@dataclass(frozen=True)
class Token:
    kind: str     # "name", "int", "sym", "end"
    text: str
    line: int
    col: int


_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_']*)|(?P<int>\d+)|(?P<sym>[\[\](){},:+\-*/^=]))")


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    line_starts = [0] + [m.end() for m in re.finditer("\n", text)]

    def where(i: int) -> tuple[int, int]:
        lo = 0
        for k, s in enumerate(line_starts):
            if s <= i:
                lo = k
        return lo + 1, i - line_starts[lo] + 1

    while True:
        # skip whitespace and comments
        while pos < len(text):
            if text[pos].isspace():
                pos += 1
            elif text[pos] == "#":
                while pos < len(text) and text[pos] != "\n":
                    pos += 1
            else:
                break
        if pos >= len(text):
            line, col = where(pos)
            out.append(Token("end", "", line, col))
            return out
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            line, col = where(pos)
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        start = m.start(kind)
        line, col = where(start)
        out.append(Token(kind, m.group(kind), line, col))
        pos = m.end()


class Stream:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    @property
    def peek(self) -> Token:
        return self.tokens[self.i]

    def next(self) -> Token:
        t = self.tokens[self.i]
        if t.kind != "end":
            self.i += 1
        return t

    def at(self, text: str) -> bool:
        return self.peek.text == text and self.peek.kind in ("sym", "name")

    def expect(self, text: str) -> Token:
        t = self.peek
        if t.text != text:
            raise self.error(f"expected {text!r}, found {t.text or 'end of input'!r}")
        return self.next()

    def expect_name(self, what: str = "name") -> Token:
        t = self.peek
        if t.kind != "name":
            raise self.error(f"expected {what}, found {t.text or 'end of input'!r}")
        return self.next()

    def expect_int(self) -> int:
        t = self.peek
        if t.kind != "int":
            raise self.error(f"expected an integer, found {t.text or 'end of input'!r}")
        self.next()
        return int(t.text)

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.peek
        return ParseError(message, tok.line, tok.col)


def _number(s: Stream) -> Fraction:
    num = s.expect_int()
    if s.at("/"):
        s.next()
        den = s.expect_int()
        if den == 0:
            raise s.error("zero denominator")
        return Fraction(num, den)
    return Fraction(num)


# -- bracket expressions ---------------------------------------------------------

def parse_bracket_sum(s: Stream) -> tuple[Expr, list[tuple[str, Token]]]:
    """Parse a sum of bracket terms; also return name uses with their tokens."""
    uses: list[tuple[str, Token]] = []
    e = _bsum(s, uses)
    return e, uses


def _simplify(terms: list[tuple[Fraction, Expr]]) -> Expr:
    if len(terms) == 1 and terms[0][0] == 1:
        return terms[0][1]
    return Combo(tuple(terms))


def _bsum(s: Stream, uses) -> Expr:
    terms: list[tuple[Fraction, Expr]] = []
    sign = Fraction(1)
    if s.at("+") or s.at("-"):
        sign = Fraction(-1 if s.next().text == "-" else 1)
    while True:
        c, e = _bterm(s, uses)
        terms.append((sign * c, e))
        if s.at("+") or s.at("-"):
            sign = Fraction(-1 if s.next().text == "-" else 1)
            continue
        break
    terms = [(c, e) for c, e in terms if not (isinstance(e, Combo) and not e.terms)]
    return _simplify(terms) if terms else Combo(())


def _bterm(s: Stream, uses) -> tuple[Fraction, Expr]:
    if s.peek.kind == "int":
        c = _number(s)
        if s.at("*"):
            s.next()
        elif not (s.at("[") or s.at("(")):
            if c == 0:
                return Fraction(1), Combo(())
            raise s.error("a bracket expression has no constant terms")
        if c == 0:
            _batom(s, uses)
            return Fraction(1), Combo(())
        return c, _batom(s, uses)
    return Fraction(1), _batom(s, uses)


def _batom(s: Stream, uses) -> Expr:
    t = s.peek
    if t.kind == "name":
        s.next()
        uses.append((t.text, t))
        return Name(t.text)
    if s.at("["):
        s.next()
        left = _bsum(s, uses)
        s.expect(",")
        right = _bsum(s, uses)
        s.expect("]")
        return Br(left, right)
    if s.at("("):
        s.next()
        e = _bsum(s, uses)
        s.expect(")")
        return e
    raise s.error(f"expected a name or bracket, found {t.text or 'end of input'!r}")


# -- polynomials -------------------------------------------------------------------

@dataclass(frozen=True)
class PolySum:
    terms: tuple[tuple[Fraction, tuple["Factor", ...]], ...]


@dataclass(frozen=True)
class Power:
    name: str
    exp: int


Factor = Union[Power, PolySum]


def parse_poly(s: Stream) -> tuple[PolySum, list[tuple[str, Token]]]:
    uses: list[tuple[str, Token]] = []
    return _psum(s, uses), uses


def _psum(s: Stream, uses) -> PolySum:
    terms = []
    sign = Fraction(1)
    if s.at("+") or s.at("-"):
        sign = Fraction(-1 if s.next().text == "-" else 1)
    while True:
        c, fs = _pterm(s, uses)
        terms.append((sign * c, fs))
        if s.at("+") or s.at("-"):
            sign = Fraction(-1 if s.next().text == "-" else 1)
            continue
        break
    return PolySum(tuple(terms))


def _pterm(s: Stream, uses) -> tuple[Fraction, tuple[Factor, ...]]:
    c = Fraction(1)
    factors: list[Factor] = []
    if s.peek.kind == "int":
        c = _number(s)
        if not s.at("*"):
            return c, ()
        s.next()
    factors.append(_pfactor(s, uses))
    while s.at("*"):
        s.next()
        factors.append(_pfactor(s, uses))
    return c, tuple(factors)


def _pfactor(s: Stream, uses) -> Factor:
    t = s.peek
    if t.kind == "name":
        s.next()
        uses.append((t.text, t))
        exp = 1
        if s.at("^"):
            s.next()
            exp = s.expect_int()
        return Power(t.text, exp)
    if s.at("("):
        s.next()
        e = _psum(s, uses)
        s.expect(")")
        if s.at("^"):
            s.next()
            n = s.expect_int()
            return PolySum(((Fraction(1), (e,) * n),)) if n else PolySum(((Fraction(1), ()),))
        return e
    raise s.error(f"expected a name or '(', found {t.text or 'end of input'!r}")


def parse_poly_text(text: str) -> tuple[PolySum, list[tuple[str, Token]]]:
    s = Stream(tokenize(text))
    p, uses = parse_poly(s)
    if s.peek.kind != "end":
        raise s.error(f"unexpected {s.peek.text!r}")
    return p, uses


def parse_bracket_text(text: str) -> tuple[Expr, list[tuple[str, Token]]]:
    s = Stream(tokenize(text))
    e, uses = parse_bracket_sum(s)
    if s.peek.kind != "end":
        raise s.error(f"unexpected {s.peek.text!r}")
    return e, uses
