"""Noncommutative polynomials in the letters ``Mx``, ``H``, ``V``.

Grammar (whitespace is ignored)::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor ('*' factor | '/' scalar)*
    factor := scalar | letter ['^' int] | '(' expr ')' ['^' int]
    letter := 'Mx' | 'H' | 'V' | 'I'
    scalar := decimal ['i'] | 'i'

A complex scalar ``a+bi`` is written as a parenthesised sum, for example
``(1+1i)*V`` or ``(-1/2+3i/4)*H``. Division is by scalars only.
Coefficients are kept exactly as Gaussian rationals.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from sympy.polys.domains import QQ, QQ_I

from .errors import WordSyntaxError

LETTERS = ("Mx", "H", "V")
_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)(?P<imag>i?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


def gaussian(value):
    """Convert an int, Fraction, float, complex or decimal string to QQ_I."""
    if isinstance(value, type(QQ_I.one)):
        return value
    if isinstance(value, complex):
        return QQ_I(QQ(Fraction(value.real)), QQ(Fraction(value.imag)))
    if isinstance(value, (str, float)):
        value = Fraction(value)
    return QQ_I(QQ(value), QQ(0))


def to_complex(g):
    return complex(float(g.x), float(g.y))


@dataclass(frozen=True)
class OperatorWord:
    """``terms`` is a tuple of ``(coefficient, letters)``; letters is a tuple."""

    terms: tuple

    @classmethod
    def from_terms(cls, terms):
        acc = {}
        for c, letters in terms:
            letters = tuple(l for l in letters if l != "I")
            acc[letters] = acc.get(letters, QQ_I.zero) + gaussian(c)
        return cls(tuple((c, k) for k, c in sorted(acc.items(), key=_word_key) if c != QQ_I.zero))

    def __add__(self, other):
        return OperatorWord.from_terms(self.terms + other.terms)

    def __neg__(self):
        return OperatorWord(tuple((-c, k) for c, k in self.terms))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, OperatorWord):
            other = OperatorWord.from_terms([(other, ())])
        return OperatorWord.from_terms(
            [(a * b, ka + kb) for a, ka in self.terms for b, kb in other.terms]
        )

    def __pow__(self, k):
        out = OperatorWord.from_terms([(1, ())])
        for _ in range(k):
            out = out * self
        return out

    @property
    def max_length(self):
        return max((len(k) for _, k in self.terms), default=0)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for c, k in self.terms:
            mono = "*".join(k)
            coef = _format_gaussian(c)
            if mono and coef == "1":
                parts.append(mono)
            elif mono and coef == "-1":
                parts.append("-" + mono)
            else:
                parts.append(f"{coef}*{mono}" if mono else coef)
        return " + ".join(parts).replace("+ -", "- ")


def _word_key(item):
    k, _ = item
    return (len(k), k)


def _format_gaussian(c):
    re_, im = Fraction(int(c.x.numerator), int(c.x.denominator)), Fraction(int(c.y.numerator), int(c.y.denominator))
    if im == 0:
        return str(re_)
    if re_ == 0:
        return _imag(im)
    sign = "+" if im > 0 else "-"
    return f"({re_}{sign}{_imag(abs(im))})"


def _imag(q):
    # "3i/4", never "3/4i", which would read as 3 / (4i)
    return f"{q.numerator}i" if q.denominator == 1 else f"{q.numerator}i/{q.denominator}"


def letter(name):
    return OperatorWord.from_terms([(1, (name,))])


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = []
        pos = 0
        stripped = text.rstrip()
        while pos < len(stripped):
            while stripped[pos].isspace():
                pos += 1
            m = _TOKEN.match(stripped, pos)
            if not m or m.end() == pos:
                raise WordSyntaxError(f"unexpected character {stripped[pos]!r}", text, pos)
            start = m.start(m.lastgroup) if m.lastgroup else pos
            if m.group("num") is not None:
                start = m.start("num")
                self.tokens.append(("num", m.group("num") + m.group("imag"), start))
            elif m.group("name") is not None:
                self.tokens.append(("name", m.group("name"), start))
            else:
                self.tokens.append(("op", m.group("op"), start))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else ("end", "", len(self.text))

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.take()
        if val != value:
            found = "end of input" if kind == "end" else repr(val)
            raise WordSyntaxError(f"expected {value!r}, found {found}", self.text, pos)

    def parse(self):
        if not self.tokens:
            raise WordSyntaxError("empty expression", self.text, 0)
        word = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise WordSyntaxError(f"unexpected {val!r}", self.text, pos)
        return word

    def expr(self):
        sign = 1
        if self.peek()[1] in "+-" and self.peek()[0] == "op":
            sign = -1 if self.take()[1] == "-" else 1
        word = self.term() * sign
        while self.peek()[0] == "op" and self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            word = word + rhs if op == "+" else word - rhs
        return word

    def term(self):
        word = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            if self.take()[1] == "*":
                word = word * self.factor()
                continue
            kind, val, pos = self.peek()
            divisor = self.factor()
            if divisor.max_length or not divisor.terms:
                raise WordSyntaxError("can only divide by a nonzero scalar", self.text, pos)
            word = word * OperatorWord.from_terms([(QQ_I.one / divisor.terms[0][0], ())])
        return word

    def factor(self):
        kind, val, pos = self.take()
        if kind == "num":
            if val.endswith("i"):
                return OperatorWord.from_terms([(QQ_I(QQ(0), QQ(Fraction(val[:-1]))), ())])
            return OperatorWord.from_terms([(Fraction(val), ())])
        if kind == "name":
            if val == "i":
                return OperatorWord.from_terms([(QQ_I(0, 1), ())])
            if val not in LETTERS + ("I",):
                raise WordSyntaxError(f"unknown letter {val!r}", self.text, pos)
            return self.power(letter(val))
        if val == "(":
            inner = self.expr()
            self.expect(")")
            return self.power(inner)
        found = "end of input" if kind == "end" else repr(val)
        raise WordSyntaxError(f"expected a scalar, letter or '(', found {found}", self.text, pos)

    def power(self, word):
        if self.peek()[1] != "^" or self.peek()[0] != "op":
            return word
        self.take()
        kind, val, pos = self.take()
        if kind != "num" or not val.isdigit():
            raise WordSyntaxError("exponent must be a non-negative integer", self.text, pos)
        return word ** int(val)


def parse_word(text):
    """Parse ``text`` into an :class:`OperatorWord`.

    >>> str(parse_word("2*H^2 - (1+1i)*V"))
    '(-1-1i)*V + 2*H*H'
    """
    return _Parser(text).parse()
