"""Expression grammar: parsing and canonical printing.

The accepted grammar is

    expr   := ['-'] term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := atom ('^' natural)?
    atom   := natural | name | '(' expr ')' | 'exp' '(' expr ')'

over the generators and parameters of a declared chart.  Division
requires an invertible even divisor; exp() an even argument.  The
printer emits one canonical spelling per value — ascending odd indices,
polynomial monomials in graded-lexicographic order, explicit '*' — and
parsing a printed value reproduces it exactly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import NotExpressible, ParseError
from .superalg import DressedFunction, GeneratorTable, SuperFunction


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Sym:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: object
    right: object


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int


@dataclass(frozen=True)
class Exp:
    arg: object


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|([-+*/^()]))")


def tokenize(text: str):
    """Token stream of (kind, value, position); kind in num/name/op."""
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            raise ParseError(f"unexpected character {stripped[0]!r}",
                             len(text) - len(stripped))
        if m.group(1) is not None:
            out.append(("num", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            out.append(("name", m.group(2), m.start(2)))
        else:
            out.append(("op", m.group(3), m.start(3)))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self):
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of expression", len(self.text))
        self.i += 1
        return tok

    def expect_op(self, op):
        tok = self.take()
        if tok[0] != "op" or tok[1] != op:
            raise ParseError(f"expected {op!r}", tok[2])

    def expr(self):
        tok = self.peek()
        if tok is not None and tok[:2] == ("op", "-"):
            self.take()
            node = Neg(self.term())
        else:
            node = self.term()
        while True:
            tok = self.peek()
            if tok is None or tok[0] != "op" or tok[1] not in "+-":
                return node
            self.take()
            node = BinOp(tok[1], node, self.term())

    def term(self):
        node = self.factor()
        while True:
            tok = self.peek()
            if tok is None or tok[0] != "op" or tok[1] not in "*/":
                return node
            self.take()
            node = BinOp(tok[1], node, self.factor())

    def factor(self):
        node = self.atom()
        tok = self.peek()
        if tok is not None and tok[:2] == ("op", "^"):
            self.take()
            etok = self.take()
            if etok[0] != "num":
                raise ParseError("exponent must be a natural number", etok[2])
            node = Pow(node, int(etok[1]))
        return node

    def atom(self):
        tok = self.take()
        kind, value, pos = tok
        if kind == "num":
            return Num(int(value))
        if kind == "name":
            if value == "exp":
                self.expect_op("(")
                inner = self.expr()
                self.expect_op(")")
                return Exp(inner)
            return Sym(value)
        if value == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner
        raise ParseError(f"unexpected {value!r}", pos)


def parse(text: str):
    """Text to syntax tree; errors carry the offending position."""
    p = _Parser(text)
    node = p.expr()
    tok = p.peek()
    if tok is not None:
        raise ParseError(f"trailing input {tok[1]!r}", tok[2])
    return node


def evaluate(node, table: GeneratorTable):
    """Syntax tree to a superfunction or dressed function on the chart."""
    if isinstance(node, Num):
        return SuperFunction.const(table, Fraction(node.value))
    if isinstance(node, Sym):
        return SuperFunction.generator(table, node.name)
    if isinstance(node, Neg):
        return -evaluate(node.arg, table)
    if isinstance(node, Exp):
        arg = evaluate(node.arg, table)
        if isinstance(arg, DressedFunction):
            raise NotExpressible("nested exp() is not a polynomial exponent")
        return DressedFunction(SuperFunction.one(table), arg)
    if isinstance(node, Pow):
        base = evaluate(node.base, table)
        out = SuperFunction.one(table)
        for _ in range(node.exponent):
            out = out * base
        return out
    if isinstance(node, BinOp):
        left = evaluate(node.left, table)
        right = evaluate(node.right, table)
        if node.op in "+-":
            if isinstance(left, DressedFunction) != isinstance(
                    right, DressedFunction):
                left = left if isinstance(left, DressedFunction) else (
                    DressedFunction(left))
                right = right if isinstance(right, DressedFunction) else (
                    DressedFunction(right))
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        if isinstance(right, DressedFunction):
            raise NotExpressible("cannot divide by a dressed function")
        return left * right.invert()
    raise TypeError(f"not a syntax node: {node!r}")


def parse_expr(text: str, table: GeneratorTable):
    return evaluate(parse(text), table)


def _frac_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else (
        f"{c.numerator}/{c.denominator}")


def _monomial_factors(table, exps):
    return [table.even_name(s) + (f"^{e}" if e > 1 else "")
            for s, e in enumerate(exps) if e]


def _poly_pieces(poly, table):
    """Each monomial as (sign, body) in graded-lexicographic order."""
    pieces = []
    for exps in sorted(poly.terms, key=lambda e: (sum(e), e)):
        c = poly.terms[exps]
        sign = "-" if c < 0 else "+"
        factors = _monomial_factors(table, exps)
        if not factors:
            body = _frac_str(abs(c))
        elif abs(c) == 1:
            body = "*".join(factors)
        else:
            body = "*".join([_frac_str(abs(c))] + factors)
        pieces.append((sign, body))
    return pieces


def _join_pieces(pieces):
    sign, body = pieces[0]
    out = body if sign == "+" else "-" + body
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


def print_poly(poly, table) -> str:
    if not poly.terms:
        return "0"
    return _join_pieces(_poly_pieces(poly, table))


def _is_single_factor(poly) -> bool:
    """Printable as one grammar factor (a bare name power or number)."""
    if len(poly.terms) != 1:
        return False
    (exps, c), = poly.terms.items()
    support = [e for e in exps if e]
    if not support:
        return c.denominator == 1 and c >= 0
    return c == 1 and len(support) == 1


def print_ratfn(rf, table) -> str:
    num = print_poly(rf.num, table)
    if rf.den.is_const():
        return num
    den = print_poly(rf.den, table)
    if len(rf.num.terms) > 1:
        num = f"({num})"
    if not _is_single_factor(rf.den):
        den = f"({den})"
    return f"{num}/{den}"


def _coeff_pieces(rf, table):
    """A coefficient as (sign, body) pieces that can prefix odd factors."""
    if rf.den.is_const():
        pieces = _poly_pieces(rf.num, table)
        if len(pieces) == 1:
            return [pieces[0]]
        return [("+", f"({_join_pieces(pieces)})")]
    text = print_ratfn(rf, table)
    if text.startswith("-"):
        return [("-", text[1:])]
    return [("+", text)]


def print_superfunction(f: SuperFunction) -> str:
    t = f.table
    if f.is_zero():
        return "0"
    pieces = []
    for word in sorted(f.terms, key=lambda w: (len(w), w)):
        coeff = f.terms[word]
        odd = "*".join(t.odd_name(i) for i in word)
        (sign, body), = _coeff_pieces(coeff, t)
        if odd:
            body = odd if body == "1" else f"{body}*{odd}"
        pieces.append((sign, body))
    return _join_pieces(pieces)


def _has_toplevel_sum(text: str) -> bool:
    depth = 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif depth == 0 and i and ch in "+-":
            return True
    return False


def print_dressed(f: DressedFunction) -> str:
    t = f.table
    expo = f.exponent
    if expo.is_zero():
        return print_superfunction(f.base)
    tail = f"exp({print_ratfn(expo, t)})"
    if f.base == SuperFunction.one(t):
        return tail
    base = print_superfunction(f.base)
    if _has_toplevel_sum(base):
        base = f"({base})"
    return f"{base}*{tail}"


def print_value(v) -> str:
    """Canonical text for any printable result."""
    if isinstance(v, DressedFunction):
        return print_dressed(v)
    if isinstance(v, SuperFunction):
        return print_superfunction(v)
    if isinstance(v, Fraction):
        return _frac_str(v)
    raise TypeError(f"cannot print {type(v).__name__}")


def print_integral(value, table) -> str:
    """Moment integral as a coefficient times G(a) factors.

    G(a) stands for sqrt(2*pi/a); the coefficient is a rational
    function of the parameter slots of the chart.
    """
    if value.is_zero():
        return "0"
    gs = "*".join(f"G({_frac_str(a)})" for a in value.scales)
    coeff = print_ratfn(value.coefficient, table)
    if not gs:
        return coeff
    if coeff == "1":
        return gs
    if coeff == "-1":
        return "-" + gs
    if _has_toplevel_sum(coeff):
        coeff = f"({coeff})"
    return f"{coeff}*{gs}"
