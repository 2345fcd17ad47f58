"""Exact sparse multivariate polynomials and rational functions over Q.

This is the coefficient layer for the whole package. Every downstream object
stores its numeric content as a Poly or RatFn, so all arithmetic stays exact
and equality of canonical forms is plain dict comparison.

Variables are anonymous indices 0..nvars-1; the generator table upstream owns
the names. Canonical form for RatFn: gcd-reduced, denominator monic under the
graded-lex order, constant denominators folded into the numerator.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as int_gcd, isqrt, lcm as int_lcm

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _grlex(exps: tuple) -> tuple:
    return (sum(exps), exps)


class Poly:
    """Sparse polynomial with Fraction coefficients."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        clean = {}
        if terms:
            for e, c in terms.items():
                c = Fraction(c)
                if c:
                    e = tuple(e)
                    if len(e) != nvars:
                        raise ValueError("exponent tuple length mismatch")
                    clean[e] = c
        self.terms = clean

    @classmethod
    def _raw(cls, nvars: int, terms: dict) -> "Poly":
        # trusted constructor: terms already canonical (no zeros, Fractions)
        p = object.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        return p

    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls._raw(nvars, {})

    @classmethod
    def one(cls, nvars: int) -> "Poly":
        return cls._raw(nvars, {(0,) * nvars: _ONE})

    @classmethod
    def const(cls, nvars: int, c) -> "Poly":
        c = Fraction(c)
        if not c:
            return cls._raw(nvars, {})
        return cls._raw(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, i: int) -> "Poly":
        if not 0 <= i < nvars:
            raise ValueError(f"variable index {i} out of range")
        e = tuple(1 if j == i else 0 for j in range(nvars))
        return cls._raw(nvars, {e: _ONE})

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return all(not any(e) for e in self.terms)

    def is_one(self) -> bool:
        return self.is_const() and self.const_value() == 1

    def const_value(self) -> Fraction:
        if not self.terms:
            return _ZERO
        if not self.is_const():
            raise ValueError("not a constant polynomial")
        return next(iter(self.terms.values()))

    def variables(self) -> set:
        used = set()
        for e in self.terms:
            for i, d in enumerate(e):
                if d:
                    used.add(i)
        return used

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, i: int) -> int:
        return max((e[i] for e in self.terms), default=-1)

    def coeff_of(self, i: int, d: int) -> "Poly":
        """Coefficient of x_i^d, as a polynomial with x_i removed (exponent 0)."""
        out = {}
        for e, c in self.terms.items():
            if e[i] == d:
                out[e[:i] + (0,) + e[i + 1:]] = c
        return Poly._raw(self.nvars, out)

    def leading(self) -> tuple:
        """(exps, coeff) of the graded-lex leading term."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=_grlex)
        return e, self.terms[e]

    def monic(self) -> "Poly":
        if not self.terms:
            return self
        _, c = self.leading()
        if c == 1:
            return self
        return self.scale(1 / c)

    def scale(self, c) -> "Poly":
        c = Fraction(c)
        if not c:
            return Poly._raw(self.nvars, {})
        return Poly._raw(self.nvars, {e: k * c for e, k in self.terms.items()})

    def mul_term(self, exps: tuple, c) -> "Poly":
        """Multiply by the monomial c * x^exps."""
        c = Fraction(c)
        if not c:
            return Poly._raw(self.nvars, {})
        out = {}
        for e, k in self.terms.items():
            out[tuple(a + b for a, b in zip(e, exps))] = k * c
        return Poly._raw(self.nvars, out)

    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError("nvars mismatch")
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.const(self.nvars, other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, _ZERO) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Poly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, _ZERO) + c1 * c2
                if s:
                    out[e] = s
                else:
                    del out[e]
        return Poly._raw(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("Poly power wants a nonnegative integer")
        result = Poly.one(self.nvars)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def deriv(self, i: int) -> "Poly":
        out = {}
        for e, c in self.terms.items():
            d = e[i]
            if d:
                e2 = e[:i] + (d - 1,) + e[i + 1:]
                s = out.get(e2, _ZERO) + c * d
                if s:
                    out[e2] = s
                else:
                    del out[e2]
        return Poly._raw(self.nvars, out)

    def divexact(self, other: "Poly"):
        """Exact quotient self/other, or None when the division is not exact."""
        if not isinstance(other, Poly) or other.nvars != self.nvars:
            raise ValueError("divexact wants a Poly over the same variables")
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if self.is_zero():
            return Poly.zero(self.nvars)
        le, lc = other.leading()
        quo = {}
        rem = dict(self.terms)
        while rem:
            re = max(rem, key=_grlex)
            diff = tuple(a - b for a, b in zip(re, le))
            if any(d < 0 for d in diff):
                return None
            qc = rem[re] / lc
            quo[diff] = qc
            for oe, oc in other.terms.items():
                ne = tuple(a + b for a, b in zip(diff, oe))
                s = rem.get(ne, _ZERO) - qc * oc
                if s:
                    rem[ne] = s
                else:
                    rem.pop(ne, None)
        return Poly._raw(self.nvars, quo)

    def substitute(self, mapping: dict, nvars_out: int = None) -> "RatFn":
        """Evaluate with variables replaced by RatFn images.

        mapping: var index -> RatFn over the output ring. Unmapped variables
        stay themselves, which requires the output ring to be the same one.
        """
        n = self.nvars if nvars_out is None else nvars_out
        if not self.terms:
            return RatFn.zero(n)
        cache = {}

        def power(i: int, e: int) -> "RatFn":
            got = cache.get((i, e))
            if got is None:
                if i in mapping:
                    base = mapping[i]
                elif n == self.nvars:
                    base = RatFn.var(n, i)
                else:
                    raise ValueError(f"no image for variable {i}")
                if base.nvars != n:
                    raise ValueError("substitution image over wrong ring")
                got = base ** e
                cache[(i, e)] = got
            return got

        total = RatFn.zero(n)
        for exps, c in self.terms.items():
            term = RatFn.const(n, c)
            for i, e in enumerate(exps):
                if e:
                    term = term * power(i, e)
            total = total + term
        return total

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(self.nvars, other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "Poly(0)"
        bits = []
        for e in sorted(self.terms, key=_grlex, reverse=True):
            c = self.terms[e]
            mono = "*".join(
                f"x{i}" if d == 1 else f"x{i}^{d}"
                for i, d in enumerate(e) if d
            )
            if mono:
                bits.append(f"{c}*{mono}" if c != 1 else mono)
            else:
                bits.append(str(c))
        return "Poly(" + " + ".join(bits) + ")"


def _int_primitive(p: Poly) -> Poly:
    """Rescale so coefficients are coprime integers with positive leading one.

    This is the coefficient-growth control for the PRS: over Q alone every
    scalar is a unit and pseudo-remainders blow up exponentially.
    """
    if p.is_zero():
        return p
    num = 0
    den = 1
    for c in p.terms.values():
        num = int_gcd(num, c.numerator)
        den = int_lcm(den, c.denominator)
    q = p.scale(Fraction(den, num))
    _, lc = q.leading()
    return q.scale(-1) if lc < 0 else q


def _prem(f: Poly, g: Poly, k: int) -> Poly:
    """Sloppy pseudo-remainder of f by g with respect to variable k."""
    n = g.degree_in(k)
    lcg = g.coeff_of(k, n)
    r = f
    while not r.is_zero():
        m = r.degree_in(k)
        if m < n:
            break
        lcr = r.coeff_of(k, m)
        shift = tuple((m - n) if j == k else 0 for j in range(f.nvars))
        r = lcg * r - lcr.mul_term(shift, 1) * g
    return r


def _content_in(p: Poly, k: int) -> Poly:
    g = None
    for d in range(p.degree_in(k), -1, -1):
        c = p.coeff_of(k, d)
        if c.is_zero():
            continue
        g = c.monic() if g is None else poly_gcd(g, c)
        if g.is_one():
            break
    return g if g is not None else Poly.zero(p.nvars)


def _primitive_in(p: Poly, k: int) -> Poly:
    cont = _content_in(p, k)
    q = p.divexact(cont)
    assert q is not None
    return _int_primitive(q)


def _monomial_gcd(a: Poly, b: Poly) -> Poly:
    exps = None
    for p in (a, b):
        for e in p.terms:
            exps = e if exps is None else tuple(map(min, exps, e))
    return Poly._raw(a.nvars, {exps: _ONE})


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """gcd over Q[x...], normalized monic under graded-lex."""
    if a.nvars != b.nvars:
        raise ValueError("nvars mismatch")
    if a.is_zero():
        return b.monic() if not b.is_zero() else Poly.zero(a.nvars)
    if b.is_zero():
        return a.monic()
    if a.is_const() or b.is_const():
        return Poly.one(a.nvars)
    if len(a.terms) == 1 or len(b.terms) == 1:
        return _monomial_gcd(a, b)
    if a.terms == b.terms:
        return a.monic()
    k = max(a.variables() | b.variables())
    da, db = a.degree_in(k), b.degree_in(k)
    if da == 0:
        return poly_gcd(a, _content_in(b, k))
    if db == 0:
        return poly_gcd(_content_in(a, k), b)
    cont = poly_gcd(_content_in(a, k), _content_in(b, k))
    f, g = _primitive_in(a, k), _primitive_in(b, k)
    if da < db:
        f, g = g, f
    while not g.is_zero():
        r = _prem(f, g, k)
        f, g = g, (r if r.is_zero() else _primitive_in(r, k))
    return (cont * _primitive_in(f, k)).monic()


def fraction_sqrt(q: Fraction):
    """Exact square root of a Fraction, or None."""
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def poly_sqrt(p: Poly):
    """Exact polynomial square root with positive leading coefficient, or None."""
    if p.is_zero():
        return p
    if p.is_const():
        r = fraction_sqrt(p.const_value())
        return None if r is None else Poly.const(p.nvars, r)
    k = max(p.variables())
    m = p.degree_in(k)
    if m % 2:
        return None
    h = m // 2
    top = poly_sqrt(p.coeff_of(k, m))
    if top is None:
        return None
    two_top = top.scale(2)
    coeffs = {h: top}
    for j in range(h - 1, -1, -1):
        acc = p.coeff_of(k, h + j)
        for a in range(j + 1, h):
            acc = acc - coeffs[a] * coeffs[h + j - a]
        q = acc.divexact(two_top)
        if q is None:
            return None
        coeffs[j] = q
    root = Poly.zero(p.nvars)
    for j, cj in coeffs.items():
        if not cj.is_zero():
            shift = tuple(j if i == k else 0 for i in range(p.nvars))
            root = root + cj.mul_term(shift, 1)
    return root if root * root == p else None


def _cross_reduce(a: Poly, b: Poly) -> tuple:
    g = poly_gcd(a, b)
    if g.is_one():
        return a, b
    return a.divexact(g), b.divexact(g)


class RatFn:
    """Rational function num/den in canonical reduced form."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly = None):
        if den is None:
            den = Poly.one(num.nvars)
        if num.nvars != den.nvars:
            raise ValueError("nvars mismatch")
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            self.num = num
            self.den = Poly.one(num.nvars)
            return
        if den.is_const():
            c = den.const_value()
            self.num = num if c == 1 else num.scale(1 / c)
            self.den = Poly.one(num.nvars)
            return
        g = poly_gcd(num, den)
        if not g.is_one():
            num = num.divexact(g)
            den = den.divexact(g)
        if den.is_const():
            c = den.const_value()
            self.num = num if c == 1 else num.scale(1 / c)
            self.den = Poly.one(num.nvars)
            return
        _, lc = den.leading()
        if lc != 1:
            num = num.scale(1 / lc)
            den = den.scale(1 / lc)
        self.num = num
        self.den = den

    @classmethod
    def _build(cls, num: Poly, den: Poly) -> "RatFn":
        """Construct from a pair already known to be gcd-reduced."""
        out = object.__new__(cls)
        if num.is_zero():
            out.num = num
            out.den = Poly.one(num.nvars)
            return out
        if den.is_const():
            c = den.const_value()
            out.num = num if c == 1 else num.scale(1 / c)
            out.den = Poly.one(num.nvars)
            return out
        _, lc = den.leading()
        if lc != 1:
            num = num.scale(1 / lc)
            den = den.scale(1 / lc)
        out.num = num
        out.den = den
        return out

    @property
    def nvars(self) -> int:
        return self.num.nvars

    @classmethod
    def zero(cls, nvars: int) -> "RatFn":
        return cls(Poly.zero(nvars))

    @classmethod
    def one(cls, nvars: int) -> "RatFn":
        return cls(Poly.one(nvars))

    @classmethod
    def const(cls, nvars: int, c) -> "RatFn":
        return cls(Poly.const(nvars, c))

    @classmethod
    def var(cls, nvars: int, i: int) -> "RatFn":
        return cls(Poly.var(nvars, i))

    @classmethod
    def from_poly(cls, p: Poly) -> "RatFn":
        return cls(p)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_poly(self) -> bool:
        return self.den.is_one()

    def is_const(self) -> bool:
        return self.num.is_const() and self.den.is_one()

    def is_one(self) -> bool:
        return self.den.is_one() and self.num.is_one()

    def const_value(self) -> Fraction:
        if not self.is_const():
            raise ValueError("not a constant")
        return self.num.const_value()

    def _coerce(self, other):
        if isinstance(other, RatFn):
            if other.nvars != self.nvars:
                raise ValueError("nvars mismatch")
            return other
        if isinstance(other, (int, Fraction)):
            return RatFn.const(self.nvars, other)
        if isinstance(other, Poly):
            return RatFn(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.den.is_one() and other.den.is_one():
            return RatFn._build(self.num + other.num, self.den)
        # reduce over the lcm of the denominators to keep the gcd small
        g = poly_gcd(self.den, other.den)
        if g.is_one():
            return RatFn(self.num * other.den + other.num * self.den,
                         self.den * other.den)
        b1 = self.den.divexact(g)
        d1 = other.den.divexact(g)
        return RatFn(self.num * d1 + other.num * b1, b1 * other.den)

    __radd__ = __add__

    def __neg__(self):
        out = object.__new__(RatFn)
        out.num = -self.num
        out.den = self.den
        return out

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.den.is_one() and other.den.is_one():
            return RatFn._build(self.num * other.num, self.den)
        # cross-cancel so the product pair is coprime by construction
        n1, d2 = _cross_reduce(self.num, other.den)
        n2, d1 = _cross_reduce(other.num, self.den)
        return RatFn._build(n1 * n2, d1 * d2)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        n1, n2 = _cross_reduce(self.num, other.num)
        d1, d2 = _cross_reduce(self.den, other.den)
        return RatFn._build(n1 * d2, d1 * n2)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other / self

    def inverse(self) -> "RatFn":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return RatFn._build(self.den, self.num)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise ValueError("RatFn power wants an integer")
        if n < 0:
            return self.inverse() ** (-n)
        if n == 1:
            return self
        return RatFn._build(self.num ** n, self.den ** n)

    def deriv(self, i: int) -> "RatFn":
        if self.den.is_one():
            return RatFn(self.num.deriv(i))
        return RatFn(self.num.deriv(i) * self.den - self.num * self.den.deriv(i),
                     self.den * self.den)

    def substitute(self, mapping: dict, nvars_out: int = None) -> "RatFn":
        num = self.num.substitute(mapping, nvars_out)
        if self.den.is_one():
            return num
        den = self.den.substitute(mapping, nvars_out)
        if den.is_zero():
            raise ZeroDivisionError("denominator vanishes under substitution")
        return num / den

    def sqrt(self):
        """Exact square root as a RatFn, or None."""
        rn = poly_sqrt(self.num)
        if rn is None:
            return None
        rd = poly_sqrt(self.den)
        if rd is None:
            return None
        return RatFn(rn, rd)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Poly)):
            other = self._coerce(other)
        if not isinstance(other, RatFn):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        if self.den.is_one():
            return f"RatFn({self.num!r})"
        return f"RatFn({self.num!r} / {self.den!r})"
