"""Grassmann algebra over rational-function coefficients.

A chart is a table of generator pairs (position, momentum), exactly one
member of each pair odd, plus even parameters. Even generators and
parameters index the variables of the coefficient ring; odd generators are
tracked as strictly increasing tuples of pair indices.

A SuperFunction is sum_w c_w(x) * theta_w with the coefficient on the left.
A DressedFunction is base * e^exponent with the exponent normalized to its
body (the nilpotent part of any supplied exponent is expanded exactly into
the base), so equality and grouping are plain comparisons.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import NotExpressible, ParityMismatch, TableMismatch, UnknownGenerator
from .rational import RatFn

EVEN = 0
ODD = 1

_NAME_OK = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class GenPair:
    position: str
    momentum: str
    momentum_odd: bool = True


@dataclass(frozen=True)
class GeneratorTable:
    pairs: tuple
    params: tuple = ()
    _kind: dict = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(self.pairs))
        object.__setattr__(self, "params", tuple(self.params))
        kind = {}
        seen = set()
        for i, pair in enumerate(self.pairs):
            for name, role in ((pair.position, "pos"), (pair.momentum, "mom")):
                if not _NAME_OK.match(name):
                    raise ValueError(f"bad generator name {name!r}")
                if name in seen:
                    raise ValueError(f"duplicate name {name!r}")
                seen.add(name)
                kind[name] = (role, i)
        for j, name in enumerate(self.params):
            if not _NAME_OK.match(name):
                raise ValueError(f"bad parameter name {name!r}")
            if name in seen:
                raise ValueError(f"duplicate name {name!r}")
            seen.add(name)
            kind[name] = ("param", j)
        object.__setattr__(self, "_kind", kind)

    @property
    def n(self) -> int:
        return len(self.pairs)

    @property
    def nvars(self) -> int:
        return len(self.pairs) + len(self.params)

    def has_name(self, name: str) -> bool:
        return name in self._kind

    def kind_of(self, name: str):
        try:
            return self._kind[name]
        except KeyError:
            raise UnknownGenerator(name) from None

    def parity_of(self, name: str) -> int:
        role, i = self.kind_of(name)
        if role == "param":
            return EVEN
        mo = self.pairs[i].momentum_odd
        if role == "mom":
            return ODD if mo else EVEN
        return EVEN if mo else ODD

    def even_slot(self, name: str) -> int:
        """Coefficient-ring variable index of an even generator or parameter."""
        role, i = self.kind_of(name)
        if role == "param":
            return self.n + i
        if self.parity_of(name) == ODD:
            raise ParityMismatch(f"{name} is odd, not a coefficient variable")
        return i

    def odd_index(self, name: str) -> int:
        """Pair index of an odd generator."""
        role, i = self.kind_of(name)
        if role == "param" or self.parity_of(name) == EVEN:
            raise ParityMismatch(f"{name} is not an odd generator")
        return i

    def odd_name(self, i: int) -> str:
        pair = self.pairs[i]
        return pair.momentum if pair.momentum_odd else pair.position

    def even_name(self, i: int) -> str:
        if i >= self.n:
            return self.params[i - self.n]
        pair = self.pairs[i]
        return pair.position if pair.momentum_odd else pair.momentum

    def position(self, i: int) -> str:
        return self.pairs[i].position

    def momentum(self, i: int) -> str:
        return self.pairs[i].momentum

    def position_parity(self, i: int) -> int:
        return EVEN if self.pairs[i].momentum_odd else ODD

    def generator_names(self):
        for pair in self.pairs:
            yield pair.position
            yield pair.momentum

    def all_names(self):
        yield from self.generator_names()
        yield from self.params


def standard_table(n: int, params=()) -> GeneratorTable:
    pairs = tuple(GenPair(f"q{i+1}", f"p{i+1}", True) for i in range(n))
    return GeneratorTable(pairs, tuple(params))


def pattern_table(pattern: str, params=()) -> GeneratorTable:
    """One pair per letter: 'o' makes the momentum x_i odd, 'e' makes it even."""
    pairs = []
    for i, ch in enumerate(pattern):
        if ch not in ("o", "e"):
            raise ValueError(f"pattern letter {ch!r} (want 'o' or 'e')")
        pairs.append(GenPair(f"y{i+1}", f"x{i+1}", ch == "o"))
    return GeneratorTable(tuple(pairs), tuple(params))


def _merge_words(w1, w2):
    """Sorted merge of strictly increasing index words with the Koszul sign."""
    if not w1:
        return 1, w2
    if not w2:
        return 1, w1
    i = j = 0
    n1, n2 = len(w1), len(w2)
    sign = 1
    out = []
    while i < n1 and j < n2:
        a, b = w1[i], w2[j]
        if a == b:
            return 0, ()
        if a < b:
            out.append(a)
            i += 1
        else:
            out.append(b)
            j += 1
            if (n1 - i) & 1:
                sign = -sign
    out.extend(w1[i:])
    out.extend(w2[j:])
    return sign, tuple(out)


class SuperFunction:
    __slots__ = ("table", "terms")

    def __init__(self, table: GeneratorTable, terms=None):
        self.table = table
        clean = {}
        if terms:
            for w, c in terms.items():
                if isinstance(c, (int, Fraction)):
                    c = RatFn.const(table.nvars, c)
                if not c.is_zero():
                    w = tuple(w)
                    if any(a >= b for a, b in zip(w, w[1:])):
                        raise ValueError("odd word must be strictly increasing")
                    if w and (w[0] < 0 or w[-1] >= table.n):
                        raise ValueError("odd index out of range")
                    clean[w] = c
        self.terms = clean

    @classmethod
    def _raw(cls, table, terms):
        f = object.__new__(cls)
        f.table = table
        f.terms = terms
        return f

    @classmethod
    def _make(cls, table, dirty):
        return cls._raw(table, {w: c for w, c in dirty.items() if not c.is_zero()})

    @classmethod
    def zero(cls, table) -> "SuperFunction":
        return cls._raw(table, {})

    @classmethod
    def one(cls, table) -> "SuperFunction":
        return cls._raw(table, {(): RatFn.one(table.nvars)})

    @classmethod
    def const(cls, table, c) -> "SuperFunction":
        c = Fraction(c)
        if not c:
            return cls._raw(table, {})
        return cls._raw(table, {(): RatFn.const(table.nvars, c)})

    @classmethod
    def from_rat(cls, table, rf: RatFn) -> "SuperFunction":
        if rf.is_zero():
            return cls._raw(table, {})
        return cls._raw(table, {(): rf})

    @classmethod
    def generator(cls, table, name: str) -> "SuperFunction":
        if table.parity_of(name) == ODD:
            return cls._raw(table, {(table.odd_index(name),): RatFn.one(table.nvars)})
        return cls.from_rat(table, RatFn.var(table.nvars, table.even_slot(name)))

    # -- structure ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def body(self) -> RatFn:
        return self.terms.get((), RatFn.zero(self.table.nvars))

    def soul(self) -> "SuperFunction":
        return SuperFunction._raw(
            self.table, {w: c for w, c in self.terms.items() if w})

    def parity(self):
        """0, 1, or None for a mixed (or zero: 0) function."""
        if not self.terms:
            return EVEN
        seen = {len(w) & 1 for w in self.terms}
        if len(seen) == 2:
            return None
        return seen.pop()

    def homogeneous_part(self, par: int) -> "SuperFunction":
        return SuperFunction._raw(
            self.table, {w: c for w, c in self.terms.items() if (len(w) & 1) == par})

    def parity_scale(self, even_factor, odd_factor) -> "SuperFunction":
        """Scale the even part and the odd part by separate rationals."""
        out = {}
        for w, c in self.terms.items():
            k = odd_factor if (len(w) & 1) else even_factor
            if k:
                out[w] = c * k if k != 1 else c
        return SuperFunction._raw(self.table, out)

    def struct_key(self):
        return tuple(sorted(
            (w,
             tuple(sorted(c.num.terms.items())),
             tuple(sorted(c.den.terms.items())))
            for w, c in self.terms.items()))

    def _check(self, other: "SuperFunction"):
        if self.table is not other.table and self.table != other.table:
            raise TableMismatch("operands over different generator tables")

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, SuperFunction):
            return NotImplemented
        self._check(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            s = out.get(w)
            s = c if s is None else s + c
            if s.is_zero():
                out.pop(w, None)
            else:
                out[w] = s
        return SuperFunction._raw(self.table, out)

    def __sub__(self, other):
        if not isinstance(other, SuperFunction):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return SuperFunction._raw(self.table, {w: -c for w, c in self.terms.items()})

    def scale(self, k) -> "SuperFunction":
        if isinstance(k, (int, Fraction)):
            if not k:
                return SuperFunction.zero(self.table)
            return SuperFunction._raw(self.table,
                                      {w: c * k for w, c in self.terms.items()})
        if isinstance(k, RatFn):
            if k.is_zero():
                return SuperFunction.zero(self.table)
            return SuperFunction._raw(self.table,
                                      {w: c * k for w, c in self.terms.items()})
        raise TypeError("scale wants a rational or RatFn")

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, RatFn)):
            return self.scale(other)
        if not isinstance(other, SuperFunction):
            return NotImplemented
        self._check(other)
        out = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                sign, w = _merge_words(w1, w2)
                if not sign:
                    continue
                c = c1 * c2
                if sign < 0:
                    c = -c
                s = out.get(w)
                s = c if s is None else s + c
                if s.is_zero():
                    out.pop(w, None)
                else:
                    out[w] = s
        return SuperFunction._raw(self.table, out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, RatFn)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("power wants a nonnegative integer")
        out = SuperFunction.one(self.table)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, SuperFunction):
            return NotImplemented
        return self.table == other.table and self.terms == other.terms

    def __hash__(self):
        return hash((self.table, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "SuperFunction(0)"
        bits = []
        for w in sorted(self.terms, key=lambda w: (len(w), w)):
            odd = "*".join(self.table.odd_name(i) for i in w)
            c = self.terms[w]
            bits.append(f"({c!r})*{odd}" if odd else f"({c!r})")
        return "SuperFunction(" + " + ".join(bits) + ")"

    # -- derivatives --------------------------------------------------------

    def left_deriv(self, name: str) -> "SuperFunction":
        table = self.table
        if table.parity_of(name) == ODD:
            idx = table.odd_index(name)
            out = {}
            for w, c in self.terms.items():
                if idx not in w:
                    continue
                pos = w.index(idx)
                w2 = w[:pos] + w[pos + 1:]
                out[w2] = (-c) if (pos & 1) else c
            return SuperFunction._raw(table, out)
        v = table.even_slot(name)
        return SuperFunction._make(
            table, {w: c.deriv(v) for w, c in self.terms.items()})

    def right_deriv(self, name: str) -> "SuperFunction":
        table = self.table
        if table.parity_of(name) == EVEN:
            return self.left_deriv(name)
        idx = table.odd_index(name)
        out = {}
        for w, c in self.terms.items():
            if idx not in w:
                continue
            pos = w.index(idx)
            w2 = w[:pos] + w[pos + 1:]
            out[w2] = (-c) if ((len(w) - 1 - pos) & 1) else c
        return SuperFunction._raw(table, out)

    # -- substitution -------------------------------------------------------

    def substitute(self, images: dict, target: GeneratorTable = None
                   ) -> "SuperFunction":
        """Replace generators by superfunctions over the target table.

        Even images may carry a nilpotent part; coefficients are expanded by
        a terminating Taylor series around the image bodies. An unmapped
        generator or parameter falls back to the generator of the same name
        (and parity) in the target table; with the default target, that means
        it stays itself.
        """
        table = self.table
        if target is None:
            target = table
        body_map = {}
        souls = {}
        odd_imgs = {}

        def fallback(name):
            if not target.has_name(name) or \
                    target.parity_of(name) != table.parity_of(name):
                raise UnknownGenerator(
                    f"no image given for {name} and no matching "
                    f"target generator")
            return SuperFunction.generator(target, name)

        same_table = target is table or target == table
        for name in table.all_names():
            img = images.get(name)
            par = table.parity_of(name)
            if img is None:
                if par == ODD or same_table:
                    continue  # unmapped: stays itself / resolved lazily
                img = fallback(name)
            if not isinstance(img, SuperFunction):
                raise TypeError("substitution image must be a SuperFunction")
            if img.table != target:
                raise TableMismatch("image over the wrong table")
            if not img.is_zero() and img.parity() != par:
                raise ParityMismatch(
                    f"image of {name} must be homogeneous of parity {par}")
            if par == ODD:
                odd_imgs[table.odd_index(name)] = img
            else:
                v = table.even_slot(name)
                body_map[v] = img.body()
                soul = img.soul()
                if not soul.is_zero():
                    souls[v] = soul
        result = SuperFunction.zero(target)
        coeff_cache = {}
        for w, c in self.terms.items():
            key = (tuple(sorted(c.num.terms.items())),
                   tuple(sorted(c.den.terms.items())))
            expanded = coeff_cache.get(key)
            if expanded is None:
                expanded = _taylor_substitute(target, c, body_map, souls)
                coeff_cache[key] = expanded
            prod = expanded
            for idx in w:
                img = odd_imgs.get(idx)
                if img is None:
                    img = fallback(table.odd_name(idx))
                    odd_imgs[idx] = img
            for idx in w:
                prod = prod * odd_imgs[idx]
            result = result + prod
        return result

    # -- inverses and series ------------------------------------------------

    def invert(self) -> "SuperFunction":
        """Inverse of an even function with invertible body."""
        if self.parity() != EVEN:
            raise ParityMismatch("only even functions can be inverted")
        b = self.body()
        if b.is_zero():
            raise NotExpressible("body vanishes, no inverse")
        binv = b.inverse()
        nu = self.soul()
        if nu.is_zero():
            return SuperFunction.from_rat(self.table, binv)
        step = nu.scale(-binv)
        out = SuperFunction.one(self.table)
        powk = SuperFunction.one(self.table)
        while True:
            powk = powk * step
            if powk.is_zero():
                break
            out = out + powk
        return out.scale(binv)

    def pow_fraction(self, r: Fraction) -> "SuperFunction":
        """(body + soul)^r for integer or half-integer r, exactly."""
        r = Fraction(r)
        if r.denominator == 1:
            n = r.numerator
            if n >= 0:
                return self ** n
            return self.invert() ** (-n)
        if self.parity() != EVEN:
            raise ParityMismatch("fractional powers want an even function")
        b = self.body()
        if b.is_zero():
            raise NotExpressible("body vanishes, no fractional power")
        if r.denominator == 2:
            root = b.sqrt()
            if root is None:
                raise NotExpressible("body has no exact square root")
            broot = root ** r.numerator
        else:
            raise NotExpressible(f"unsupported fractional power {r}")
        nu = self.soul()
        if nu.is_zero():
            return SuperFunction.from_rat(self.table, broot)
        x = nu.scale(b.inverse())
        out = SuperFunction.one(self.table)
        powk = SuperFunction.one(self.table)
        binom = Fraction(1)
        k = 0
        while True:
            powk = powk * x
            if powk.is_zero():
                break
            k += 1
            binom *= Fraction(r - k + 1, k)
            out = out + powk.scale(binom)
        return out.scale(broot)


def _taylor_substitute(target, c: RatFn, body_map, souls) -> SuperFunction:
    pending = [(SuperFunction.one(target), c)]
    for v, soul in souls.items():
        nxt = []
        for pref, cd in pending:
            nxt.append((pref, cd))
            powk = pref
            dk = cd
            fact = 1
            k = 0
            while True:
                powk = powk * soul
                if powk.is_zero():
                    break
                dk = dk.deriv(v)
                if dk.is_zero():
                    break
                k += 1
                fact *= k
                nxt.append((powk.scale(Fraction(1, fact)), dk))
        pending = nxt
    out = SuperFunction.zero(target)
    for pref, cd in pending:
        val = cd.substitute(body_map, target.nvars)
        if not val.is_zero():
            out = out + pref.scale(val)
    return out


def exp_nilpotent(nu: SuperFunction) -> SuperFunction:
    """e^nu for even nu with zero body."""
    if nu.parity() not in (EVEN,):
        raise ParityMismatch("exponent must be even")
    if not nu.body().is_zero():
        raise NotExpressible("exponent body must vanish")
    out = SuperFunction.one(nu.table)
    powk = SuperFunction.one(nu.table)
    k = 0
    fact = 1
    while True:
        powk = powk * nu
        if powk.is_zero():
            break
        k += 1
        fact *= k
        out = out + powk.scale(Fraction(1, fact))
    return out


def log_one_plus(nu: SuperFunction) -> SuperFunction:
    """log(1 + nu) for even nu with zero body."""
    if nu.parity() not in (EVEN,):
        raise ParityMismatch("argument must be even")
    if not nu.body().is_zero():
        raise NotExpressible("argument body must vanish")
    out = SuperFunction.zero(nu.table)
    powk = SuperFunction.one(nu.table)
    k = 0
    while True:
        powk = powk * nu
        if powk.is_zero():
            break
        k += 1
        out = out + powk.scale(Fraction((-1) ** (k + 1), k))
    return out


class DressedFunction:
    """base * e^exponent with the exponent held as a pure coefficient body."""

    __slots__ = ("base", "exponent")

    def __init__(self, base: SuperFunction, exponent=None):
        table = base.table
        if exponent is None:
            exponent = RatFn.zero(table.nvars)
        if isinstance(exponent, SuperFunction):
            if exponent.parity() != EVEN:
                raise ParityMismatch("exponent must be even")
            soul = exponent.soul()
            if not soul.is_zero():
                base = base * exp_nilpotent(soul)
            exponent = exponent.body()
        elif isinstance(exponent, (int, Fraction)):
            exponent = RatFn.const(table.nvars, exponent)
        if exponent.nvars != table.nvars:
            raise TableMismatch("exponent over a different coefficient ring")
        if base.is_zero():
            exponent = RatFn.zero(table.nvars)
        self.base = base
        self.exponent = exponent

    @classmethod
    def plain(cls, f: SuperFunction) -> "DressedFunction":
        return cls(f)

    @property
    def table(self):
        return self.base.table

    def is_zero(self) -> bool:
        return self.base.is_zero()

    def parity(self):
        return self.base.parity()

    def __neg__(self):
        return DressedFunction(-self.base, self.exponent)

    def scale(self, k) -> "DressedFunction":
        return DressedFunction(self.base.scale(k), self.exponent)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, RatFn)):
            return self.scale(other)
        if isinstance(other, SuperFunction):
            other = DressedFunction(other)
        if not isinstance(other, DressedFunction):
            return NotImplemented
        return DressedFunction(self.base * other.base,
                               self.exponent + other.exponent)

    def __rmul__(self, other):
        # multiplication is graded-commutative at best; keep the order
        if isinstance(other, (int, Fraction, RatFn)):
            return self.scale(other)
        if isinstance(other, SuperFunction):
            return DressedFunction(other) * self
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, SuperFunction):
            other = DressedFunction(other)
        if not isinstance(other, DressedFunction):
            return NotImplemented
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.exponent != other.exponent:
            raise NotExpressible(
                "cannot add dressed functions with different exponents")
        return DressedFunction(self.base + other.base, self.exponent)

    def __sub__(self, other):
        return self + (-other)

    def left_deriv(self, name: str) -> "DressedFunction":
        # exponent is a pure body, so odd derivatives never touch it
        table = self.table
        db = self.base.left_deriv(name)
        if table.parity_of(name) == EVEN:
            dE = self.exponent.deriv(table.even_slot(name))
            if not dE.is_zero():
                db = db + self.base.scale(dE)
        return DressedFunction(db, self.exponent)

    def __eq__(self, other):
        if isinstance(other, SuperFunction):
            other = DressedFunction(other)
        if not isinstance(other, DressedFunction):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return True
        return self.exponent == other.exponent and self.base == other.base

    def __hash__(self):
        return hash((self.base, self.exponent))

    def __repr__(self):
        if self.exponent.is_zero():
            return f"DressedFunction({self.base!r})"
        return f"DressedFunction({self.base!r} * exp({self.exponent!r}))"


class DressedSum:
    """Finite sum of dressed functions grouped by exponent."""

    __slots__ = ("table", "parts")

    def __init__(self, table, parts=()):
        merged = {}
        for p in parts:
            if isinstance(p, SuperFunction):
                p = DressedFunction(p)
            if p.is_zero():
                continue
            key = (tuple(sorted(p.exponent.num.terms.items())),
                   tuple(sorted(p.exponent.den.terms.items())))
            if key in merged:
                merged[key] = merged[key] + p
            else:
                merged[key] = p
        self.table = table
        self.parts = tuple(p for k, p in sorted(merged.items())
                           if not p.is_zero())

    @classmethod
    def of(cls, *items):
        items = [DressedFunction(i) if isinstance(i, SuperFunction) else i
                 for i in items]
        if not items:
            raise ValueError("empty dressed sum needs an explicit table")
        return cls(items[0].table, items)

    def is_zero(self) -> bool:
        return not self.parts

    def __add__(self, other):
        if isinstance(other, (SuperFunction, DressedFunction)):
            other = DressedSum(self.table, [other])
        if not isinstance(other, DressedSum):
            return NotImplemented
        return DressedSum(self.table, self.parts + other.parts)

    def __neg__(self):
        return DressedSum(self.table, [-p for p in self.parts])

    def __sub__(self, other):
        if isinstance(other, (SuperFunction, DressedFunction)):
            other = DressedSum(self.table, [other])
        return self + (-other)

    def scale(self, k) -> "DressedSum":
        return DressedSum(self.table, [p.scale(k) for p in self.parts])

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, RatFn)):
            return self.scale(other)
        if isinstance(other, (SuperFunction, DressedFunction)):
            other = DressedSum(self.table, [other])
        if not isinstance(other, DressedSum):
            return NotImplemented
        return DressedSum(self.table,
                          [p * q for p in self.parts for q in other.parts])

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, RatFn)):
            return self.scale(other)
        if isinstance(other, (SuperFunction, DressedFunction)):
            return DressedSum(self.table, [other]) * self
        return NotImplemented

    def left_deriv(self, name: str) -> "DressedSum":
        return DressedSum(self.table, [p.left_deriv(name) for p in self.parts])

    def __eq__(self, other):
        if isinstance(other, (SuperFunction, DressedFunction)):
            other = DressedSum(self.table, [other])
        if not isinstance(other, DressedSum):
            return NotImplemented
        return self.table == other.table and self.parts == other.parts

    def __repr__(self):
        if not self.parts:
            return "DressedSum(0)"
        return "DressedSum(" + " + ".join(repr(p) for p in self.parts) + ")"
