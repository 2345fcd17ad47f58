"""Multivector calculus through the odd cotangent picture.

On a chart with even positions and odd momenta, a momentum monomial of
length k is a k-vector field on the base.  Pairing a half-density
g * mu_stand^(1/2) with the top form d^nq gives an ordinary form on
the base via contraction,

    phi(f p_{i_1} ... p_{i_k}) = f iota_{i_1} ... iota_{i_k} d^nq,

with the rightmost contraction applied first.  Conjugating the de Rham
differential through phi reproduces the flat Laplacian on coefficients,
and replacing d^nq by a volume form e^W d^nq turns the same recipe into
the divergence operator on multivectors.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import NotExpressible, ParityMismatch, TableMismatch, WeightMismatch
from .rational import RatFn
from .superalg import EVEN, ODD, DressedFunction, GeneratorTable, SuperFunction
from .densities import HALF, ReferenceDensity, SDensity


def _check_cotangent(table: GeneratorTable) -> None:
    for i in range(table.n):
        if table.position_parity(i) != EVEN:
            raise ParityMismatch("cotangent chart wants even positions")


def _base_slots(table: GeneratorTable):
    slots = {table.even_slot(table.position(i)) for i in range(table.n)}
    slots |= {table.even_slot(p) for p in table.params}
    return slots


def _check_base_coeff(table: GeneratorTable, c: RatFn) -> None:
    used = c.num.variables() | c.den.variables()
    if not used <= _base_slots(table):
        raise NotExpressible("coefficient must depend on the base only")


class BaseForm:
    """Differential form e^W sum_J c_J dq^J on the even base chart.

    Keys are strictly increasing tuples of pair indices; W and the
    coefficients are rational functions of positions and parameters.
    """

    __slots__ = ("table", "exponent", "terms")

    def __init__(self, table: GeneratorTable, terms: dict, exponent=None):
        _check_cotangent(table)
        if exponent is None:
            exponent = RatFn.zero(table.nvars)
        _check_base_coeff(table, exponent)
        clean = {}
        for key, c in terms.items():
            key = tuple(key)
            if list(key) != sorted(set(key)):
                raise ValueError("index sets must be strictly increasing")
            if key and not (0 <= key[0] and key[-1] < table.n):
                raise ValueError("index out of range for the base")
            _check_base_coeff(table, c)
            if not c.is_zero():
                clean[key] = c
        if not clean:
            exponent = RatFn.zero(table.nvars)
        self.table = table
        self.exponent = exponent
        self.terms = clean

    @classmethod
    def zero(cls, table: GeneratorTable) -> "BaseForm":
        return cls(table, {})

    @classmethod
    def top(cls, table: GeneratorTable, exponent=None) -> "BaseForm":
        """The form e^W dq^1 ... dq^n."""
        full = tuple(range(table.n))
        return cls(table, {full: RatFn.const(table.nvars, 1)}, exponent)

    def is_zero(self) -> bool:
        return not self.terms

    def scale(self, k) -> "BaseForm":
        if isinstance(k, (int, Fraction)):
            k = RatFn.const(self.table.nvars, Fraction(k))
        return BaseForm(self.table,
                        {j: c * k for j, c in self.terms.items()},
                        self.exponent)

    def __add__(self, other):
        if not isinstance(other, BaseForm):
            return NotImplemented
        if other.table != self.table:
            raise TableMismatch("forms over different tables")
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if other.exponent != self.exponent:
            raise NotExpressible("cannot add forms with different exponents")
        terms = dict(self.terms)
        for j, c in other.terms.items():
            acc = terms.get(j)
            terms[j] = c if acc is None else acc + c
        return BaseForm(self.table, terms, self.exponent)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def d(self) -> "BaseForm":
        """De Rham differential, with the product rule for the exponent."""
        table = self.table
        out = {}
        for j, c in self.terms.items():
            inside = set(j)
            for l in range(table.n):
                if l in inside:
                    continue
                slot = table.even_slot(table.position(l))
                dc = c.deriv(slot) + c * self.exponent.deriv(slot)
                if dc.is_zero():
                    continue
                before = sum(1 for idx in j if idx < l)
                if before % 2:
                    dc = -dc
                key = tuple(sorted(inside | {l}))
                acc = out.get(key)
                out[key] = dc if acc is None else acc + dc
        return BaseForm(table, out, self.exponent)

    def __eq__(self, other):
        if not isinstance(other, BaseForm):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return self.table == other.table
        return (self.table == other.table and self.exponent == other.exponent
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.table, self.exponent,
                     tuple(sorted(self.terms.items()))))

    def __repr__(self):
        body = " + ".join(f"{c!r} dq{list(j)}"
                          for j, c in sorted(self.terms.items()))
        return f"BaseForm(e^{self.exponent!r} ({body or '0'}))"


def _contract_top(table: GeneratorTable, word):
    """Key and sign of iota_{i_1} ... iota_{i_k} d^nq, rightmost first."""
    left = list(range(table.n))
    sign = 1
    for i in reversed(word):
        pos = left.index(i)
        if pos % 2:
            sign = -sign
        left.pop(pos)
    return tuple(left), sign


def phi(sigma: SDensity) -> BaseForm:
    """Pair a half-density with the coordinate top form."""
    if sigma.weight != HALF:
        raise WeightMismatch("phi pairs half-densities with top forms")
    g = sigma.coeff
    table = g.table
    _check_cotangent(table)
    terms = {}
    for word, c in g.base.terms.items():
        key, sign = _contract_top(table, word)
        c = c if sign > 0 else -c
        acc = terms.get(key)
        terms[key] = c if acc is None else acc + c
    return BaseForm(table, terms, g.exponent)


def phi_inverse(alpha: BaseForm) -> SDensity:
    """The multivector times mu_stand^(1/2) whose phi-image is alpha."""
    table = alpha.table
    all_idx = set(range(table.n))
    terms = {}
    for key, c in alpha.terms.items():
        word = tuple(sorted(all_idx - set(key)))
        _, sign = _contract_top(table, word)
        terms[word] = c if sign > 0 else -c
    base = SuperFunction(table, terms)
    return SDensity(HALF, DressedFunction(base, alpha.exponent))


def dee(sigma: SDensity) -> SDensity:
    """The de Rham differential conjugated through phi."""
    return phi_inverse(phi(sigma).d())


def mu_v(v: BaseForm) -> ReferenceDensity:
    """The density v^2 attached to a volume form v = c e^W d^nq."""
    table = v.table
    full = tuple(range(table.n))
    if set(v.terms) != {full}:
        raise NotExpressible("volume form must be a nonzero top form")
    c = v.terms[full]
    if not c.is_const():
        raise NotExpressible("volume coefficient must be exponential")
    factor = c.const_value() ** 2
    logfactor = SuperFunction.from_rat(table, (v.exponent + v.exponent))
    return ReferenceDensity(factor, logfactor)


def _phi_v(v: BaseForm, x: SuperFunction) -> BaseForm:
    full = tuple(range(v.table.n))
    c = v.terms[full]
    form = phi(SDensity(HALF, DressedFunction(x)))
    return BaseForm(v.table, {j: coeff * c for j, coeff in form.terms.items()},
                    form.exponent + v.exponent)


def div_multivector(v: BaseForm, x: SuperFunction) -> SuperFunction:
    """Divergence of a multivector with respect to a volume form.

    Computed as phi_v^-1(d(iota_x v)); on momentum-linear x this is the
    classical divergence of the vector field it names.
    """
    table = v.table
    full = tuple(range(table.n))
    if set(v.terms) != {full} or not v.terms[full].is_const():
        raise NotExpressible("volume form must be a nonzero top form")
    if x.table != table:
        raise TableMismatch("multivector over a different table")
    c = v.terms[full]
    dform = _phi_v(v, x).d()
    stripped = BaseForm(table,
                        {j: coeff * c.inverse()
                         for j, coeff in dform.terms.items()},
                        dform.exponent - v.exponent)
    out = phi_inverse(stripped).coeff
    if not out.exponent.is_zero():
        raise NotExpressible("divergence left the polynomial class")
    return out.base
