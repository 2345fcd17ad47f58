"""Berezin and exact Gaussian integration with gauge-fixing Lagrangians.

Odd directions integrate by iterated left derivatives, the last listed
variable acting first (one integral of theta is 1).  Even directions
integrate against the Gaussian weight carried in the exponent, by exact
moment formulas; the sqrt(2*pi/a) prefactors stay symbolic inside an
IntegralValue.

A LagrangianGauge holds an odd gauge function psi of the position-like
variables y^i; restriction substitutes each momentum-like variable x_i
by (-1)^{|x_i|} dpsi/dy^i, the sign that makes x_i dy^i pull back to
dpsi.  The harness routines check the total-derivative identity behind
the vanishing of integrals of Laplacian images, the constancy of gauge
integrals of Laplacian-closed integrands along a gauge family, and the
agreement of conormal integrals with base integrals of the associated
forms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cotangent import phi
from .densities import HALF, SDensity
from .errors import (NotExpressible, NotGaussian, ParityMismatch,
                     TableMismatch, WeightMismatch)
from .forms import d_of_function, one_form, pullback
from .rational import Poly, RatFn
from .superalg import (DressedFunction, EVEN, GeneratorTable, ODD,
                       SuperFunction)
from .symplectic import laplacian


def _as_dressed(f) -> DressedFunction:
    if isinstance(f, SuperFunction):
        return DressedFunction(f)
    if isinstance(f, DressedFunction):
        return f
    raise TypeError(f"cannot integrate {type(f).__name__}")


def berezin_integral(f, odd_names):
    """Iterated odd integral; the last listed variable integrates first."""
    table = f.table
    for name in odd_names:
        if table.parity_of(name) != ODD:
            raise ParityMismatch(f"{name} is even, Berezin wants odd")
    out = f
    for name in reversed(list(odd_names)):
        out = out.left_deriv(name)
    return out


def _square_free(m: int):
    """m = s*s*r with r squarefree; returns (s, r) for positive m."""
    s, r, d = 1, 1, 2
    while d * d <= m:
        e = 0
        while m % d == 0:
            m //= d
            e += 1
        s *= d ** (e // 2)
        if e & 1:
            r *= d
        d += 1
    return s, r * m


def _split_square(a: Fraction):
    """a = lam^2 * rho with rho a squarefree integer.

    sqrt(p/q) = sqrt(p*q)/q, so the radical class of a positive rational
    is the squarefree part of numerator*denominator.
    """
    s, r = _square_free(a.numerator * a.denominator)
    return Fraction(s, a.denominator), r


@dataclass(frozen=True, eq=False)
class IntegralValue:
    """Exact value c * prod_i sqrt(2*pi/a_i) of a moment integral.

    The coefficient is a rational function of the parameters; scales is
    the sorted multiset of Gaussian scales a_i, one per integrated even
    direction.  Two values compare equal exactly when their normalized
    coefficient and squarefree radical part agree, so profiles that
    differ by a rational factor (say a vs 4a) still compare.
    """

    coefficient: RatFn
    scales: tuple = ()

    def __post_init__(self):
        got = tuple(sorted(Fraction(a) for a in self.scales))
        if any(a <= 0 for a in got):
            raise NotGaussian("Gaussian scales must be positive")
        object.__setattr__(self, "scales", got)

    def is_zero(self) -> bool:
        return self.coefficient.is_zero()

    def _canonical(self):
        if self.coefficient.is_zero():
            return (0,)
        prod = Fraction(1)
        for a in self.scales:
            prod *= a
        lam, rho = _split_square(prod)
        nvars = self.coefficient.num.nvars
        norm = self.coefficient * RatFn.const(nvars, 1 / lam)
        return (len(self.scales), rho, norm)

    def __eq__(self, other):
        if not isinstance(other, IntegralValue):
            return NotImplemented
        return self._canonical() == other._canonical()

    def __hash__(self):
        return hash(self._canonical())

    def scale(self, k) -> "IntegralValue":
        nvars = self.coefficient.num.nvars
        if isinstance(k, (int, Fraction)):
            k = RatFn.const(nvars, k)
        return IntegralValue(self.coefficient * k, self.scales)

    def __add__(self, other: "IntegralValue") -> "IntegralValue":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.scales != other.scales:
            raise NotExpressible("cannot add values over different profiles")
        return IntegralValue(self.coefficient + other.coefficient,
                             self.scales)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def __repr__(self):
        if self.is_zero():
            return "IntegralValue(0)"
        pre = "".join(f" * G({a})" for a in self.scales)
        return f"IntegralValue({self.coefficient!r}{pre})"


def _double_factorial(m: int) -> int:
    out = 1
    for j in range(1, m, 2):
        out *= j
    return out


def gaussian_integral(F, even_names, scales=None) -> IntegralValue:
    """Integrate even directions against the Gaussian in the exponent.

    The exponent must be exactly -1/2 sum_i a_i z_i^2 over the listed
    directions with positive rational a_i; the base must be polynomial
    in them, with at most parameters left over.  Moments are exact:
    the 2k-th is (2k-1)!! a^{-k} times sqrt(2*pi/a), odd ones vanish.
    """
    F = _as_dressed(F)
    table = F.table
    names = list(even_names)
    slots = []
    for name in names:
        if table.parity_of(name) != EVEN:
            raise ParityMismatch(f"{name} is odd, Gaussian wants even")
        slots.append(table.even_slot(name))
    if len(set(slots)) != len(slots):
        raise ValueError("repeated integration variable")
    if F.base.is_zero():
        return IntegralValue(RatFn.zero(table.nvars))
    expo = F.exponent
    if not expo.den.is_const():
        raise NotGaussian("exponent must be polynomial")
    read = {s: Fraction(0) for s in slots}
    for exps, c in expo.num.terms.items():
        sup = [i for i, e in enumerate(exps) if e]
        if len(sup) != 1 or exps[sup[0]] != 2 or sup[0] not in read:
            raise NotGaussian("exponent must be -1/2 sum a_i z_i^2 "
                              "over the integrated directions")
        read[sup[0]] = -2 * c
    for s, a in read.items():
        if a <= 0:
            raise NotGaussian("every integrated direction needs a "
                              "positive Gaussian scale")
    if scales is not None:
        want = [Fraction(a) for a in scales]
        if want != [read[s] for s in slots]:
            raise NotGaussian("declared scales disagree with the exponent")
    if set(F.base.terms) != {()}:
        raise NotExpressible("odd generators remain; integrate them first")
    c = F.base.terms[()]
    if c.den.variables() & set(slots):
        raise NotExpressible("base must be polynomial in the "
                             "integrated directions")
    num = {}
    for exps, coeff in c.num.terms.items():
        fac = Fraction(1)
        newe = list(exps)
        for s in slots:
            m = exps[s]
            if m & 1:
                fac = Fraction(0)
                break
            if m:
                fac *= Fraction(_double_factorial(m)) / read[s] ** (m // 2)
                newe[s] = 0
        if fac:
            key = tuple(newe)
            num[key] = num.get(key, Fraction(0)) + coeff * fac
    out = RatFn(Poly(table.nvars, num), c.den)
    allowed = {table.even_slot(p) for p in table.params}
    if not (out.num.variables() | out.den.variables()) <= allowed:
        raise NotExpressible("leftover chart variables after integration")
    return IntegralValue(out, tuple(read[s] for s in slots))


def chart_integral(F, scales=None) -> IntegralValue:
    """Integral over the whole chart: odd variables in measure order
    (positions before momenta, ascending pairs), then all even ones."""
    F = _as_dressed(F)
    t = F.table
    odd = [t.position(i) for i in range(t.n)
           if t.position_parity(i) == ODD]
    odd += [t.momentum(i) for i in range(t.n)
            if t.parity_of(t.momentum(i)) == ODD]
    even = [t.position(i) for i in range(t.n)
            if t.position_parity(i) == EVEN]
    even += [t.momentum(i) for i in range(t.n)
             if t.parity_of(t.momentum(i)) == EVEN]
    return gaussian_integral(berezin_integral(F, odd), even, scales)


@dataclass(frozen=True)
class LagrangianGauge:
    """Gauge chart (x_i, y^i) with an odd gauge function psi(y).

    Momenta play the x role, positions the y role.  psi may involve the
    parameters but no x variable, and must be odd.
    """

    table: GeneratorTable
    psi: SuperFunction

    def __post_init__(self):
        t = self.table
        if self.psi.table != t:
            raise TableMismatch("gauge function over a different table")
        if not self.psi.is_zero() and self.psi.parity() != ODD:
            raise ParityMismatch("gauge function must be odd")
        bad_odd, bad_even = set(), set()
        for i in range(t.n):
            x = t.momentum(i)
            if t.parity_of(x) == ODD:
                bad_odd.add(t.odd_index(x))
            else:
                bad_even.add(t.even_slot(x))
        for w, c in self.psi.terms.items():
            used = c.num.variables() | c.den.variables()
            if set(w) & bad_odd or used & bad_even:
                raise NotExpressible(
                    "gauge function must not involve the x variables")

    def substitution(self) -> dict:
        """The defining map x_i -> (-1)^{|x_i|} dpsi/dy^i."""
        t = self.table
        out = {}
        for i in range(t.n):
            x = t.momentum(i)
            img = self.psi.left_deriv(t.position(i))
            if t.parity_of(x) == ODD:
                img = -img
            out[x] = img
        return out


def restrict_to_lagrangian(f, gauge: LagrangianGauge):
    """Substitute every x variable by its gauge expression."""
    sub = gauge.substitution()
    if isinstance(f, SuperFunction):
        return f.substitute(sub)
    f = _as_dressed(f)
    base = f.base.substitute(sub)
    expo = SuperFunction.from_rat(f.table, f.exponent).substitute(sub)
    return DressedFunction(base, expo)


def lagrangian_property(gauge: LagrangianGauge) -> bool:
    """The defining check: (x_i dy^i) restricted to the gauge is dpsi."""
    t = gauge.table
    comps = {t.position(i): SuperFunction.generator(t, t.momentum(i))
             for i in range(t.n)}
    alpha = one_form(t, comps)
    got = pullback(alpha, gauge.substitution(), t)
    return got == d_of_function(gauge.psi)


def _odd_positions_desc(t: GeneratorTable):
    return [t.position(i) for i in reversed(range(t.n))
            if t.position_parity(i) == ODD]


def integrate_over_lagrangian(f, gauge: LagrangianGauge,
                              scales=None) -> IntegralValue:
    """Restrict, Berezin the odd y's, Gaussian the even y's.

    The odd y's are handed over in descending pair order, so the
    ascending monomial y^{j1}..y^{jr} extracts with coefficient +1.
    """
    t = gauge.table
    res = _as_dressed(restrict_to_lagrangian(f, gauge))
    reduced = berezin_integral(res, _odd_positions_desc(t))
    even_y = [t.position(i) for i in range(t.n)
              if t.position_parity(i) == EVEN]
    return gaussian_integral(reduced, even_y, scales)


@dataclass(frozen=True)
class LemmaReport:
    """Outcome of the vanishing lemma for one (g, gauge) pair."""

    identity_holds: bool
    integral: IntegralValue

    @property
    def ok(self) -> bool:
        return self.identity_holds and self.integral.is_zero()


def bv_lemma_check(g, gauge: LagrangianGauge, scales=None) -> LemmaReport:
    """Gauge integrals of Laplacian images vanish.

    Verifies the total-derivative identity behind the proof,
    (lap g)|_L = sum_i d_i((d^i g)|_L), then integrates lap g when the
    scales make it integrable.
    """
    t = gauge.table
    g = _as_dressed(g)
    lap = laplacian(g)
    lhs = restrict_to_lagrangian(lap, gauge)
    rhs = None
    for i in range(t.n):
        inner = restrict_to_lagrangian(g.left_deriv(t.momentum(i)), gauge)
        term = inner.left_deriv(t.position(i))
        rhs = term if rhs is None else rhs + term
    identity = lhs == rhs
    return LemmaReport(identity, integrate_over_lagrangian(lap, gauge,
                                                           scales))


def _degree_in(rf: RatFn, slot: int) -> int:
    def deg(p):
        return max((e[slot] for e in p.terms), default=0)
    return max(deg(rf.num), deg(rf.den))


@dataclass(frozen=True)
class InvarianceReport:
    """Gauge independence of the integral of a Laplacian-closed function."""

    laplacian_vanishes: bool
    proof_identity_holds: bool
    integral: IntegralValue
    parameter_degree: int

    @property
    def ok(self) -> bool:
        return (self.laplacian_vanishes and self.proof_identity_holds
                and self.parameter_degree == 0)


def bv_invariance_harness(f, gauge: LagrangianGauge, t_name: str,
                          scales=None) -> InvarianceReport:
    """Integrate f over the gauge family psi_t and check constancy in t.

    Also verifies the derivative-of-the-integral identity
    lap(psidot f) = sum_i (-1)^{|x_i|} d_i psidot d^i f - psidot lap f
    as unrestricted functions.  A nonvanishing lap f is reported, not
    raised.
    """
    t = gauge.table
    role, _ = t.kind_of(t_name)
    if role != "param":
        raise NotExpressible(f"{t_name} is not a parameter")
    f = _as_dressed(f)
    lap = laplacian(f)
    psidot = gauge.psi.left_deriv(t_name)
    lhs = laplacian(psidot * f)
    rhs = None
    for i in range(t.n):
        term = psidot.left_deriv(t.position(i)) * f.left_deriv(t.momentum(i))
        if t.parity_of(t.momentum(i)) == ODD:
            term = -term
        rhs = term if rhs is None else rhs + term
    rhs = rhs - psidot * lap
    value = integrate_over_lagrangian(f, gauge, scales)
    deg = _degree_in(value.coefficient, t.even_slot(t_name))
    return InvarianceReport(lap.is_zero(), lhs == rhs, value, deg)


def restrict_halfdensity(sigma: SDensity,
                         gauge: LagrangianGauge) -> DressedFunction:
    """Coefficient of the density a half-density induces on the gauge
    Lagrangian (against the coordinate measure d^n y)."""
    if sigma.weight != HALF:
        raise WeightMismatch("only half-densities restrict to densities")
    if sigma.table != gauge.table:
        raise TableMismatch("density over a different table")
    return _as_dressed(restrict_to_lagrangian(sigma.coeff, gauge))


def integrate_halfdensity(sigma: SDensity, gauge: LagrangianGauge,
                          scales=None) -> IntegralValue:
    if sigma.weight != HALF:
        raise WeightMismatch("only half-densities restrict to densities")
    return integrate_over_lagrangian(sigma.coeff, gauge, scales)


def _zero_images(t: GeneratorTable, names):
    zero = SuperFunction.zero(t)
    return {name: zero for name in names}


def conormal_integral(sigma: SDensity, subset,
                      scales=None) -> IntegralValue:
    """Integral over the parity-reversed conormal of the coordinate
    subspace C = {positions in `subset` vanish}.

    Realized as the psi = 0 gauge of the rearranged chart: positions in
    the subset and momenta outside it are set to zero, the remaining
    odd momenta Berezin-integrate in descending pair order, and the
    remaining even positions integrate against the Gaussian.
    """
    t = sigma.table
    if sigma.weight != HALF:
        raise WeightMismatch("conormal integration wants a half-density")
    jset = set(subset)
    if not all(0 <= j < t.n for j in jset):
        raise ValueError("subset indices out of range")
    for i in range(t.n):
        if t.position_parity(i) != EVEN:
            raise ParityMismatch("conormal charts want even positions")
    kill = [t.position(j) for j in sorted(jset)]
    kill += [t.momentum(i) for i in range(t.n) if i not in jset]
    sub = _zero_images(t, kill)
    coeff = sigma.coeff
    base = coeff.base.substitute(sub)
    expo = SuperFunction.from_rat(t, coeff.exponent).substitute(sub)
    res = DressedFunction(base, expo)
    odd = [t.momentum(j) for j in sorted(jset, reverse=True)]
    even = [t.position(i) for i in range(t.n) if i not in jset]
    return gaussian_integral(berezin_integral(res, odd), even, scales)


@dataclass(frozen=True)
class ConormalReport:
    """The two routes to the conormal integral of a half-density."""

    gauge_side: IntegralValue
    form_side: IntegralValue

    @property
    def ok(self) -> bool:
        return self.gauge_side == self.form_side


def conormal_check(sigma: SDensity, subset,
                   scales=None) -> ConormalReport:
    """Compare the conormal integral with the base integral of the
    associated form.

    The base side restricts the matching component of the form to C and
    integrates with the orientation whose positive frame contracts the
    subset indices out of the coordinate volume, a sign of
    (-1)^{sum of the (0-based) subset indices} against the ascending
    frame.
    """
    t = sigma.table
    lhs = conormal_integral(sigma, subset, scales)
    alpha = phi(sigma)
    jset = set(subset)
    comp = tuple(i for i in range(t.n) if i not in jset)
    c = alpha.terms.get(comp, RatFn.zero(t.nvars))
    sub = _zero_images(t, [t.position(j) for j in sorted(jset)])
    c_res = SuperFunction.from_rat(t, c).substitute(sub)
    w_res = SuperFunction.from_rat(t, alpha.exponent).substitute(sub)
    if sum(jset) & 1:
        c_res = -c_res
    even = [t.position(i) for i in comp]
    rhs = gaussian_integral(DressedFunction(c_res, w_res), even, scales)
    return ConormalReport(lhs, rhs)
