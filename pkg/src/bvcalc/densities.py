"""Reference densities, s-densities, and the Laplacians they induce.

A reference density is kept in exponential form, factor * e^S * mu_stand
with S even, so it is even and nowhere vanishing by construction.  An
s-density is a coefficient times mu_stand^s; the coefficient is a
dressed function so that Gaussian weights stay exact.

Operators, with S the log factor of mu:

    div_mu X   = div_stand X + X(S)
    delta_mu f = lap f - (1/2)(S, f)
    F_S        = lap S - (1/4)(S, S)
    tilde      = delta_mu + (1/2) F_S * .
    hat        = conjugation of the flat Laplacian by e^{S/2}

tilde and hat agree, square to zero for every mu, and reduce to
delta_mu exactly when F_S = 0.  The factor of a reference density never
enters any of them: it cancels between mu^s and mu^{-s}.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    NotExpressible, ParityMismatch, TableMismatch, WeightMismatch,
)
from .superalg import (
    EVEN, DressedFunction, DressedSum, GeneratorTable, SuperFunction,
)
from .symplectic import (
    SuperVectorField, bv_bracket, divergence_standard, laplacian,
)

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class ReferenceDensity:
    """mu = factor * e^logfactor * mu_stand on a fixed chart."""

    factor: Fraction
    logfactor: SuperFunction

    def __post_init__(self):
        if not isinstance(self.factor, Fraction):
            object.__setattr__(self, "factor", Fraction(self.factor))
        if self.factor == 0:
            raise ValueError("density factor must be nonzero")
        s = self.logfactor
        if not s.is_zero() and s.parity() != EVEN:
            raise ParityMismatch("log factor of a density must be even")

    @classmethod
    def standard(cls, table: GeneratorTable) -> "ReferenceDensity":
        return cls(Fraction(1), SuperFunction.zero(table))

    @classmethod
    def exponential(cls, logfactor: SuperFunction,
                    factor=Fraction(1)) -> "ReferenceDensity":
        return cls(Fraction(factor), logfactor)

    @property
    def table(self) -> GeneratorTable:
        return self.logfactor.table

    def coefficient(self) -> DressedFunction:
        """The density written against mu_stand."""
        return DressedFunction(
            SuperFunction.const(self.table, self.factor), self.logfactor)


@dataclass(frozen=True)
class SDensity:
    """sigma = coeff * mu_stand^weight."""

    weight: Fraction
    coeff: DressedFunction

    def __post_init__(self):
        if not isinstance(self.weight, Fraction):
            object.__setattr__(self, "weight", Fraction(self.weight))
        if isinstance(self.coeff, SuperFunction):
            object.__setattr__(self, "coeff", DressedFunction(self.coeff))

    @property
    def table(self) -> GeneratorTable:
        return self.coeff.table

    def is_zero(self) -> bool:
        return self.coeff.is_zero()

    def scale(self, k) -> "SDensity":
        return SDensity(self.weight, self.coeff.scale(k))

    def __mul__(self, other):
        if isinstance(other, SDensity):
            return SDensity(self.weight + other.weight,
                            self.coeff * other.coeff)
        return SDensity(self.weight, self.coeff * other)

    def __rmul__(self, other):
        return SDensity(self.weight, other * self.coeff)

    def __add__(self, other: "SDensity") -> "SDensity":
        if self.weight != other.weight:
            raise WeightMismatch("cannot add densities of different weights")
        return SDensity(self.weight, self.coeff + other.coeff)

    def __neg__(self) -> "SDensity":
        return self.scale(-1)

    def __sub__(self, other: "SDensity") -> "SDensity":
        return self + (-other)


def _as_dressed(x) -> DressedFunction:
    if isinstance(x, DressedSum):
        if not x.parts:
            return DressedFunction(SuperFunction.zero(x.table))
        if len(x.parts) == 1:
            return x.parts[0]
        raise NotExpressible("sum of dressed functions with mixed exponents")
    if isinstance(x, SuperFunction):
        return DressedFunction(x)
    return x


def _check_table(mu: ReferenceDensity, f) -> None:
    if f.table != mu.table:
        raise TableMismatch("operand over a different table than the density")


def divergence(mu: ReferenceDensity, x: SuperVectorField):
    """div_mu X, defined by L_X mu = div_mu X * mu."""
    _check_table(mu, x)
    return divergence_standard(x) + x(mu.logfactor)


def lie_derivative_density(x: SuperVectorField,
                           mu: ReferenceDensity) -> SDensity:
    """L_X mu as a weight-1 density."""
    d = divergence(mu, x)
    return SDensity(Fraction(1),
                    DressedFunction(d.scale(mu.factor), mu.logfactor))


def delta_mu(mu: ReferenceDensity, f):
    """The mu-dependent BV Laplacian, half the mu-divergence of X_f."""
    _check_table(mu, f)
    return laplacian(f) - bv_bracket(mu.logfactor, f).scale(HALF)


def f_obstruction(s: SuperFunction) -> SuperFunction:
    """F_S, the defect of delta_mu squaring to zero."""
    if not s.is_zero() and s.parity() != EVEN:
        raise ParityMismatch("log factor must be even")
    return laplacian(s) - bv_bracket(s, s).scale(Fraction(1, 4))


def is_compatible(mu: ReferenceDensity) -> bool:
    """Whether delta_mu squares to zero.

    F_S is odd, and an odd function central for the bracket vanishes,
    so compatibility is exactly F_S = 0.
    """
    return f_obstruction(mu.logfactor).is_zero()


def tilde_delta(mu: ReferenceDensity, f: SuperFunction) -> SuperFunction:
    """delta_mu corrected by half the obstruction, squares to zero always."""
    _check_table(mu, f)
    fs = f_obstruction(mu.logfactor)
    return delta_mu(mu, f) + (fs * f).scale(HALF)


def delta_s(mu: ReferenceDensity, sigma: SDensity) -> SDensity:
    """Weight-s BV Laplacian: re-express against mu^s, apply delta_mu,
    re-express back.  The factor of mu cancels exactly."""
    if sigma.table != mu.table:
        raise TableMismatch("density and operand tables differ")
    s = sigma.weight
    if mu.factor < 0 and s.denominator != 1:
        raise NotExpressible(
            "fractional power of a density with negative factor")
    table = mu.table
    one = SuperFunction.one(table)
    down = DressedFunction(one, mu.logfactor.scale(-s))
    up = DressedFunction(one, mu.logfactor.scale(s))
    moved = delta_mu(mu, sigma.coeff * down)
    return SDensity(s, _as_dressed(_as_dressed(moved) * up))


def canonical_delta_half(sigma: SDensity) -> SDensity:
    """The canonical BV operator on half-densities: the flat Laplacian
    on the coefficient, chart by chart."""
    if sigma.weight != HALF:
        raise WeightMismatch("canonical operator acts on half-densities")
    return SDensity(HALF, _as_dressed(laplacian(sigma.coeff)))


def hat_delta(mu: ReferenceDensity, f: SuperFunction) -> SuperFunction:
    """Conjugate the canonical operator by mu^{1/2}: f is sent to
    Delta(f mu^{1/2}) mu^{-1/2}, computed through e^{S/2} dressings."""
    _check_table(mu, f)
    table = mu.table
    one = SuperFunction.one(table)
    up = DressedFunction(one, mu.logfactor.scale(HALF))
    down = DressedFunction(one, mu.logfactor.scale(-HALF))
    out = _as_dressed(_as_dressed(laplacian(DressedFunction(f) * up)) * down)
    if not out.exponent.is_zero():
        raise NotExpressible("conjugated Laplacian left a residual exponent")
    return out.base


def check_half_density_closed(mu: ReferenceDensity) -> bool:
    """Whether Delta kills mu^{1/2}; agrees with is_compatible."""
    table = mu.table
    half = SDensity(
        HALF, DressedFunction(SuperFunction.one(table),
                              mu.logfactor.scale(HALF)))
    return canonical_delta_half(half).is_zero()
