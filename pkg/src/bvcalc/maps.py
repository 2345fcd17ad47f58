"""Coordinate changes between charts and their Berezinians.

A ChartMap stores each target generator as a function of the source
generators.  Inverses are never computed: a map that needs one carries
a declared inverse, and the constructor checks by exact substitution
that the two compose to the identity on every generator.

The Jacobian is laid out with rows indexed by source generators and
columns by target generators, J[nu][mu] = left d_nu of the image of
z^mu, so composition multiplies as

    J(psi o phi) = J(phi) . phi^*(J(psi)).

Block structure groups even generators before odd ones; the
Berezinian of an invertible block matrix is

    Ber(M) = det(A - B D^-1 C) det(D)^-1.

Both determinants have commuting even entries, so cofactor expansion
is exact, and D is inverted through its adjugate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (InverseMismatch, NotExpressible, NotSymplectic,
                     ParityMismatch, TableMismatch, UnknownGenerator)
from .rational import RatFn
from .superalg import (EVEN, DressedFunction, GeneratorTable, SuperFunction,
                       log_one_plus)
from .symplectic import SuperVectorField, hamiltonian_vf
from .forms import omega_form, pullback
from .densities import ReferenceDensity, SDensity, delta_s, is_compatible


class ChartMap:
    """Target coordinates written as functions of source coordinates."""

    __slots__ = ("source", "target", "exprs", "inverse")

    def __init__(self, source: GeneratorTable, target: GeneratorTable,
                 exprs: dict, inverse: "ChartMap" = None):
        if source.n != target.n:
            raise TableMismatch("charts have different numbers of pairs")
        names = set(target.generator_names())
        for key in exprs:
            if key not in names:
                raise UnknownGenerator(key)
        full = {}
        for name in target.generator_names():
            img = exprs.get(name)
            if img is None:
                # unmapped generators keep their name across the charts
                img = SuperFunction.generator(source, name)
            elif img.table != source:
                raise TableMismatch(f"image of {name} is not over the source")
            if not img.is_zero() and img.parity() != target.parity_of(name):
                raise ParityMismatch(f"image of {name} has the wrong parity")
            full[name] = img
        self.source = source
        self.target = target
        self.exprs = full
        self.inverse = inverse
        if inverse is not None:
            self._verify_inverse(inverse)
            if inverse.inverse is None:
                inverse.inverse = self

    def _verify_inverse(self, inv: "ChartMap") -> None:
        if inv.source != self.target or inv.target != self.source:
            raise TableMismatch("inverse runs between the wrong charts")
        for g in self.source.generator_names():
            got = inv.exprs[g].substitute(self.exprs, self.source)
            if got != SuperFunction.generator(self.source, g):
                raise InverseMismatch(f"inverse fails on {g}")
        for g in self.target.generator_names():
            got = self.exprs[g].substitute(inv.exprs, self.target)
            if got != SuperFunction.generator(self.target, g):
                raise InverseMismatch(f"inverse fails on {g}")

    def pullback(self, g: SuperFunction) -> SuperFunction:
        """Compose a target function with the map."""
        if g.table != self.target:
            raise TableMismatch("pullback wants a function on the target")
        return g.substitute(self.exprs, self.source)

    def __repr__(self):
        body = ", ".join(f"{k} -> {v!r}" for k, v in self.exprs.items())
        return f"ChartMap({body})"


def identity_map(table: GeneratorTable) -> ChartMap:
    m = ChartMap(table, table, {})
    m.inverse = m
    return m


def compose(outer: ChartMap, inner: ChartMap) -> ChartMap:
    """The map inner-then-outer, with a declared inverse when both have one."""
    if inner.target != outer.source:
        raise TableMismatch("maps do not chain")
    exprs = {name: outer.exprs[name].substitute(inner.exprs, inner.source)
             for name in outer.target.generator_names()}
    inv = None
    if outer.inverse is not None and inner.inverse is not None:
        inv_exprs = {
            name: inner.inverse.exprs[name].substitute(outer.inverse.exprs,
                                                       outer.target)
            for name in inner.source.generator_names()}
        inv = ChartMap(outer.target, inner.source, inv_exprs)
    return ChartMap(inner.source, outer.target, exprs, inverse=inv)


# --- block matrices over a chart ---------------------------------------


def _entry_parity_ok(e: SuperFunction, want: int) -> bool:
    return e.is_zero() or e.parity() == want


class SuperMatrix:
    """Even/odd block matrix with entries in one function algebra.

    Blocks a and d hold even entries, b and c odd ones.  Multiplication
    is the plain block product; entry order inside each product is kept,
    which is what carries the signs for the odd blocks.
    """

    __slots__ = ("table", "a", "b", "c", "d")

    def __init__(self, table: GeneratorTable, a, b, c, d):
        n = table.n
        a = tuple(tuple(r) for r in a)
        b = tuple(tuple(r) for r in b)
        c = tuple(tuple(r) for r in c)
        d = tuple(tuple(r) for r in d)
        for block in (a, b, c, d):
            if len(block) != n or any(len(r) != n for r in block):
                raise ValueError("blocks must be square of size table.n")
            for row in block:
                for e in row:
                    if e.table != table:
                        raise TableMismatch("entry over a different table")
        for block, want in ((a, 0), (d, 0), (b, 1), (c, 1)):
            for row in block:
                for e in row:
                    if not _entry_parity_ok(e, want):
                        raise ParityMismatch("entry parity breaks the block")
        self.table = table
        self.a, self.b, self.c, self.d = a, b, c, d

    @classmethod
    def identity(cls, table: GeneratorTable) -> "SuperMatrix":
        one = SuperFunction.one(table)
        zero = SuperFunction.zero(table)
        n = table.n
        eye = [[one if i == j else zero for j in range(n)] for i in range(n)]
        z = [[zero] * n for _ in range(n)]
        return cls(table, eye, z, z, eye)

    def __mul__(self, other):
        if not isinstance(other, SuperMatrix):
            return NotImplemented
        if other.table != self.table:
            raise TableMismatch("matrices over different tables")
        a = _matadd(_matmul(self.a, other.a), _matmul(self.b, other.c))
        b = _matadd(_matmul(self.a, other.b), _matmul(self.b, other.d))
        c = _matadd(_matmul(self.c, other.a), _matmul(self.d, other.c))
        d = _matadd(_matmul(self.c, other.b), _matmul(self.d, other.d))
        return SuperMatrix(self.table, a, b, c, d)

    def substitute(self, images: dict, target: GeneratorTable) -> "SuperMatrix":
        """Apply a substitution to every entry."""
        def conv(block):
            return [[e.substitute(images, target) for e in row]
                    for row in block]
        return SuperMatrix(target, conv(self.a), conv(self.b),
                           conv(self.c), conv(self.d))

    def __eq__(self, other):
        if not isinstance(other, SuperMatrix):
            return NotImplemented
        return (self.table == other.table and self.a == other.a
                and self.b == other.b and self.c == other.c
                and self.d == other.d)

    def __hash__(self):
        return hash((self.table, self.a, self.b, self.c, self.d))

    def __repr__(self):
        return (f"SuperMatrix(a={self.a!r}, b={self.b!r}, "
                f"c={self.c!r}, d={self.d!r})")


def _matmul(x, y):
    n = len(x)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = None
            for k in range(n):
                term = x[i][k] * y[k][j]
                acc = term if acc is None else acc + term
            row.append(acc)
        out.append(row)
    return out


def _matadd(x, y):
    return [[a + b for a, b in zip(rx, ry)] for rx, ry in zip(x, y)]


def _matsub(x, y):
    return [[a - b for a, b in zip(rx, ry)] for rx, ry in zip(x, y)]


def _det(rows, table: GeneratorTable) -> SuperFunction:
    # entries are even, hence central; cofactor expansion along row 0
    k = len(rows)
    if k == 0:
        return SuperFunction.one(table)
    if k == 1:
        return rows[0][0]
    out = SuperFunction.zero(table)
    for j in range(k):
        e = rows[0][j]
        if e.is_zero():
            continue
        minor = [list(r[:j]) + list(r[j + 1:]) for r in rows[1:]]
        term = e * _det(minor, table)
        out = out + (term if j % 2 == 0 else -term)
    return out


def _adjugate(rows, table: GeneratorTable):
    k = len(rows)
    adj = []
    for i in range(k):
        arow = []
        for j in range(k):
            minor = [list(row[:i]) + list(row[i + 1:])
                     for r, row in enumerate(rows) if r != j]
            d = _det(minor, table)
            arow.append(d if (i + j) % 2 == 0 else -d)
        adj.append(arow)
    return adj


def jacobian(psi: ChartMap) -> SuperMatrix:
    """Left-derivative matrix of the map, rows source, columns target."""
    src, tgt = psi.source, psi.target
    n = src.n
    evens_s = [src.even_name(i) for i in range(n)]
    odds_s = [src.odd_name(i) for i in range(n)]
    evens_t = [tgt.even_name(i) for i in range(n)]
    odds_t = [tgt.odd_name(i) for i in range(n)]

    def block(rows, cols):
        return [[psi.exprs[m].left_deriv(nu) for m in cols] for nu in rows]

    return SuperMatrix(src, block(evens_s, evens_t), block(evens_s, odds_t),
                       block(odds_s, evens_t), block(odds_s, odds_t))


def berezinian(m: SuperMatrix) -> SuperFunction:
    """det(A - B D^-1 C) det(D)^-1 for an invertible block matrix."""
    table = m.table
    dd = _det(m.d, table)
    if dd.body().is_zero():
        raise NotExpressible("odd-odd block has no invertible body")
    ddinv = dd.invert()
    adj = _adjugate(m.d, table)
    dinv = [[e * ddinv for e in row] for row in adj]
    s = _matsub(m.a, _matmul(_matmul(m.b, dinv), m.c))
    return _det(s, table) * ddinv


def berezinian_of_map(psi: ChartMap) -> SuperFunction:
    return berezinian(jacobian(psi))


# --- pushforwards -------------------------------------------------------


def _need_inverse(psi: ChartMap) -> ChartMap:
    if psi.inverse is None:
        raise NotExpressible("pushforward needs a declared inverse")
    return psi.inverse


def pushforward_function(psi: ChartMap, f: SuperFunction) -> SuperFunction:
    """Rewrite a source function in target coordinates."""
    inv = _need_inverse(psi)
    if f.table != psi.source:
        raise TableMismatch("function is not over the source chart")
    return f.substitute(inv.exprs, psi.target)


def pushforward_dressed(psi: ChartMap, d: DressedFunction) -> DressedFunction:
    base = pushforward_function(psi, d.base)
    if d.exponent.is_zero():
        return DressedFunction(base)
    esf = SuperFunction.from_rat(psi.source, d.exponent)
    return DressedFunction(base, pushforward_function(psi, esf))


def pushforward_vf(psi: ChartMap, x: SuperVectorField) -> SuperVectorField:
    """Transport a vector field so that (psi_* x)(g) = psi_*(x(g o psi))."""
    if x.table != psi.source:
        raise TableMismatch("field is not over the source chart")
    tgt = psi.target
    pos = [pushforward_function(psi, x(psi.exprs[tgt.position(i)]))
           for i in range(tgt.n)]
    mom = [pushforward_function(psi, x(psi.exprs[tgt.momentum(i)]))
           for i in range(tgt.n)]
    return SuperVectorField(tgt, pos, mom)


def pushforward_sdensity(psi: ChartMap, sigma: SDensity) -> SDensity:
    """Transport a weight-s density, picking up Ber^(-s)."""
    ber = berezinian(jacobian(psi))
    bert = pushforward_function(psi, ber)
    factor = bert.pow_fraction(-sigma.weight)
    coeff = pushforward_dressed(psi, sigma.coeff) * factor
    return SDensity(sigma.weight, coeff)


def pushforward_density(psi: ChartMap, mu: ReferenceDensity) -> ReferenceDensity:
    """Transport a reference density, staying in the exponential class.

    The transported coefficient is (psi_* Ber)^-1 e^(psi_* S); the result
    is again factor * e^S' only when that Berezinian has constant body,
    which holds for the unimodular and linear maps this package builds.
    """
    ber = berezinian(jacobian(psi))
    h = pushforward_function(psi, ber.invert())
    b = h.body()
    if not b.is_const():
        raise NotExpressible("pushforward leaves the exponential class")
    c2 = b.const_value()
    nu = h.scale(Fraction(1) / c2) - SuperFunction.one(psi.target)
    s_new = pushforward_function(psi, mu.logfactor) + log_one_plus(nu)
    return ReferenceDensity(mu.factor * c2, s_new)


# --- symplectic checks ---------------------------------------------------


def is_symplectomorphism(psi: ChartMap) -> bool:
    """Does the pullback fix the canonical two-form, exactly?"""
    pulled = pullback(omega_form(psi.target), psi.exprs, psi.source)
    return pulled == omega_form(psi.source)


@dataclass(frozen=True)
class EquivarianceReport:
    cases: tuple
    compatibility_preserved: bool

    @property
    def ok(self) -> bool:
        return self.compatibility_preserved and all(self.cases)


def verify_equivariance(psi: ChartMap, mu: ReferenceDensity,
                        sigmas) -> EquivarianceReport:
    """Check that the weighted operators commute with the pushforward.

    For each test density sigma the two routes
        psi_*(Delta^(s)_mu sigma)   and   Delta^(s)_(psi_* mu)(psi_* sigma)
    must agree exactly; compatibility of mu must also survive transport.
    """
    if not is_symplectomorphism(psi):
        raise NotSymplectic("equivariance only holds for symplectomorphisms")
    mu2 = pushforward_density(psi, mu)
    results = []
    for sigma in sigmas:
        lhs = pushforward_sdensity(psi, delta_s(mu, sigma))
        rhs = delta_s(mu2, pushforward_sdensity(psi, sigma))
        results.append(lhs == rhs)
    compat = is_compatible(mu) == is_compatible(mu2)
    return EquivarianceReport(tuple(results), compat)


# --- map constructors ----------------------------------------------------


def _ratfn_matrix_inverse(rows, nvars: int):
    k = len(rows)
    one = RatFn.const(nvars, 1)
    zero = RatFn.zero(nvars)
    a = [list(r) for r in rows]
    inv = [[one if i == j else zero for j in range(k)] for i in range(k)]
    for col in range(k):
        piv = next((r for r in range(col, k) if not a[r][col].is_zero()), None)
        if piv is None:
            raise NotExpressible("matrix has no inverse over the field")
        a[col], a[piv] = a[piv], a[col]
        inv[col], inv[piv] = inv[piv], inv[col]
        s = a[col][col].inverse()
        a[col] = [e * s for e in a[col]]
        inv[col] = [e * s for e in inv[col]]
        for r in range(k):
            if r == col or a[r][col].is_zero():
                continue
            f = a[r][col]
            a[r] = [x - f * y for x, y in zip(a[r], a[col])]
            inv[r] = [x - f * y for x, y in zip(inv[r], inv[col])]
    return inv


def _check_even_positions(table: GeneratorTable) -> None:
    for i in range(table.n):
        if table.position_parity(i) != EVEN:
            raise ParityMismatch("lift constructors want even positions")


def _base_only(table: GeneratorTable, f: SuperFunction) -> None:
    allowed = {table.even_slot(table.position(i)) for i in range(table.n)}
    allowed |= {table.even_slot(p) for p in table.params}
    if set(f.terms) - {()}:
        raise ParityMismatch("base image must not involve odd generators")
    for coeff in f.terms.values():
        used = coeff.num.variables() | coeff.den.variables()
        if not used <= allowed:
            raise NotExpressible("base image must depend on positions only")


def _lift_exprs(table: GeneratorTable, base: dict) -> dict:
    """Fiber part of a cotangent lift: p'_j = sum_i K[j][i] p_i, K = dphi^-1."""
    n = table.n
    qs = [table.position(i) for i in range(n)]
    ps = [table.momentum(i) for i in range(n)]
    images = []
    for j in range(n):
        img = base.get(qs[j])
        if img is None:
            img = SuperFunction.generator(table, qs[j])
        _base_only(table, img)
        images.append(img)
    dphi = [[images[j].left_deriv(qs[l]).body() for j in range(n)]
            for l in range(n)]
    kmat = _ratfn_matrix_inverse(dphi, table.nvars)
    exprs = {}
    for j in range(n):
        exprs[qs[j]] = images[j]
        acc = SuperFunction.zero(table)
        for i in range(n):
            acc = acc + SuperFunction.generator(table, ps[i]).scale(kmat[j][i])
        exprs[ps[j]] = acc
    return exprs


def cotangent_lift(table: GeneratorTable, base: dict,
                   base_inverse: dict) -> ChartMap:
    """Lift a position-space substitution to the full chart.

    base maps position names to their images (functions of positions
    alone); base_inverse must invert it exactly, which the constructor
    checks once the fiber parts are attached.
    """
    _check_even_positions(table)
    inv = ChartMap(table, table, _lift_exprs(table, base_inverse))
    return ChartMap(table, table, _lift_exprs(table, base), inverse=inv)


def linear_lift(table: GeneratorTable, m) -> ChartMap:
    """Cotangent lift of the linear position map q'_j = sum_i m[j][i] q_i."""
    _check_even_positions(table)
    n = table.n
    rows = [[RatFn.const(table.nvars, Fraction(e)) for e in r] for r in m]
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ValueError("matrix must be square of size table.n")
    minv = _ratfn_matrix_inverse(rows, table.nvars)

    def base_of(mat):
        out = {}
        for j in range(n):
            acc = SuperFunction.zero(table)
            for i in range(n):
                gen = SuperFunction.generator(table, table.position(i))
                acc = acc + gen.scale(mat[j][i])
            out[table.position(j)] = acc
        return out

    inv = ChartMap(table, table, _lift_exprs(table, base_of(minv)))
    return ChartMap(table, table, _lift_exprs(table, base_of(rows)),
                    inverse=inv)


def odd_shift(table: GeneratorTable, h: SuperFunction) -> ChartMap:
    """Time-one flow of the Hamiltonian field of an odd function h.

    Exact only when the flow truncates at first order on generators;
    the declared-inverse check rejects any h where it does not.
    """
    if h.parity() != 1:
        raise ParityMismatch("shift generator must be odd")

    def shifted(g: SuperFunction):
        exprs = {}
        x = hamiltonian_vf(g)
        for name in table.generator_names():
            z = SuperFunction.generator(table, name)
            exprs[name] = z + x(z)
        return exprs

    inv = ChartMap(table, table, shifted(-h))
    return ChartMap(table, table, shifted(h), inverse=inv)
