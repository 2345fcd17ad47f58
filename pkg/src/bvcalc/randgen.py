"""Seeded random inputs for property checks.

All generators take an explicit random.Random so suite runs are reproducible
from a single seed. Sizes are kept small on purpose: coefficients of degree
a few, a handful of terms, so exact arithmetic stays fast.
"""

from __future__ import annotations

from fractions import Fraction
from random import Random

from .forms import SuperForm, d_of_function
from .rational import Poly, RatFn
from .superalg import EVEN, ODD, GeneratorTable, SuperFunction
from .symplectic import SuperVectorField


def random_fraction(rng: Random, span: int = 3) -> Fraction:
    num = rng.randint(-span, span)
    return Fraction(num if num else 1, rng.randint(1, 2))


def random_poly(rng: Random, nvars: int, max_terms: int = 3,
                max_deg: int = 2) -> Poly:
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        budget = rng.randint(0, max_deg)
        exps = [0] * nvars
        for _ in range(budget):
            exps[rng.randrange(nvars)] += 1
        terms[tuple(exps)] = random_fraction(rng)
    return Poly(nvars, terms)


def random_ratfn(rng: Random, nvars: int, max_terms: int = 3,
                 max_deg: int = 2, with_denominator: bool = False) -> RatFn:
    num = random_poly(rng, nvars, max_terms, max_deg)
    if not with_denominator or rng.random() < 0.5:
        return RatFn(num)
    den = Poly.one(nvars)
    v = rng.randrange(nvars)
    den = den + Poly.var(nvars, v) ** rng.randint(1, 2)
    return RatFn(num, den)


def random_superfunction(rng: Random, table: GeneratorTable,
                         max_terms: int = 3, max_deg: int = 2,
                         parity=None, with_denominator: bool = False
                         ) -> SuperFunction:
    """Random superfunction, optionally parity-homogeneous."""
    n = table.n
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        words = list(range(n))
        rng.shuffle(words)
        size = rng.randint(0, n)
        if parity is not None:
            want = parity & 1
            if size & 1 != want:
                size = size + 1 if size + 1 <= n else size - 1
            if size < 0 or (size & 1) != want:
                continue
        w = tuple(sorted(words[:size]))
        c = random_ratfn(rng, table.nvars, max_terms=2, max_deg=max_deg,
                         with_denominator=with_denominator)
        if w in terms:
            terms[w] = terms[w] + c
        else:
            terms[w] = c
    f = SuperFunction(table, terms)
    if parity is not None and f.is_zero():
        # retry rather than hand back an ambiguous zero
        return random_superfunction(rng, table, max_terms, max_deg, parity,
                                    with_denominator)
    return f


def random_even_superfunction(rng: Random, table: GeneratorTable,
                              max_terms: int = 3, max_deg: int = 2
                              ) -> SuperFunction:
    return random_superfunction(rng, table, max_terms, max_deg, parity=EVEN)


def random_vector_field(rng: Random, table: GeneratorTable,
                        max_terms: int = 2, max_deg: int = 2
                        ) -> SuperVectorField:
    pos = [random_superfunction(rng, table, max_terms, max_deg)
           for _ in range(table.n)]
    mom = [random_superfunction(rng, table, max_terms, max_deg)
           for _ in range(table.n)]
    return SuperVectorField(table, pos, mom)


def random_homogeneous_vector_field(rng: Random, table: GeneratorTable,
                                    par: int, max_terms: int = 2,
                                    max_deg: int = 2) -> SuperVectorField:
    pos = []
    mom = []
    for i in range(table.n):
        pp = (par + table.parity_of(table.position(i))) & 1
        mp = (par + table.parity_of(table.momentum(i))) & 1
        pos.append(random_superfunction(rng, table, max_terms, max_deg,
                                        parity=pp))
        mom.append(random_superfunction(rng, table, max_terms, max_deg,
                                        parity=mp))
    return SuperVectorField(table, pos, mom)


def random_pattern(rng: Random, n: int) -> str:
    return "".join(rng.choice("oe") for _ in range(n))


def random_form(rng: Random, table: GeneratorTable, max_words: int = 2,
                max_deg: int = 2) -> SuperForm:
    """Sum of a 0-form and a few wedges of exact 1-forms.

    Wedging differentials of random functions exercises mixed eword and
    oword blocks without enumerating keys by hand.
    """
    out = SuperForm.from_function(random_superfunction(rng, table,
                                                       max_deg=max_deg))
    for _ in range(rng.randrange(1, max_words + 1)):
        part = SuperForm.from_function(
            random_superfunction(rng, table, max_terms=2, max_deg=max_deg))
        for _ in range(rng.randrange(1, 3)):
            part = part * d_of_function(
                random_superfunction(rng, table, max_terms=2,
                                     max_deg=max_deg))
        out = out + part
    return out


def random_soul_even(rng: Random, table: GeneratorTable,
                     max_deg: int = 2) -> SuperFunction:
    f = random_superfunction(rng, table, max_terms=2, max_deg=max_deg,
                             parity=EVEN)
    return f.soul()


def random_supermatrix(rng: Random, table: GeneratorTable):
    """Block matrix with invertible even-even and odd-odd bodies.

    Diagonal entries carry a nonzero constant body, strictly upper
    entries may carry body terms, everything else is even soul or odd,
    so both block determinants keep a nonzero constant body by
    triangularity.
    """
    from .maps import SuperMatrix
    n = table.n
    consts = (1, 2, 3, -1, -2)

    def even_block():
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                e = random_soul_even(rng, table)
                if i == j:
                    e = e + SuperFunction.const(table, rng.choice(consts))
                elif i < j and rng.random() < 0.5:
                    e = e + SuperFunction.from_rat(
                        table, random_ratfn(rng, table.nvars, max_terms=2))
                row.append(e)
            rows.append(row)
        return rows

    def odd_block():
        return [[random_superfunction(rng, table, max_terms=2, parity=ODD)
                 if rng.random() < 0.7 else SuperFunction.zero(table)
                 for _ in range(n)] for _ in range(n)]

    return SuperMatrix(table, even_block(), odd_block(), odd_block(),
                       even_block())


def random_pair_scaling(rng: Random, table: GeneratorTable):
    """Rescale each pair by a nonzero constant; symplectic for any parity."""
    from .maps import ChartMap
    consts = (1, 2, 3, Fraction(1, 2), -1)

    def exprs_of(cs):
        out = {}
        for i, c in enumerate(cs):
            out[table.position(i)] = SuperFunction.generator(
                table, table.position(i)).scale(c)
            out[table.momentum(i)] = SuperFunction.generator(
                table, table.momentum(i)).scale(Fraction(1) / Fraction(c))
        return out

    cs = [rng.choice(consts) for _ in range(table.n)]
    inv = ChartMap(table, table,
                   exprs_of([Fraction(1) / Fraction(c) for c in cs]))
    return ChartMap(table, table, exprs_of(cs), inverse=inv)


def random_odd_shift(rng: Random, table: GeneratorTable):
    """Shift along the Hamiltonian field of f(other evens) * odd generator.

    Keeping the even factor clear of the chosen pair makes the flow
    truncate at first order, so the declared inverse is exact.
    """
    from .maps import odd_shift
    i = rng.randrange(table.n)
    theta = table.odd_name(i)
    partner_slot = table.even_slot(table.even_name(i))
    allowed = [table.even_slot(table.even_name(j)) for j in range(table.n)
               if j != i]
    allowed += [table.even_slot(p) for p in table.params]
    coeff = Poly.const(table.nvars, random_fraction(rng))
    for _ in range(rng.randint(0, 2)):
        if not allowed:
            break
        coeff = coeff * Poly.var(table.nvars, rng.choice(allowed))
    h = SuperFunction.generator(table, theta).scale(RatFn(coeff))
    assert partner_slot not in coeff.variables()
    return odd_shift(table, h)


def random_unitriangular_lift(rng: Random, table: GeneratorTable):
    """Cotangent lift of one shear q_j -> q_j + f(q_k), k > j."""
    from .maps import cotangent_lift, identity_map
    n = table.n
    if n < 2:
        return identity_map(table)
    j = rng.randrange(n - 1)
    k = rng.randrange(j + 1, n)
    qj, qk = table.position(j), table.position(k)
    shift = SuperFunction.generator(table, qk) ** rng.randint(1, 2)
    shift = shift.scale(random_fraction(rng))
    gj = SuperFunction.generator(table, qj)
    return cotangent_lift(table, {qj: gj + shift}, {qj: gj - shift})


def random_symplectomorphism(rng: Random, table: GeneratorTable):
    """Compose a few symplectic layers drawn from the map families."""
    from .maps import compose, identity_map, linear_lift
    lifts_ok = all(table.position_parity(i) == EVEN for i in range(table.n))
    out = identity_map(table)
    for _ in range(rng.randint(1, 3)):
        kind = rng.randrange(4 if lifts_ok else 2)
        if kind == 0:
            layer = random_pair_scaling(rng, table)
        elif kind == 1:
            layer = random_odd_shift(rng, table)
        elif kind == 2:
            layer = random_unitriangular_lift(rng, table)
        else:
            n = table.n
            m = [[Fraction(0)] * n for _ in range(n)]
            for i in range(n):
                m[i][i] = Fraction(rng.choice((1, 2, -1)))
                for j in range(i + 1, n):
                    m[i][j] = random_fraction(rng)
            layer = linear_lift(table, m)
        out = compose(layer, out)
    return out


def random_base_ratfn(rng: Random, table: GeneratorTable,
                      max_terms: int = 2, max_deg: int = 2) -> RatFn:
    """Polynomial in positions and parameters only (even base chart)."""
    slots = sorted({table.even_slot(table.position(i))
                    for i in range(table.n)}
                   | {table.even_slot(p) for p in table.params})
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        exps = [0] * table.nvars
        for _ in range(rng.randint(0, max_deg)):
            exps[rng.choice(slots)] += 1
        key = tuple(exps)
        c = random_fraction(rng)
        terms[key] = terms.get(key, 0) + c
    return RatFn(Poly(table.nvars, terms))


def random_base_form(rng: Random, table: GeneratorTable,
                     with_exponent: bool = False):
    """Base-chart differential form with a few random monomial terms."""
    from .cotangent import BaseForm
    n = table.n
    keys = []
    for mask in range(1 << n):
        keys.append(tuple(i for i in range(n) if mask & (1 << i)))
    terms = {}
    for _ in range(rng.randint(1, 3)):
        key = rng.choice(keys)
        c = random_base_ratfn(rng, table)
        terms[key] = terms[key] + c if key in terms else c
    expo = random_base_ratfn(rng, table) if with_exponent else None
    return BaseForm(table, terms, expo)
