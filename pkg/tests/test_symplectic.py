"""Bracket, Laplacian, Hamiltonian fields: pinned values and identities."""

from fractions import Fraction
from random import Random

import pytest

from bvcalc.naive import n_bracket, n_laplacian, n_normalize
from bvcalc.randgen import (
    random_homogeneous_vector_field, random_superfunction,
)
from bvcalc.rational import Poly, RatFn
from bvcalc.superalg import (
    EVEN, ODD, DressedFunction, SuperFunction, pattern_table, standard_table,
)
from bvcalc.symplectic import (
    SuperVectorField, bv_bracket, commutator_vf, divergence_standard,
    hamiltonian_vf, laplacian,
)

from test_superalg import gens, naive_ctx, sf_to_terms, word_sf

F = Fraction


class TestPinnedValues:
    def setup_method(self):
        self.t = standard_table(2)
        self.q1, self.q2, self.p1, self.p2 = gens(
            self.t, "q1", "q2", "p1", "p2")

    def test_fundamental_brackets(self):
        one = SuperFunction.one(self.t)
        assert bv_bracket(self.q1, self.p1) == -one
        assert bv_bracket(self.p1, self.q1) == one
        assert bv_bracket(self.q1, self.q1).is_zero()
        assert bv_bracket(self.p1, self.p1).is_zero()
        assert bv_bracket(self.q1, self.p2).is_zero()
        assert bv_bracket(self.q1, self.q2).is_zero()

    def test_bracket_of_function_with_itself(self):
        f = self.q1 * self.p1  # odd: one odd factor
        assert bv_bracket(f, f).is_zero()
        t3 = standard_table(3)
        q1, q2, p1, p2, p3 = gens(t3, "q1", "q2", "p1", "p2", "p3")
        s = q1 * p1 * p2 + q2 * p1 * p3  # even, (s, s) nonzero
        assert bv_bracket(s, s) == (q2 * p1 * p2 * p3).scale(-2)

    def test_laplacian_values(self):
        assert laplacian(self.q1 * self.p1) == SuperFunction.one(self.t)
        got = laplacian(self.q1 * self.q2 * self.p1 * self.p2)
        assert got == self.q2 * self.p2 - self.q1 * self.p1

    def test_mixed_chart_brackets(self):
        t = pattern_table("oe")
        y1, y2, x1, x2 = gens(t, "y1", "y2", "x1", "x2")
        one = SuperFunction.one(t)
        assert bv_bracket(y1, x1) == -one
        assert bv_bracket(x1, y1) == one
        assert bv_bracket(x2, y2) == -one
        assert bv_bracket(y2, x2) == one

    def test_commutator_value(self):
        z = SuperFunction.zero(self.t)
        x = SuperVectorField(self.t, (self.q1, z), (z, z))
        y = SuperVectorField(self.t, (SuperFunction.one(self.t), z), (z, z))
        got = commutator_vf(x, y)
        assert got.pos_comps[0] == -SuperFunction.one(self.t)
        assert got.mom_comps[0].is_zero()

    def test_divergence_values(self):
        z = SuperFunction.zero(self.t)
        one = SuperFunction.one(self.t)
        x = SuperVectorField(self.t, (self.q1, z), (z, z))
        assert divergence_standard(x) == one
        # q1*p1 is odd, the p1-slot makes this field even: odd-generator
        # divergence terms enter with -(-1)^{|X|} = -1
        x2 = SuperVectorField(self.t, (z, z), (self.q1 * self.p1, z))
        assert divergence_standard(x2) == -self.q1


def _tables():
    return [standard_table(1), standard_table(2), standard_table(3),
            pattern_table("oe"), pattern_table("eo"), pattern_table("ee")]


class TestIdentities:
    def test_laplacian_squares_to_zero(self):
        rng = Random(11)
        for t in _tables():
            for _ in range(12):
                f = random_superfunction(rng, t)
                assert laplacian(laplacian(f)).is_zero()

    def test_product_rule(self):
        # lap(fg) = lap f g + (-1)^{|f|} f lap g + (-1)^{|f|+1} (f, g)
        rng = Random(12)
        for t in _tables():
            for _ in range(10):
                for par in (EVEN, ODD):
                    f = random_superfunction(rng, t, parity=par)
                    g = random_superfunction(rng, t)
                    sf = 1 if par == EVEN else -1
                    lhs = laplacian(f * g)
                    rhs = (laplacian(f) * g + (f * laplacian(g)).scale(sf)
                           + bv_bracket(f, g).scale(-sf))
                    assert lhs == rhs

    def test_bracket_symmetry(self):
        rng = Random(13)
        for t in _tables():
            for _ in range(10):
                fp, gp = rng.randrange(2), rng.randrange(2)
                f = random_superfunction(rng, t, parity=fp)
                g = random_superfunction(rng, t, parity=gp)
                sign = -1 if ((fp + 1) * (gp + 1)) & 1 else 1
                assert bv_bracket(f, g) == bv_bracket(g, f).scale(-sign)

    def test_bracket_leibniz(self):
        rng = Random(14)
        for t in _tables():
            for _ in range(8):
                fp, gp = rng.randrange(2), rng.randrange(2)
                f = random_superfunction(rng, t, parity=fp)
                g = random_superfunction(rng, t, parity=gp)
                h = random_superfunction(rng, t)
                sign = -1 if ((fp + 1) * gp) & 1 else 1
                lhs = bv_bracket(f, g * h)
                rhs = bv_bracket(f, g) * h + (g * bv_bracket(f, h)).scale(sign)
                assert lhs == rhs

    def test_bracket_jacobi(self):
        rng = Random(15)
        for t in _tables():
            for _ in range(6):
                fp, gp = rng.randrange(2), rng.randrange(2)
                f = random_superfunction(rng, t, parity=fp, max_terms=2)
                g = random_superfunction(rng, t, parity=gp, max_terms=2)
                h = random_superfunction(rng, t, max_terms=2)
                sign = -1 if ((fp + 1) * (gp + 1)) & 1 else 1
                lhs = bv_bracket(f, bv_bracket(g, h))
                rhs = (bv_bracket(bv_bracket(f, g), h)
                       + bv_bracket(g, bv_bracket(f, h)).scale(sign))
                assert lhs == rhs

    def test_bracket_via_hamiltonian_field(self):
        rng = Random(16)
        for t in _tables():
            for _ in range(8):
                fp = rng.randrange(2)
                f = random_superfunction(rng, t, parity=fp)
                g = random_superfunction(rng, t)
                sign = 1 if fp else -1
                assert bv_bracket(f, g) == hamiltonian_vf(f)(g).scale(sign)

    def test_hamiltonian_of_bracket(self):
        rng = Random(17)
        for t in _tables():
            for _ in range(6):
                fp, gp = rng.randrange(2), rng.randrange(2)
                f = random_superfunction(rng, t, parity=fp, max_terms=2)
                g = random_superfunction(rng, t, parity=gp, max_terms=2)
                assert commutator_vf(hamiltonian_vf(f), hamiltonian_vf(g)) == \
                    hamiltonian_vf(bv_bracket(f, g))

    def test_laplacian_is_half_divergence(self):
        rng = Random(18)
        for t in _tables():
            for _ in range(8):
                f = random_superfunction(rng, t)
                assert divergence_standard(hamiltonian_vf(f)) == \
                    laplacian(f).scale(2)

    def test_commutator_is_derivation(self):
        rng = Random(19)
        t = standard_table(2)
        for _ in range(8):
            xp, yp = rng.randrange(2), rng.randrange(2)
            x = random_homogeneous_vector_field(rng, t, xp)
            y = random_homogeneous_vector_field(rng, t, yp)
            g = random_superfunction(rng, t)
            sign = -1 if (xp and yp) else 1
            assert commutator_vf(x, y)(g) == x(y(g)) - y(x(g)).scale(sign)


class TestOracleAgreement:
    def test_laplacian_and_bracket_match_naive(self):
        for t in (standard_table(2), pattern_table("oe")):
            parity, order, pairs = naive_ctx(t)
            names = list(t.generator_names())
            words = [(), (names[1],), (names[0], names[1]),
                     (names[2], names[3]), (names[0], names[3]),
                     (names[0], names[1], names[2], names[3]),
                     (names[1], names[3], names[0])]
            for w1 in words:
                f1 = word_sf(t, w1)
                raw1 = [(F(1), w1)]
                got = n_normalize(sf_to_terms(laplacian(f1)), parity, order)
                want = n_normalize(n_laplacian(raw1, pairs, parity),
                                   parity, order)
                assert got == want, ("lap", w1)
                for w2 in words:
                    got = n_normalize(
                        sf_to_terms(bv_bracket(f1, word_sf(t, w2))),
                        parity, order)
                    want = n_normalize(
                        n_bracket(raw1, [(F(1), w2)], pairs, parity),
                        parity, order)
                    assert got == want, ("bracket", w1, w2)


class TestDressedOperators:
    def test_dressed_laplacian_formula(self):
        # lap(b e^E) = [lap b + sum_i (d^i b d_i E + d_i b d^i E)] e^E
        rng = Random(20)
        for t in (standard_table(2), pattern_table("oe"), standard_table(3)):
            for _ in range(6):
                b = random_superfunction(rng, t)
                expo = RatFn(random_poly_even(rng, t))
                d = DressedFunction(b, expo)
                got = laplacian(d)
                esf = SuperFunction.from_rat(t, expo)
                corr = SuperFunction.zero(t)
                for i in range(t.n):
                    pos, mom = t.position(i), t.momentum(i)
                    corr = corr + b.left_deriv(mom) * esf.left_deriv(pos)
                    corr = corr + b.left_deriv(pos) * esf.left_deriv(mom)
                want = DressedFunction(laplacian(b) + corr, expo)
                assert got == want

    def test_dressed_bracket_exponent_adds(self):
        t = standard_table(2)
        q1, p1 = gens(t, "q1", "p1")
        a = DressedFunction(q1, RatFn(Poly.var(2, 0)))
        b = DressedFunction(p1, RatFn(Poly.var(2, 1)))
        got = bv_bracket(a, b)
        assert got.exponent == RatFn(Poly.var(2, 0) + Poly.var(2, 1))


def random_poly_even(rng, table):
    from bvcalc.randgen import random_poly
    return random_poly(rng, table.nvars, max_terms=2, max_deg=2)
