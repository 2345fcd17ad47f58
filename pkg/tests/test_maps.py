"""Chart maps, Berezinians, and pushforward transport."""

from fractions import Fraction
from random import Random

import pytest

from bvcalc.densities import (HALF, ReferenceDensity, SDensity,
                              divergence, is_compatible)
from bvcalc.errors import (InverseMismatch, NotExpressible, NotSymplectic,
                           ParityMismatch, TableMismatch, UnknownGenerator)
from bvcalc.maps import (ChartMap, SuperMatrix, berezinian, compose,
                         cotangent_lift, identity_map, is_symplectomorphism,
                         jacobian, linear_lift, odd_shift,
                         pushforward_density, pushforward_function,
                         pushforward_sdensity, pushforward_vf,
                         verify_equivariance)
from bvcalc.randgen import (random_even_superfunction, random_superfunction,
                            random_supermatrix, random_symplectomorphism,
                            random_vector_field)
from bvcalc.rational import Poly, RatFn
from bvcalc.superalg import (DressedFunction, SuperFunction, pattern_table,
                             standard_table)
from bvcalc.symplectic import SuperVectorField, laplacian


def gen(table, name):
    return SuperFunction.generator(table, name)


def _tables():
    return [standard_table(1), standard_table(2), pattern_table("oe")]


class TestChartMap:
    t = standard_table(1)
    q = gen(t, "q1")
    p = gen(t, "p1")

    def test_images_must_name_target_generators(self):
        with pytest.raises(UnknownGenerator):
            ChartMap(self.t, self.t, {"nope": self.q})

    def test_images_must_live_over_source(self):
        other = standard_table(2)
        with pytest.raises(TableMismatch):
            ChartMap(self.t, self.t, {"q1": gen(other, "q1")})

    def test_images_must_match_parity(self):
        with pytest.raises(ParityMismatch):
            ChartMap(self.t, self.t, {"q1": self.p})

    def test_wrong_inverse_rejected(self):
        claimed = ChartMap(self.t, self.t, {"q1": self.q.scale(3)})
        with pytest.raises(InverseMismatch):
            ChartMap(self.t, self.t, {"q1": self.q.scale(2)},
                     inverse=claimed)

    def test_good_inverse_links_back(self):
        inv = ChartMap(self.t, self.t, {"q1": self.q.scale(Fraction(1, 2))})
        m = ChartMap(self.t, self.t, {"q1": self.q.scale(2)}, inverse=inv)
        assert m.inverse is inv
        assert inv.inverse is m

    def test_pullback(self):
        m = ChartMap(self.t, self.t, {"q1": self.q.scale(2)})
        f = self.q * self.q + self.q * self.p
        assert m.pullback(f) == (self.q * self.q).scale(4) \
            + (self.q * self.p).scale(2)
        assert identity_map(self.t).pullback(f) == f

    def test_compose_chains_substitutions(self):
        a = ChartMap(self.t, self.t, {"q1": self.q.scale(2)})
        b = ChartMap(self.t, self.t, {"q1": self.q + self.q * self.q})
        ab = compose(a, b)
        assert ab.exprs["q1"] == (self.q + self.q * self.q).scale(2)
        assert ab.exprs["p1"] == self.p

    def test_compose_carries_inverse(self):
        rng = Random(2)
        t = standard_table(2)
        m = compose(random_symplectomorphism(rng, t),
                    random_symplectomorphism(rng, t))
        assert m.inverse is not None
        for name in t.generator_names():
            roundtrip = m.inverse.exprs[name].substitute(m.exprs, t)
            assert roundtrip == gen(t, name)


class TestSuperMatrix:
    t = standard_table(1)

    def test_even_blocks_reject_odd_entries(self):
        one = SuperFunction.one(self.t)
        zero = SuperFunction.zero(self.t)
        p = gen(self.t, "p1")
        with pytest.raises(ParityMismatch):
            SuperMatrix(self.t, [[p]], [[zero]], [[zero]], [[one]])
        with pytest.raises(ParityMismatch):
            SuperMatrix(self.t, [[one]], [[one]], [[zero]], [[one]])

    def test_identity_is_neutral(self):
        rng = Random(3)
        for table in _tables():
            eye = SuperMatrix.identity(table)
            m = random_supermatrix(rng, table)
            assert eye * m == m
            assert m * eye == m


class TestJacobian:
    def test_identity_map(self):
        for table in _tables():
            assert jacobian(identity_map(table)) == SuperMatrix.identity(table)

    def test_linear_rescale(self):
        t = standard_table(1)
        j = jacobian(linear_lift(t, [[2]]))
        assert j.a[0][0] == SuperFunction.const(t, 2)
        assert j.d[0][0] == SuperFunction.const(t, Fraction(1, 2))
        assert j.b[0][0].is_zero() and j.c[0][0].is_zero()

    def test_nilpotent_shear(self):
        t = standard_table(1)
        q, p = gen(t, "q1"), gen(t, "p1")
        j = jacobian(ChartMap(t, t, {"p1": p + q * p}))
        assert j.a[0][0] == SuperFunction.one(t)
        assert j.b[0][0] == p
        assert j.c[0][0].is_zero()
        assert j.d[0][0] == SuperFunction.one(t) + q

    def test_chain_rule(self):
        rng = Random(7)
        for table in _tables():
            for _ in range(4):
                phi = random_symplectomorphism(rng, table)
                psi = random_symplectomorphism(rng, table)
                lhs = jacobian(compose(psi, phi))
                rhs = jacobian(phi) * jacobian(psi).substitute(phi.exprs,
                                                               table)
                assert lhs == rhs

    def test_chain_rule_off_the_symplectic_family(self):
        t = standard_table(1)
        q, p = gen(t, "q1"), gen(t, "p1")
        phi = ChartMap(t, t, {"q1": q.scale(3)})
        psi = ChartMap(t, t, {"p1": p + q * p})
        lhs = jacobian(compose(psi, phi))
        rhs = jacobian(phi) * jacobian(psi).substitute(phi.exprs, t)
        assert lhs == rhs


class TestBerezinian:
    def test_identity(self):
        for table in _tables():
            got = berezinian(jacobian(identity_map(table)))
            assert got == SuperFunction.one(table)

    def test_linear_rescale(self):
        t = standard_table(1)
        got = berezinian(jacobian(linear_lift(t, [[2]])))
        assert got == SuperFunction.const(t, 4)

    def test_nilpotent_shear(self):
        t = standard_table(1)
        q, p = gen(t, "q1"), gen(t, "p1")
        got = berezinian(jacobian(ChartMap(t, t, {"p1": p + q * p})))
        x0 = Poly.var(t.nvars, 0)
        expected = RatFn(Poly.one(t.nvars), Poly.one(t.nvars) + x0)
        assert got == SuperFunction.from_rat(t, expected)

    def test_triangular_lift_is_unimodular(self):
        t = standard_table(2)
        q1, q2 = gen(t, "q1"), gen(t, "q2")
        lift = cotangent_lift(t, {"q1": q1 + q2 * q2},
                              {"q1": q1 - q2 * q2})
        assert lift.exprs["p2"] == gen(t, "p2") \
            - (gen(t, "q2") * gen(t, "p1")).scale(2)
        assert berezinian(jacobian(lift)) == SuperFunction.one(t)

    def test_odd_shift_matches_divergence(self):
        # first-order flow of X_h changes the volume by 1 + div = 1 + 2 lap h
        t = standard_table(3)
        h = gen(t, "q1") * gen(t, "p1") * gen(t, "p2") * gen(t, "p3")
        got = berezinian(jacobian(odd_shift(t, h)))
        assert got == SuperFunction.one(t) + laplacian(h).scale(2)

    def test_multiplicative(self):
        rng = Random(5)
        count = 0
        for table in _tables():
            for _ in range(18):
                m1 = random_supermatrix(rng, table)
                m2 = random_supermatrix(rng, table)
                assert berezinian(m1 * m2) == berezinian(m1) * berezinian(m2)
                count += 1
        assert count >= 50

    def test_map_composition_factorizes(self):
        rng = Random(13)
        for table in _tables():
            for _ in range(3):
                phi = random_symplectomorphism(rng, table)
                psi = random_symplectomorphism(rng, table)
                lhs = berezinian(jacobian(compose(psi, phi)))
                rhs = berezinian(jacobian(psi)).substitute(phi.exprs, table) \
                    * berezinian(jacobian(phi))
                assert lhs == rhs

    def test_singular_odd_block_rejected(self):
        t = standard_table(2)
        one = SuperFunction.one(t)
        zero = SuperFunction.zero(t)
        soul = gen(t, "p1") * gen(t, "p2")
        eye = [[one, zero], [zero, one]]
        z = [[zero, zero], [zero, zero]]
        m = SuperMatrix(t, eye, z, z, [[soul, zero], [zero, one]])
        with pytest.raises(NotExpressible):
            berezinian(m)


class TestPushforward:
    t = standard_table(1)
    q = gen(t, "q1")
    p = gen(t, "p1")

    def _double(self):
        return linear_lift(self.t, [[2]])

    def test_function_images(self):
        m = self._double()
        assert pushforward_function(m, self.q) == self.q.scale(Fraction(1, 2))
        assert pushforward_function(m, self.p) == self.p.scale(2)

    def test_needs_declared_inverse(self):
        m = ChartMap(self.t, self.t, {"q1": self.q.scale(2)})
        with pytest.raises(NotExpressible):
            pushforward_function(m, self.q)

    def test_vector_field_image(self):
        m = self._double()
        dq = SuperVectorField(self.t, [SuperFunction.one(self.t)],
                              [SuperFunction.zero(self.t)])
        out = pushforward_vf(m, dq)
        assert out.pos_comps[0] == SuperFunction.const(self.t, 2)
        assert out.mom_comps[0].is_zero()

    def test_vector_field_operational_contract(self):
        rng = Random(17)
        for table in _tables():
            for _ in range(4):
                psi = random_symplectomorphism(rng, table)
                x = random_vector_field(rng, table)
                f = random_superfunction(rng, table)
                lhs = pushforward_vf(psi, x)(pushforward_function(psi, f))
                rhs = pushforward_function(psi, x(f))
                assert lhs == rhs

    def test_sdensity_weights(self):
        m = self._double()
        one = DressedFunction(SuperFunction.one(self.t))
        full = pushforward_sdensity(m, SDensity(1, one))
        assert full.weight == 1
        assert full.coeff == DressedFunction(
            SuperFunction.const(self.t, Fraction(1, 4)))
        half = pushforward_sdensity(m, SDensity(HALF, one))
        assert half.weight == HALF
        assert half.coeff == DressedFunction(
            SuperFunction.const(self.t, Fraction(1, 2)))
        flat = pushforward_sdensity(m, SDensity(0, DressedFunction(self.q)))
        assert flat.coeff == DressedFunction(self.q.scale(Fraction(1, 2)))

    def test_gaussian_coefficient_transports_exactly(self):
        m = self._double()
        expo = (self.q * self.q).scale(Fraction(-1, 2))
        sig = SDensity(HALF, DressedFunction(self.q + self.p, expo))
        out = pushforward_sdensity(m, sig)
        want_base = (self.q.scale(Fraction(1, 2))
                     + self.p.scale(2)).scale(Fraction(1, 2))
        want_expo = (self.q * self.q).scale(Fraction(-1, 8))
        assert out.weight == HALF
        assert out.coeff == DressedFunction(want_base, want_expo)

    def test_reference_density_rescale(self):
        m = self._double()
        out = pushforward_density(m, ReferenceDensity.standard(self.t))
        assert out.factor == Fraction(1, 4)
        assert out.logfactor.is_zero()

    def test_reference_density_matches_weight_one_route(self):
        rng = Random(23)
        for table in _tables():
            for _ in range(4):
                psi = random_symplectomorphism(rng, table)
                mu = ReferenceDensity(rng.choice((1, 2, -1)),
                                      random_even_superfunction(rng, table))
                via_density = pushforward_density(psi, mu)
                lhs = pushforward_sdensity(psi, SDensity(1, mu.coefficient()))
                assert lhs == SDensity(1, via_density.coefficient())

    def test_rational_lift_leaves_exponential_class(self):
        t = standard_table(1)
        x0 = Poly.var(t.nvars, 0)
        one = Poly.one(t.nvars)
        fwd = SuperFunction.from_rat(t, RatFn(x0, one + x0))
        bwd = SuperFunction.from_rat(t, RatFn(x0, one - x0))
        m = cotangent_lift(t, {"q1": fwd}, {"q1": bwd})
        assert is_symplectomorphism(m)
        with pytest.raises(NotExpressible):
            pushforward_density(m, ReferenceDensity.standard(t))
        # the Berezinian (1+q)^-4 is still a perfect square, so half
        # weights transport fine
        half = pushforward_sdensity(
            m, SDensity(HALF, DressedFunction(SuperFunction.one(t))))
        want = RatFn(one, (one - x0) ** 2)
        assert half.coeff == DressedFunction(SuperFunction.from_rat(t, want))

    def test_divergence_equivariance(self):
        rng = Random(29)
        for table in _tables():
            for _ in range(4):
                psi = random_symplectomorphism(rng, table)
                mu = ReferenceDensity(1, random_even_superfunction(rng, table))
                x = random_vector_field(rng, table)
                lhs = pushforward_function(psi, divergence(mu, x))
                rhs = divergence(pushforward_density(psi, mu),
                                 pushforward_vf(psi, x))
                assert lhs == rhs


class TestSymplectomorphism:
    def test_families_preserve_the_form(self):
        rng = Random(31)
        t2 = standard_table(2)
        q1, q2 = gen(t2, "q1"), gen(t2, "q2")
        assert is_symplectomorphism(linear_lift(t2, [[2, 1], [1, 1]]))
        assert is_symplectomorphism(
            cotangent_lift(t2, {"q1": q1 + q2 * q2}, {"q1": q1 - q2 * q2}))
        t3 = standard_table(3)
        h = gen(t3, "q1") * gen(t3, "p1") * gen(t3, "p2") * gen(t3, "p3")
        assert is_symplectomorphism(odd_shift(t3, h))
        for table in _tables():
            for _ in range(4):
                assert is_symplectomorphism(
                    random_symplectomorphism(rng, table))

    def test_unbalanced_rescale_detected(self):
        t = standard_table(1)
        m = ChartMap(t, t, {"q1": gen(t, "q1").scale(2)})
        assert not is_symplectomorphism(m)


class TestEquivariance:
    def _sigmas(self, table, rng):
        out = []
        for weight in (Fraction(0), HALF, Fraction(1)):
            out.append(SDensity(weight,
                                DressedFunction(
                                    random_superfunction(rng, table,
                                                         max_deg=2))))
        # one dressed case per table keeps the exponent path honest
        ev = table.even_name(0)
        expo = (gen(table, ev) * gen(table, ev)).scale(Fraction(-1, 2))
        out.append(SDensity(HALF,
                            DressedFunction(SuperFunction.one(table), expo)))
        return out

    def test_weighted_operators_commute_with_transport(self):
        rng = Random(37)
        for table in _tables():
            for _ in range(3):
                psi = random_symplectomorphism(rng, table)
                mu = ReferenceDensity(1, random_even_superfunction(rng, table))
                report = verify_equivariance(psi, mu,
                                             self._sigmas(table, rng))
                assert report.ok

    def test_rejects_non_symplectomorphism(self):
        t = standard_table(1)
        m = ChartMap(t, t, {"q1": gen(t, "q1").scale(2)})
        mu = ReferenceDensity.standard(t)
        with pytest.raises(NotSymplectic):
            verify_equivariance(m, mu, [])

    def test_incompatible_density_stays_incompatible(self):
        t = standard_table(2)
        s = gen(t, "q1") * gen(t, "q2") * gen(t, "p1") * gen(t, "p2")
        mu = ReferenceDensity.exponential(s)
        assert not is_compatible(mu)
        lift = cotangent_lift(t, {"q1": gen(t, "q1") + gen(t, "q2") ** 2},
                              {"q1": gen(t, "q1") - gen(t, "q2") ** 2})
        report = verify_equivariance(lift, mu, self._sigmas(t, Random(41)))
        assert report.ok
        assert not is_compatible(pushforward_density(lift, mu))

    def test_compatible_density_stays_compatible(self):
        t = standard_table(2)
        mu = ReferenceDensity.exponential(gen(t, "q1") * gen(t, "q2"))
        assert is_compatible(mu)
        h = (gen(t, "q2") * gen(t, "q2")) * gen(t, "p1")
        shift = odd_shift(t, h)
        report = verify_equivariance(shift, mu, self._sigmas(t, Random(43)))
        assert report.ok
        assert is_compatible(pushforward_density(shift, mu))
