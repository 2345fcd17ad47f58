"""Expression grammar: parsing, evaluation, and canonical printing."""

from fractions import Fraction
from random import Random

import pytest

from bvcalc.errors import (NotExpressible, ParityMismatch, ParseError,
                           UnknownGenerator)
from bvcalc.exprs import (BinOp, Exp, Neg, Num, Pow, Sym, evaluate, parse,
                          parse_expr, print_dressed, print_ratfn,
                          print_superfunction, print_value)
from bvcalc.randgen import random_superfunction
from bvcalc.rational import Poly, RatFn
from bvcalc.superalg import (DressedFunction, SuperFunction, pattern_table,
                             standard_table)


def gen(table, name):
    return SuperFunction.generator(table, name)


class TestParseTree:
    def test_precedence_pow_binds_tighter_than_mul(self):
        node = parse("2*q1^2")
        assert node == BinOp("*", Num(2), Pow(Sym("q1"), 2))

    def test_left_associative_subtraction(self):
        t = standard_table(1)
        f = parse_expr("1 - 2 - 3", t)
        assert f == SuperFunction.const(t, Fraction(-4))

    def test_left_associative_division(self):
        t = standard_table(1)
        assert parse_expr("12/4/3", t) == SuperFunction.one(t)

    def test_unary_minus_scopes_whole_term(self):
        t = standard_table(1)
        assert parse_expr("-q1^2", t) == gen(t, "q1").scale(-1) * gen(t, "q1")

    def test_parenthesized_grouping(self):
        t = standard_table(1)
        lhs = parse_expr("(1 + q1)^2", t)
        rhs = SuperFunction.one(t) + gen(t, "q1").scale(2) \
            + gen(t, "q1") * gen(t, "q1")
        assert lhs == rhs

    def test_whitespace_is_insignificant(self):
        assert parse("q1+p1*q2") == parse(" q1 + p1 * q2 ")


class TestEvaluate:
    def test_odd_square_collapses_to_zero(self):
        t = standard_table(2)
        f = parse_expr("p1*p2 + p2*p1", t)
        assert f.is_zero()

    def test_generator_product(self):
        t = standard_table(1)
        assert parse_expr("q1*p1", t) == gen(t, "q1") * gen(t, "p1")

    def test_exp_of_nilpotent_even_soul(self):
        t = standard_table(2)
        f = parse_expr("exp(p1*p2)", t)
        weight = gen(t, "p1") * gen(t, "p2")
        assert f == DressedFunction(SuperFunction.one(t), weight)

    def test_exp_of_body_quadratic(self):
        t = standard_table(1)
        f = parse_expr("exp(-1/2*q1^2)", t)
        slot = t.even_slot("q1")
        expo = tuple(2 if i == slot else 0 for i in range(t.nvars))
        w = RatFn(Poly(t.nvars, {expo: Fraction(-1, 2)}))
        assert f == DressedFunction(SuperFunction.one(t), w)

    def test_sum_mixes_plain_and_dressed(self):
        t = standard_table(2)
        f = parse_expr("q1 + exp(p1*p2)", t)
        expected = SuperFunction.one(t) + gen(t, "q1") \
            + gen(t, "p1") * gen(t, "p2")
        assert f == DressedFunction(expected)

    def test_division_by_invertible_even(self):
        t = standard_table(1, params=("t",))
        f = parse_expr("q1/(1 + t^2)", t)
        assert f * (SuperFunction.one(t) + gen(t, "t") * gen(t, "t")) \
            == gen(t, "q1")

    def test_params_are_plain_generators(self):
        t = pattern_table("oe", params=("c",))
        f = parse_expr("c*y1*y2", t)
        assert f == gen(t, "c") * gen(t, "y1") * gen(t, "y2")


class TestErrors:
    @pytest.mark.parametrize("text", [
        "q1 +", "(q1", "q1 ^ p1", "q1 @ p1", "q1 q2", "^2", "exp q1",
        "q1 ^ -2", "", "*q1",
    ])
    def test_malformed_text(self, text):
        with pytest.raises(ParseError):
            parse(text)

    def test_parse_error_carries_position(self):
        with pytest.raises(ParseError) as err:
            parse("q1 + ")
        assert err.value.position == 5

    def test_unknown_generator(self):
        t = standard_table(1)
        with pytest.raises(UnknownGenerator):
            parse_expr("zz", t)

    def test_exp_of_odd_argument(self):
        t = standard_table(1)
        with pytest.raises(ParityMismatch):
            parse_expr("exp(p1)", t)

    def test_division_by_odd_or_soulful(self):
        t = standard_table(1)
        with pytest.raises(ParityMismatch):
            parse_expr("1/(q1*p1)", t)

    def test_division_by_dressed_value(self):
        t = standard_table(1)
        with pytest.raises(NotExpressible):
            parse_expr("q1/exp(q1^2)", t)

    def test_nested_exp(self):
        t = standard_table(1)
        with pytest.raises(NotExpressible):
            parse_expr("exp(exp(q1))", t)

    def test_sum_of_incompatible_weights(self):
        t = standard_table(1)
        with pytest.raises(NotExpressible):
            parse_expr("q1 + exp(q1)", t)

    def test_trailing_input_rejected(self):
        with pytest.raises(ParseError):
            parse("q1)")


class TestPrinting:
    def test_zero(self):
        t = standard_table(2)
        assert print_value(parse_expr("p1*p2 + p2*p1", t)) == "0"

    def test_monomial(self):
        t = standard_table(1)
        assert print_value(gen(t, "q1") * gen(t, "p1")) == "q1*p1"

    def test_rational_coefficients(self):
        t = standard_table(1)
        f = gen(t, "p1").scale(Fraction(-3, 2))
        assert print_value(f) == "-3/2*p1"

    def test_denominator_kept_explicit(self):
        t = standard_table(1, params=("t",))
        f = parse_expr("(q1 + t)/(1 + q1^2)", t)
        assert print_value(f) == "(t + q1)/(1 + q1^2)"

    def test_dressed_base_parenthesized_only_on_sums(self):
        t = standard_table(1)
        assert print_value(parse_expr("(1 + q1)*exp(-1/2*q1^2)", t)) \
            == "(1 + q1)*exp(-1/2*q1^2)"
        assert print_value(parse_expr("q1*exp(-1/2*q1^2)", t)) \
            == "q1*exp(-1/2*q1^2)"

    def test_pure_weight_prints_bare_exp(self):
        t = standard_table(1)
        assert print_value(parse_expr("exp(-1/2*q1^2)", t)) \
            == "exp(-1/2*q1^2)"

    def test_fraction_value(self):
        assert print_value(Fraction(-7, 3)) == "-7/3"

    def test_ratfn_printer_handles_monic_denominator(self):
        t = standard_table(2)
        p = RatFn(Poly(2, {(1, 0): Fraction(1)}),
                  Poly(2, {(0, 0): Fraction(1), (0, 2): Fraction(1)}))
        assert print_ratfn(p, t) == "q1/(1 + q2^2)"


def _tables():
    yield standard_table(1)
    yield standard_table(2, params=("t",))
    yield standard_table(3)
    yield pattern_table("oe", params=("t", "c"))
    yield pattern_table("eo")
    yield pattern_table("ooe", params=("s",))


class TestRoundTrip:
    def test_value_round_trip_plain(self):
        rng = Random(2024)
        checked = 0
        for table in _tables():
            for k in range(60):
                f = random_superfunction(rng, table, max_terms=4, max_deg=3,
                                         with_denominator=(k % 5 == 0))
                text = print_superfunction(f)
                assert parse_expr(text, table) == f, text
                checked += 1
        assert checked >= 360

    def test_value_round_trip_dressed(self):
        rng = Random(2025)
        checked = 0
        for table in _tables():
            evens = [i for i in range(table.nvars)
                     if table.parity_of(table.even_name(i)) == 0]
            for k in range(30):
                f = random_superfunction(rng, table, max_terms=3, max_deg=2)
                slot = evens[k % len(evens)]
                expo = tuple(2 if i == slot else 0
                             for i in range(table.nvars))
                w = RatFn(Poly(table.nvars, {expo: Fraction(-1, 2)}))
                df = DressedFunction(f, w)
                text = print_value(df)
                assert parse_expr(text, table) == df, text
                checked += 1
        assert checked >= 180

    def test_printed_form_is_stable(self):
        rng = Random(2026)
        for table in _tables():
            for _ in range(20):
                f = random_superfunction(rng, table, max_terms=4, max_deg=3)
                text = print_superfunction(f)
                again = print_value(parse_expr(text, table))
                assert again == text

    def test_tree_round_trip_examples(self):
        for text in ["0", "q1*p1", "1 + p1*p2", "-1/2*q1^2",
                     "(1 + q1)*exp(-1/2*q1^2)", "q1/(1 + q1^2)"]:
            node = parse(text)
            assert parse(text) == node


class TestAst:
    def test_nodes_are_comparable(self):
        assert parse("q1 + 2") == BinOp("+", Sym("q1"), Num(2))
        assert parse("-q1") == Neg(Sym("q1"))
        assert parse("exp(q1)") == Exp(Sym("q1"))

    def test_evaluate_matches_parse_expr(self):
        t = standard_table(2)
        node = parse("q1*p1 + 3")
        assert evaluate(node, t) == parse_expr("q1*p1 + 3", t)
